"""Command-line front end.

Exit codes: 0 on success, 1 on validation errors, 2 on internal errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, algorithms, gates
from .circuit_json import DEFAULT_MAX_AMPLITUDES, serialize_result, simulate_result
from .engine import run
from .errors import QuditError, SchemaViolation
from .state import basis_qudit

EXIT_OK, EXIT_INVALID, EXIT_INTERNAL = 0, 1, 2


class UsageError(QuditError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def format_table(marginals: np.ndarray, digits: int = 3) -> str:
    """Per-wire probability table: rows ``q[i]``, columns ``|0>..|d-1>``."""
    n, d = marginals.shape
    labels = [f"q[{i}]" for i in range(n)]
    lw = max(len(s) for s in labels)
    cw = max(digits + 3, len(f"|{d - 1}⟩"))
    lines = [" " * lw + "".join(f"  {f'|{s}⟩':>{cw}}" for s in range(d))]
    for label, row in zip(labels, marginals):
        lines.append(f"{label:<{lw}}" + "".join(f"  {p:>{cw}.{digits}f}" for p in row))
    return "\n".join(lines)


def _format_counts(counts: dict) -> str:
    return "\n".join(f"{k}: {v}" for k, v in counts.items())


def _read_json_file(path: str, what: str):
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"{what} file not found: {path}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"{what} file is not valid JSON: {exc.msg}", "$") from None


def _matrix_from_json(rows) -> np.ndarray:
    try:
        arr = np.array(rows, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 2:
            raise ValueError
    except ValueError:
        raise SchemaViolation("matrix must be a list of rows of [re, im] pairs", "$") from None
    return arr[..., 0] + 1j * arr[..., 1]


def _phase_text(tau: int, d: int, t: int) -> str:
    frac = Fraction(tau, d**t)
    if frac == 0:
        return "0"
    return f"2π·{frac.numerator}/{frac.denominator}"


def cmd_run(args, out) -> None:
    path = Path(args.file)
    if not path.is_file():
        raise UsageError(f"circuit file not found: {args.file}")
    result, elapsed = simulate_result(path.read_bytes(), max_amplitudes=args.max_amplitudes,
                                      shots=args.shots, seed=args.seed)
    if args.output == "json":
        out.write(serialize_result(result, elapsed).decode() + "\n")
        return
    out.write(format_table(result.marginals) + "\n")
    if result.samples is not None:
        out.write(_format_counts(result.samples) + "\n")


def cmd_pea(args, out) -> None:
    d, t = args.d, args.t
    if args.gate.upper() == "Z":
        u = gates.pauli_z(d, 1)
    else:
        u = _matrix_from_json(_read_json_file(args.gate, "matrix"))
    config = algorithms.PEAConfig(d, t, u, basis_qudit(d, args.eigenstate))
    circuit, initial = algorithms.build_pea(config)
    result = run(circuit, initial)
    tau = algorithms.measured_tau(result, d, t)
    phi = algorithms.estimate_phase(result, d, t)
    if args.output == "json":
        doc = {"tau": tau, "phi": phi, "phiOver2Pi": str(Fraction(tau, d**t)),
               "controlMarginals": result.marginals[:t].tolist()}
        out.write(json.dumps(doc) + "\n")
        return
    out.write(f"tau = {tau}\n")
    out.write(f"phi = {phi!r} rad = {_phase_text(tau, d, t)}\n")
    out.write(format_table(result.marginals[:t]) + "\n")


def parse_oracle(text: str) -> algorithms.DJOracleSpec:
    """``linear:a1,...,an[,+b]`` or the path of a JSON array of integers."""
    if text.startswith("linear:"):
        parts = [p.strip() for p in text[len("linear:"):].split(",") if p.strip()]
        offset = 0
        if parts and parts[-1].startswith("+"):
            offset = parts.pop()[1:]
        try:
            return algorithms.DJOracleSpec.linear([int(a) for a in parts], int(offset))
        except ValueError:
            raise SchemaViolation(f"malformed linear oracle {text!r}", "$") from None
    values = _read_json_file(text, "oracle table")
    if not isinstance(values, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in values):
        raise SchemaViolation("oracle table must be a JSON array of integers", "$")
    return algorithms.DJOracleSpec.from_table(values)


def cmd_dj(args, out) -> None:
    oracle = parse_oracle(args.oracle)
    circuit, initial = algorithms.build_dj(args.d, args.nx, oracle)
    result = run(circuit, initial)
    verdict = algorithms.dj_decide(result, args.nx)
    if args.output == "json":
        doc = {"verdict": verdict.verdict, "probabilities": result.marginals.tolist()}
        out.write(json.dumps(doc) + "\n")
        return
    out.write(format_table(result.marginals) + "\n")
    out.write(f"verdict: {verdict.verdict}\n")


def cmd_gate(args, out) -> None:
    name = args.name.upper()
    if name == "P":
        m = gates.projector(args.d, args.exponent)
    elif name in gates.NAMED_GATES and name != "U":
        m = gates.named_gate(name, args.d, exponent=args.exponent, p=args.p, q=args.q, wires=args.n)
    else:
        raise UsageError(f"unknown gate family {args.name!r}")
    rows = []
    for row in m:
        pairs = [[float(z.real), float(z.imag)] for z in row]
        if args.digits is not None:
            pairs = [[round(a, args.digits) + 0.0, round(b, args.digits) + 0.0] for a, b in pairs]
        rows.append(pairs)
    out.write("\n".join(json.dumps(r) for r in rows) + "\n")


def cmd_serve(args, out) -> None:
    from .service import ServiceConfig, serve

    config = ServiceConfig.from_env(host=args.host, port=args.port, max_body_bytes=args.max_body_bytes,
                                    max_amplitudes=args.max_amplitudes, time_limit_ms=args.time_limit_ms)
    serve(config)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quditsim", description="Qudit quantum circuit simulator")
    parser.add_argument("--version", action="version", version=f"quditsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="simulate a circuit document")
    p.add_argument("file")
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--output", choices=("json", "table"), default="json")
    p.add_argument("--max-amplitudes", type=int, default=DEFAULT_MAX_AMPLITUDES)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("pea", help="qudit phase estimation")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--gate", default="Z", help="Z or a JSON file holding a d x d matrix of [re, im] pairs")
    p.add_argument("--eigenstate", type=int, default=0)
    p.add_argument("--output", choices=("json", "table"), default="table")
    p.set_defaults(func=cmd_pea)

    p = sub.add_parser("dj", help="qudit Deutsch-Jozsa")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--nx", type=int, default=1)
    p.add_argument("--oracle", required=True, help="linear:a1,...,an[,+b] or a JSON file with an integer table")
    p.add_argument("--output", choices=("json", "table"), default="table")
    p.set_defaults(func=cmd_dj)

    p = sub.add_parser("gate", help="print a gate matrix as rows of [re, im] pairs")
    p.add_argument("name", help="I, X, Y, Z, W, WADJ, SUM, GQFT or P (projector onto |exponent>)")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--exponent", type=int, default=1)
    p.add_argument("--p", type=int, default=0)
    p.add_argument("--q", type=int, default=0)
    p.add_argument("--n", type=int, default=1, help="GQFT wire count")
    p.add_argument("--digits", type=int)
    p.set_defaults(func=cmd_gate)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.add_argument("--max-body-bytes", type=int)
    p.add_argument("--max-amplitudes", type=int)
    p.add_argument("--time-limit-ms", type=int)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        args.func(args, out)
    except QuditError as exc:
        err.write(json.dumps(exc.to_dict()) + "\n")
        return EXIT_INVALID
    except SystemExit as exc:
        return int(exc.code or 0)
    except Exception as exc:  # noqa: BLE001
        err.write(json.dumps({"code": "InternalError", "message": f"{type(exc).__name__}: {exc}",
                              "path": None}) + "\n")
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
