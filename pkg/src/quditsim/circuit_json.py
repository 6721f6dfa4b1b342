"""JSON circuit and result documents (schema version 1).

The same bytes are produced by the CLI ``run`` command and the HTTP
service. Complex numbers are ``[re, im]`` pairs; floats are written with
``repr`` precision so documents round-trip exactly.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import NamedTuple, Optional, Sequence, Union

import jsonschema
import numpy as np

from . import gates
from .engine import Circuit, GateInstruction, SimulationResult, run
from .errors import (
    IndexOutOfRange,
    MalformedJson,
    QuditError,
    SchemaViolation,
    SizeOverflow,
    UnknownGate,
    WrongLength,
)
from .state import Qudit, RegisterState, basis_qudit, make_qudit, make_register

SCHEMA_VERSION = 1
DEFAULT_MAX_AMPLITUDES = 2**20

InitialQudit = Union[int, np.ndarray, Qudit]


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    """Bundled JSON schema: ``"circuit"``, ``"result"`` or ``"error"``."""
    text = resources.files("quditsim").joinpath(f"schemas/{name}.v{SCHEMA_VERSION}.json").read_text()
    return json.loads(text)


@lru_cache(maxsize=None)
def _validator(name: str):
    return jsonschema.Draft202012Validator(load_schema(name))


@dataclass(frozen=True)
class RunOptions:
    shots: Optional[int] = None
    seed: Optional[int] = None


class ParsedCircuit(NamedTuple):
    circuit: Circuit
    state: RegisterState
    options: RunOptions
    qudits: list


def _json_path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def _complex_list(pairs) -> np.ndarray:
    arr = np.array(pairs, dtype=np.float64)
    return arr[..., 0] + 1j * arr[..., 1]


def _loads(text: Union[bytes, str]):
    try:
        if isinstance(text, bytes):
            text = text.decode("utf-8")
        return json.loads(text, parse_constant=_reject_constant)
    except UnicodeDecodeError as exc:
        raise MalformedJson(f"body is not valid UTF-8: {exc}", "$") from None
    except json.JSONDecodeError as exc:
        raise MalformedJson(f"invalid JSON: {exc.msg} at line {exc.lineno} column {exc.colno}", "$") from None
    except RecursionError:
        raise MalformedJson("document is nested too deeply", "$") from None
    except ValueError as exc:
        raise MalformedJson(str(exc), "$") from None


def _reject_constant(name):
    raise ValueError(f"non-finite number {name} is not allowed")


def _check_gate_names(doc) -> None:
    if not isinstance(doc, dict) or not isinstance(doc.get("gates"), list):
        return
    for i, g in enumerate(doc["gates"]):
        if isinstance(g, dict) and isinstance(g.get("name"), str) and g["name"] not in gates.NAMED_GATES:
            raise UnknownGate(f"unknown gate {g['name']!r}", f"$.gates[{i}].name")


def _schema_check(doc) -> None:
    err = jsonschema.exceptions.best_match(_validator("circuit").iter_errors(doc))
    if err is not None:
        raise SchemaViolation(err.message, _json_path(err.absolute_path))


def _parse_gate(g: dict, d: int, n: int, i: int) -> GateInstruction:
    name = g["name"]
    path = f"$.gates[{i}]"
    if ("p" in g or "q" in g) and name not in ("W", "WADJ"):
        raise SchemaViolation(f"fields p and q are only valid for W and WADJ, not {name}", path)
    if ("matrix" in g) != (name == "U"):
        raise SchemaViolation("field matrix is required for U and invalid for other gates", path)
    matrix = None
    if name == "U":
        rows = g["matrix"]
        if len({len(r) for r in rows}) != 1:
            raise SchemaViolation("matrix rows must all have the same length", f"{path}.matrix")
        matrix = _complex_list(rows)
    instr = GateInstruction(
        name=name,
        targets=tuple(int(t) for t in g["targets"]),
        control=int(g["control"]) if "control" in g else None,
        exponent=int(g.get("exponent", 1)),
        p=int(g.get("p", 0)),
        q=int(g.get("q", 0)),
        matrix=matrix,
        inverse=bool(g.get("inverse", False)),
    )
    try:
        instr.validate(d, n)
    except QuditError as exc:
        if exc.path is None:
            exc.path = f"{path}.matrix" if exc.code == "NotUnitary" else path
        raise
    return instr


def parse_circuit(text: Union[bytes, str], *, max_amplitudes: int = DEFAULT_MAX_AMPLITUDES) -> ParsedCircuit:
    """Validate a circuit document and build the circuit and initial state.

    Raises a :class:`QuditError` subclass whose ``path`` locates the problem.
    """
    doc = _loads(text)
    _check_gate_names(doc)
    _schema_check(doc)
    d = int(doc["dimensions"])
    specs = doc["qudits"]
    n = len(specs)
    if d**n > max_amplitudes:
        raise SizeOverflow(f"{d}^{n} amplitudes exceeds the limit of {max_amplitudes}", "$.qudits")

    qudits: list = []
    for i, spec in enumerate(specs):
        path = f"$.qudits[{i}]"
        if not isinstance(spec, list):
            spec = int(spec)
            if spec >= d:
                raise IndexOutOfRange(f"basis label {spec} outside [0, {d})", path)
            qudits.append(basis_qudit(d, spec))
        else:
            if len(spec) != d:
                raise WrongLength(f"expected {d} amplitudes, got {len(spec)}", path)
            try:
                qudits.append(make_qudit(d, _complex_list(spec)))
            except QuditError as exc:
                exc.path = path
                raise
    state = make_register(d, qudits)

    circuit = Circuit(d, n)
    for i, g in enumerate(doc["gates"]):
        circuit.instructions.append(_parse_gate(g, d, n, i))
    raw = [_complex_list(s) if isinstance(s, list) else int(s) for s in specs]
    return ParsedCircuit(circuit, state, RunOptions(_opt_int(doc, "shots"), _opt_int(doc, "seed")), raw)


def _opt_int(doc: dict, key: str) -> Optional[int]:
    return int(doc[key]) if key in doc else None


def _pair(z) -> list[float]:
    return [float(z.real), float(z.imag)]


def _dumps(obj) -> bytes:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False).encode("utf-8")


def gate_to_dict(instr: GateInstruction) -> dict:
    out: dict = {"name": instr.name, "targets": list(instr.targets)}
    if instr.control is not None:
        out["control"] = instr.control
    if instr.exponent != 1:
        out["exponent"] = instr.exponent
    if instr.name in ("W", "WADJ"):
        out["p"] = instr.p
        out["q"] = instr.q
    if instr.inverse:
        out["inverse"] = True
    if instr.name == "U":
        out["matrix"] = [[_pair(z) for z in row] for row in instr.matrix]
    return out


def _qudit_entry(q):
    if isinstance(q, (int, np.integer)) and not isinstance(q, bool):
        return int(q)
    amps = q.amplitudes if isinstance(q, Qudit) else q
    return [_pair(z) for z in np.asarray(amps, dtype=np.complex128).ravel()]


def circuit_to_dict(circuit: Circuit, qudits: Sequence[InitialQudit], shots: Optional[int] = None,
                    seed: Optional[int] = None) -> dict:
    if len(qudits) != circuit.qudit_count:
        raise WrongLength(f"circuit has {circuit.qudit_count} wires but {len(qudits)} initial qudits were given")
    doc: dict = {
        "schemaVersion": SCHEMA_VERSION,
        "dimensions": circuit.dimension,
        "qudits": [_qudit_entry(q) for q in qudits],
        "gates": [gate_to_dict(i) for i in circuit.instructions],
    }
    if shots is not None:
        doc["shots"] = int(shots)
    if seed is not None:
        doc["seed"] = int(seed)
    return doc


def serialize_circuit(circuit: Circuit, qudits: Sequence[InitialQudit], shots: Optional[int] = None,
                      seed: Optional[int] = None) -> bytes:
    """Canonical circuit document bytes."""
    return _dumps(circuit_to_dict(circuit, qudits, shots, seed))


def result_to_dict(result: SimulationResult, elapsed_ms: float = 0.0) -> dict:
    doc: dict = {
        "schemaVersion": SCHEMA_VERSION,
        "amplitudes": [_pair(z) for z in result.amplitudes],
        "probabilities": [[float(p) for p in row] for row in result.marginals],
    }
    if result.samples is not None:
        doc["counts"] = {k: int(v) for k, v in result.samples.items()}
    doc["metadata"] = {
        "dimensions": result.dimension,
        "quditCount": result.qudit_count,
        "elapsedMs": float(elapsed_ms),
    }
    return doc


def serialize_result(result: SimulationResult, elapsed_ms: float = 0.0) -> bytes:
    """Deterministic result document bytes (``elapsedMs`` is the last field)."""
    return _dumps(result_to_dict(result, elapsed_ms))


def parse_result(text: Union[bytes, str]) -> tuple[SimulationResult, dict]:
    """Inverse of :func:`serialize_result`; returns the result and its metadata."""
    doc = _loads(text)
    err = jsonschema.exceptions.best_match(_validator("result").iter_errors(doc))
    if err is not None:
        raise SchemaViolation(err.message, _json_path(err.absolute_path))
    amps = _complex_list(doc["amplitudes"]) if doc["amplitudes"] else np.zeros(0, dtype=np.complex128)
    probs = np.array(doc["probabilities"], dtype=np.float64)
    result = SimulationResult(amps, probs, dict(doc["counts"]) if "counts" in doc else None)
    return result, dict(doc["metadata"])


def simulate_result(text: Union[bytes, str], *, max_amplitudes: int = DEFAULT_MAX_AMPLITUDES,
                    shots: Optional[int] = None, seed: Optional[int] = None) -> tuple[SimulationResult, float]:
    """Parse and run one circuit document; ``shots``/``seed`` override the document.

    Returns the result and the elapsed wall time in milliseconds.
    """
    start = time.perf_counter()
    parsed = parse_circuit(text, max_amplitudes=max_amplitudes)
    shots = parsed.options.shots if shots is None else shots
    seed = parsed.options.seed if seed is None else seed
    result = run(parsed.circuit, parsed.state, shots=shots, seed=seed)
    return result, (time.perf_counter() - start) * 1000.0


def simulate(text: Union[bytes, str], *, max_amplitudes: int = DEFAULT_MAX_AMPLITUDES,
             shots: Optional[int] = None, seed: Optional[int] = None) -> bytes:
    """Parse, run and serialize one circuit document."""
    result, elapsed = simulate_result(text, max_amplitudes=max_amplitudes, shots=shots, seed=seed)
    return serialize_result(result, elapsed)


def error_body(exc: QuditError) -> bytes:
    return _dumps(exc.to_dict())
