"""Compare the compiled and numpy kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]

Times ``apply_matrix`` for 1- and 2-wire gates and ``marginals`` on
registers of growing size, then a full 100-gate circuit run per backend.
"""

import argparse
import timeit

import numpy as np

from quditsim import engine, gates, kernels
from quditsim.state import RegisterState

CASES = [(2, 16), (3, 10), (4, 8), (5, 7)]


def random_state(rng, size):
    v = rng.normal(size=size) + 1j * rng.normal(size=size)
    return v / np.linalg.norm(v)


def bench_kernel(mod, d, n, k, repeat):
    rng = np.random.default_rng(0)
    psi = random_state(rng, d**n)
    mat = np.ascontiguousarray(gates.gqft(d, k))
    wires = list(range(n // 2, n // 2 + k))
    offsets = engine._offsets(d, n, wires)
    bases = engine._bases(d, n, wires)
    t = timeit.Timer(lambda: mod.apply_matrix(psi, mat, offsets, bases))
    return min(t.repeat(repeat, 1))


def bench_marginals(mod, d, n, repeat):
    psi = random_state(np.random.default_rng(1), d**n)
    return min(timeit.Timer(lambda: mod.marginals(psi, d, n)).repeat(repeat, 1))


def bench_circuit(mod, repeat):
    rng = np.random.default_rng(2)
    d, n = 3, 10
    circuit = engine.Circuit(d, n)
    names = ["X", "Z", "Y", "GQFT", "SUM", "W"]
    for i in range(100):
        name = names[i % len(names)]
        w = rng.permutation(n)
        targets = [int(w[0]), int(w[1])] if name == "SUM" else [int(w[0])]
        control = int(w[2]) if i % 4 == 0 else None
        circuit.add(name, targets, control=control)
    initial = RegisterState.from_amplitudes(d, n, random_state(rng, d**n))
    saved = kernels.apply_matrix, kernels.marginals
    kernels.apply_matrix, kernels.marginals = mod.apply_matrix, mod.marginals
    try:
        return min(timeit.Timer(lambda: engine.run(circuit, initial)).repeat(repeat, 1))
    finally:
        kernels.apply_matrix, kernels.marginals = saved


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = kernels.available_backends()
    names = sorted(backends)
    print(f"default backend: {kernels.BACKEND}")
    print(f"{'kernel':<28}" + "".join(f"{n:>12}" for n in names) + ("     speedup" if len(names) > 1 else ""))

    def row(label, times):
        line = f"{label:<28}" + "".join(f"{times[n] * 1e3:>10.3f}ms" for n in names)
        if "cython" in times and "python" in times:
            line += f"{times['python'] / times['cython']:>11.2f}x"
        print(line)

    for d, n in CASES:
        for k in (1, 2):
            row(f"apply d={d} n={n} k={k}", {b: bench_kernel(backends[b], d, n, k, args.repeat) for b in names})
        row(f"marginals d={d} n={n}", {b: bench_marginals(backends[b], d, n, args.repeat) for b in names})
    row("run 100 gates d=3 n=10", {b: bench_circuit(backends[b], args.repeat) for b in names})


if __name__ == "__main__":
    main()
