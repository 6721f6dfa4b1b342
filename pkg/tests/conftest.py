from pathlib import Path

import numpy as np
import pytest

from quditsim import kernels

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(params=sorted(kernels.available_backends()))
def backend(request, monkeypatch):
    """Run the test once per available kernel backend."""
    mod = kernels.available_backends()[request.param]
    monkeypatch.setattr(kernels, "apply_matrix", mod.apply_matrix)
    monkeypatch.setattr(kernels, "marginals", mod.marginals)
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20201015)


def random_state_vector(rng, size):
    v = rng.normal(size=size) + 1j * rng.normal(size=size)
    return v / np.linalg.norm(v)


def random_unitary(rng, size):
    z = rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def fixture_paths():
    return sorted(FIXTURES.glob("*.json"))


FAMILIES = ("I", "X", "Y", "Z", "W", "WADJ", "SUM", "GQFT", "U")


def random_instruction(rng, d, n):
    from quditsim.engine import GateInstruction

    names = [f for f in FAMILIES if not (f == "SUM" and n < 2)]
    name = str(rng.choice(names))
    if name == "SUM":
        k = 2
    elif name in ("GQFT", "U"):
        k = int(rng.integers(1, min(n, 2) + 1))
    else:
        k = 1
    wires = [int(w) for w in rng.permutation(n)]
    targets, rest = wires[:k], wires[k:]
    control = int(rest[0]) if rest and rng.random() < 0.4 else None
    kwargs = {"exponent": int(rng.integers(0, 2 * d)) if name != "U" else 1}
    if name in ("W", "WADJ"):
        kwargs.update(p=int(rng.integers(0, d)), q=int(rng.integers(0, d)))
    if name == "U":
        kwargs["matrix"] = random_unitary(rng, d**k)
    return GateInstruction(name, tuple(targets), control=control, inverse=bool(rng.random() < 0.3), **kwargs)


def random_circuit(rng, d, n, n_gates):
    from quditsim.engine import Circuit

    c = Circuit(d, n)
    for _ in range(n_gates):
        c.append(random_instruction(rng, d, n))
    return c


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[number])
