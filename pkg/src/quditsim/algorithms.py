"""Qudit phase estimation and Deutsch-Jozsa circuit builders and readouts."""

from __future__ import annotations

from dataclasses import dataclass
from math import pi
from typing import Optional, Sequence

import numpy as np

from . import gates
from .circuit_json import circuit_to_dict
from .engine import Circuit, SimulationResult
from .errors import AmbiguousMeasurement, BadDimension, SchemaViolation, SizeOverflow
from .state import Qudit, RegisterState, basis_qudit, digits_to_index, index_to_digits, make_register


@dataclass(frozen=True, eq=False)
class PEAConfig:
    dimension: int
    control_count: int
    unitary: np.ndarray
    eigenstate: Qudit


def build_pea(config: PEAConfig) -> tuple[Circuit, RegisterState]:
    """Phase estimation with controls on wires ``0..t-1`` and the eigenstate on wire ``t``.

    Control wire ``j`` drives ``U**(d**(t-1-j))``, so the control register reads
    the eigenphase as a base-d fraction with wire 0 most significant.
    """
    d, t = config.dimension, config.control_count
    if int(d) != d or d < 2:
        raise BadDimension(f"dimension must be an integer >= 2, got {d!r}")
    if t < 1:
        raise BadDimension(f"need at least one control qudit, got {t}")
    u = gates.require_unitary(config.unitary)
    if u.shape != (d, d):
        raise BadDimension(f"unitary must be {d}x{d}, got {u.shape}")
    if config.eigenstate.dimension != d:
        raise BadDimension(f"eigenstate has dimension {config.eigenstate.dimension}, expected {d}")
    if d**t > gates.MAX_MATRIX_SIZE:
        raise SizeOverflow(f"inverse GQFT over {t} controls exceeds the matrix size limit")

    circuit = Circuit(d, t + 1)
    for j in range(t):
        circuit.add("GQFT", [j])
    for j in range(t):
        circuit.add("U", [t], control=j, matrix=u, exponent=d ** (t - 1 - j))
    circuit.add("GQFT", list(range(t)), inverse=True)
    initial = make_register(d, [basis_qudit(d, 0)] * t + [config.eigenstate])
    return circuit, initial


def _control_readout(result: SimulationResult, t: int) -> list[int]:
    digits = []
    for j in range(t):
        row = result.marginals[j]
        top = int(np.argmax(row))
        if row[top] < 0.5:
            raise AmbiguousMeasurement(
                f"control wire {j} has no dominant outcome (max probability {row[top]:.3f})")
        digits.append(top)
    return digits


def measured_tau(result: SimulationResult, d: int, t: int) -> int:
    """Base-d integer read from the argmax of each control-wire marginal."""
    return digits_to_index(_control_readout(result, t), d)


def estimate_phase(result: SimulationResult, d: int, t: int) -> float:
    """Eigenphase ``2*pi*tau / d**t`` in radians."""
    return 2 * pi * measured_tau(result, d, t) / d**t


@dataclass(frozen=True)
class DJOracleSpec:
    """Oracle ``f: [0, d**nx) -> [0, d)`` for Deutsch-Jozsa.

    Either linear, ``f(x) = (sum_i a_i x_i + b) mod d`` with ``x_0`` the most
    significant digit, or an explicit table indexed by the flat x index.
    """

    coefficients: Optional[tuple[int, ...]] = None
    offset: int = 0
    table: Optional[tuple[int, ...]] = None

    @classmethod
    def linear(cls, coefficients: Sequence[int], offset: int = 0) -> "DJOracleSpec":
        return cls(coefficients=tuple(int(a) for a in coefficients), offset=int(offset))

    @classmethod
    def from_table(cls, values: Sequence[int]) -> "DJOracleSpec":
        return cls(table=tuple(int(v) for v in values))

    @property
    def is_constant(self) -> bool:
        if self.table is not None:
            return len(set(self.table)) == 1
        return all(a == 0 for a in self.coefficients)

    def validate(self, d: int, nx: int) -> None:
        if (self.table is None) == (self.coefficients is None):
            raise SchemaViolation("oracle must be exactly one of linear or table")
        if self.table is not None:
            if len(self.table) != d**nx:
                raise SchemaViolation(f"oracle table needs {d**nx} entries, got {len(self.table)}")
            bad = [v for v in self.table if not 0 <= v < d]
            if bad:
                raise SchemaViolation(f"oracle table values must lie in [0, {d}), got {bad[0]}")
        else:
            if len(self.coefficients) != nx:
                raise SchemaViolation(f"linear oracle needs {nx} coefficients, got {len(self.coefficients)}")
            if not all(0 <= a < d for a in self.coefficients) or not 0 <= self.offset < d:
                raise SchemaViolation(f"linear oracle coefficients and offset must lie in [0, {d})")

    def values(self, d: int, nx: int) -> np.ndarray:
        self.validate(d, nx)
        if self.table is not None:
            return np.array(self.table, dtype=np.int64)
        a = np.array(self.coefficients, dtype=np.int64)
        xs = np.array([index_to_digits(x, d, nx) for x in range(d**nx)], dtype=np.int64).reshape(-1, nx)
        return (xs @ a + self.offset) % d


def oracle_unitary(d: int, nx: int, oracle: DJOracleSpec) -> np.ndarray:
    """Permutation matrix ``|x, y> -> |x, y + f(x) mod d>``."""
    size = d ** (nx + 1)
    if size > gates.MAX_MATRIX_SIZE:
        raise SizeOverflow(f"oracle of size {size} exceeds the {gates.MAX_MATRIX_SIZE} limit")
    f = oracle.values(d, nx)
    m = np.zeros((size, size), dtype=np.complex128)
    for x in range(d**nx):
        for y in range(d):
            m[x * d + (y + f[x]) % d, x * d + y] = 1.0
    return m


def dj_ancilla(d: int) -> np.ndarray:
    """Ancilla amplitudes ``GQFT^dagger |1>``."""
    return gates.gqft(d, 1).conj().T @ basis_qudit(d, 1).amplitudes


def build_dj(d: int, nx: int, oracle: DJOracleSpec) -> tuple[Circuit, RegisterState]:
    """Deutsch-Jozsa over ``nx`` x-wires plus an ancilla on wire ``nx``.

    The ancilla starts in ``GQFT^dagger |1>`` so the modular-addition oracle
    kicks ``w^f(x)`` back onto the x register.
    """
    if nx < 1:
        raise SchemaViolation(f"need at least one x qudit, got {nx}")
    oracle.validate(d, nx)
    ancilla = dj_ancilla(d)
    circuit = Circuit(d, nx + 1)
    for i in range(nx):
        circuit.add("GQFT", [i])
    circuit.add("U", list(range(nx + 1)), matrix=oracle_unitary(d, nx, oracle))
    for i in range(nx):
        circuit.add("GQFT", [i], inverse=True)
    initial = make_register(d, [basis_qudit(d, 0)] * nx + [ancilla])
    return circuit, initial


@dataclass(eq=False)
class DJVerdict:
    verdict: str
    x_marginals: np.ndarray

    @property
    def is_constant(self) -> bool:
        return self.verdict == "constant"


def dj_decide(result: SimulationResult, nx: int, tol: float = 1e-9) -> DJVerdict:
    """Constant iff every x wire reads 0 with probability at least ``1 - tol``."""
    rows = np.array(result.marginals[:nx])
    constant = bool(np.all(rows[:, 0] >= 1 - tol))
    return DJVerdict("constant" if constant else "balanced", rows)


def pea_document(config: PEAConfig, shots: Optional[int] = None, seed: Optional[int] = None) -> dict:
    """Gate-level circuit document for :func:`build_pea`."""
    circuit, _ = build_pea(config)
    qudits = [0] * config.control_count + [config.eigenstate]
    return circuit_to_dict(circuit, qudits, shots, seed)


def dj_document(d: int, nx: int, oracle: DJOracleSpec, shots: Optional[int] = None,
                seed: Optional[int] = None) -> dict:
    """Gate-level circuit document for :func:`build_dj`."""
    circuit, _ = build_dj(d, nx, oracle)
    return circuit_to_dict(circuit, [0] * nx + [dj_ancilla(d)], shots, seed)
