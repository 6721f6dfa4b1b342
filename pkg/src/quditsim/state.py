"""Qudits, register states and the base-d index codec.

Wire 0 is the top of a circuit and the most significant digit of a flat
amplitude index; the last wire is the least significant.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    BadDimension,
    DimensionMismatch,
    IndexOutOfRange,
    WrongLength,
    ZeroVector,
)

ZERO_TOL = 1e-15
NORM_TOL = 1e-12


def _check_dimension(d: int) -> None:
    if int(d) != d or d < 2:
        raise BadDimension(f"dimension must be an integer >= 2, got {d!r}")


def _as_complex_vector(values) -> np.ndarray:
    vec = np.array(values, dtype=np.complex128).ravel()
    if not np.all(np.isfinite(vec)):
        raise ValueError("amplitudes must be finite")
    return vec


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def normalize(amplitudes) -> np.ndarray:
    """Scale ``amplitudes`` to unit Euclidean norm.

    Raises :class:`ZeroVector` when every entry is below 1e-15 in magnitude.
    """
    vec = _as_complex_vector(amplitudes)
    if vec.size == 0 or np.max(np.abs(vec)) < ZERO_TOL:
        raise ZeroVector("cannot normalize an all-zero amplitude vector")
    return vec / np.linalg.norm(vec)


@dataclass(frozen=True, eq=False)
class Qudit:
    """A single d-level system: ``dimension`` plus ``dimension`` amplitudes."""

    dimension: int
    amplitudes: np.ndarray

    def __repr__(self) -> str:
        return f"Qudit(d={self.dimension}, amplitudes={np.round(self.amplitudes, 6).tolist()})"


def make_qudit(d: int, amplitudes: Sequence[complex]) -> Qudit:
    _check_dimension(d)
    vec = _as_complex_vector(amplitudes)
    if vec.size != d:
        raise WrongLength(f"expected {d} amplitudes, got {vec.size}")
    return Qudit(int(d), _frozen(normalize(vec)))


def basis_qudit(d: int, k: int) -> Qudit:
    _check_dimension(d)
    if not 0 <= k < d:
        raise IndexOutOfRange(f"basis label {k} outside [0, {d})")
    vec = np.zeros(d, dtype=np.complex128)
    vec[k] = 1.0
    return Qudit(int(d), _frozen(vec))


def tensor_product(d: int, qudits: Sequence[Qudit]) -> np.ndarray:
    """Joint amplitude vector of ``qudits``, first qudit most significant."""
    if len(qudits) == 0:
        raise WrongLength("tensor product needs at least one qudit")
    for i, q in enumerate(qudits):
        if q.dimension != d:
            raise DimensionMismatch(f"qudit {i} has dimension {q.dimension}, expected {d}")
    out = np.asarray(qudits[0].amplitudes, dtype=np.complex128)
    for q in qudits[1:]:
        out = np.kron(out, q.amplitudes)
    return out


def index_to_digits(j: int, d: int, n: int) -> list[int]:
    if not 0 <= j < d**n:
        raise IndexOutOfRange(f"index {j} outside [0, {d}^{n})")
    digits = [0] * n
    for pos in range(n - 1, -1, -1):
        j, digits[pos] = divmod(j, d)
    return digits


def digits_to_index(digits: Sequence[int], d: int) -> int:
    j = 0
    for s in digits:
        if not 0 <= s < d:
            raise IndexOutOfRange(f"digit {s} outside [0, {d})")
        j = j * d + int(s)
    return j


@dataclass(frozen=True, eq=False)
class RegisterState:
    """Global state of ``qudit_count`` qudits of dimension ``dimension``.

    ``amplitudes`` has length ``dimension ** qudit_count`` and is read-only;
    engine operations return new states rather than mutating this one.
    """

    dimension: int
    qudit_count: int
    amplitudes: np.ndarray

    @property
    def size(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @classmethod
    def from_amplitudes(cls, d: int, n: int, amplitudes) -> "RegisterState":
        _check_dimension(d)
        if n < 1:
            raise WrongLength("a register needs at least one qudit")
        vec = _as_complex_vector(amplitudes)
        if vec.size != d**n:
            raise WrongLength(f"expected {d**n} amplitudes, got {vec.size}")
        return cls(int(d), int(n), _frozen(normalize(vec)))

    @classmethod
    def basis(cls, d: int, digits: Sequence[int]) -> "RegisterState":
        _check_dimension(d)
        vec = np.zeros(d ** len(digits), dtype=np.complex128)
        vec[digits_to_index(digits, d)] = 1.0
        return cls(int(d), len(digits), _frozen(vec))

    def __repr__(self) -> str:
        return f"RegisterState(d={self.dimension}, n={self.qudit_count})"


def make_register(d: int, qudits: Sequence[Qudit | Sequence[complex]]) -> RegisterState:
    """Build a register from initial qudits, normalizing the joint state.

    Entries may be :class:`Qudit` objects or raw amplitude sequences.
    """
    _check_dimension(d)
    qs = [q if isinstance(q, Qudit) else make_qudit(d, q) for q in qudits]
    if not qs:
        raise WrongLength("a register needs at least one qudit")
    if len(qs) == 1:
        if qs[0].dimension != d:
            raise DimensionMismatch(f"qudit 0 has dimension {qs[0].dimension}, expected {d}")
        vec = np.array(qs[0].amplitudes)
    else:
        vec = tensor_product(d, qs)
    return RegisterState(int(d), len(qs), _frozen(normalize(vec)))
