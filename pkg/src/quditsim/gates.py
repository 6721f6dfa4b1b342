"""Generators for the qudit gate families as dense unitary matrices.

All generators return read-only ``complex128`` arrays and cache them by
their integer parameters. Exponents and Weyl indices are reduced modulo
``d``. Roots of unity that land on a quarter turn are exact, so the d=2
and d=4 gates contain no rounding noise.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import BadDimension, IndexOutOfRange, NotSquare, NotUnitary, SizeMismatch, SizeOverflow

UNITARY_TOL = 1e-10
MAX_MATRIX_SIZE = 4096

_QUARTER_TURNS = (1.0 + 0j, 1j, -1.0 + 0j, -1j)


def _check_dimension(d: int) -> None:
    if int(d) != d or d < 2:
        raise BadDimension(f"dimension must be an integer >= 2, got {d!r}")


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@lru_cache(maxsize=None)
def roots_of_unity(n: int) -> np.ndarray:
    """``exp(2*pi*i*k/n)`` for ``k = 0..n-1``."""
    k = np.arange(n)
    r = np.exp(2j * np.pi * k / n)
    quarter = (4 * k) % n == 0
    r[quarter] = [_QUARTER_TURNS[q % 4] for q in (4 * k[quarter]) // n]
    return _frozen(r)


def omega(d: int) -> complex:
    _check_dimension(d)
    return complex(roots_of_unity(d)[1 % d])


@lru_cache(maxsize=None)
def _weyl(d: int, p: int, q: int) -> np.ndarray:
    w = roots_of_unity(d)
    k = np.arange(d)
    m = np.zeros((d, d), dtype=np.complex128)
    m[k, (k + q) % d] = w[(k * p) % d]
    return _frozen(m)


@lru_cache(maxsize=None)
def _weyl_adjoint(d: int, q: int, p: int) -> np.ndarray:
    w = roots_of_unity(d)
    k = np.arange(d)
    m = np.zeros((d, d), dtype=np.complex128)
    m[(k + p) % d, k] = w[(k * q) % d]
    return _frozen(m)


def weyl(d: int, p: int, q: int) -> np.ndarray:
    """Weyl operator ``sum_k w^(k p) |k><k+q|``."""
    _check_dimension(d)
    return _weyl(int(d), int(p) % d, int(q) % d)


def weyl_adjoint(d: int, q: int, p: int) -> np.ndarray:
    """Weyl adjoint operator ``sum_k w^(k q) |k+p><k|``.

    Arguments follow the ``W†_{q,p}`` subscript order. With that pairing
    ``weyl_adjoint(d, q, p)`` is the conjugate transpose of ``weyl(d, -q, p)``.
    """
    _check_dimension(d)
    return _weyl_adjoint(int(d), int(q) % d, int(p) % d)


def identity_gate(d: int) -> np.ndarray:
    return weyl_adjoint(d, 0, 0)


def pauli_x(d: int, m: int = 1) -> np.ndarray:
    """Cyclic shift ``|k> -> |k+m mod d>``."""
    return weyl_adjoint(d, 0, m)


def pauli_z(d: int, m: int = 1) -> np.ndarray:
    """Clock gate ``diag(w^(k m))``."""
    return weyl_adjoint(d, m, 0)


@lru_cache(maxsize=None)
def _pauli_y(d: int, m: int) -> np.ndarray:
    return _frozen(_QUARTER_TURNS[m % 4] * _weyl_adjoint(d, m, m))


def pauli_y(d: int, m: int = 1) -> np.ndarray:
    """``i^(m mod d) * W†_{m,m}``.

    For d > 2 this is generally not the m-th matrix power of ``pauli_y(d, 1)``;
    use :func:`matrix_power` for that.
    """
    _check_dimension(d)
    return _pauli_y(int(d), int(m) % d)


@lru_cache(maxsize=None)
def _projector(d: int, k: int) -> np.ndarray:
    m = np.zeros((d, d), dtype=np.complex128)
    m[k, k] = 1.0
    return _frozen(m)


def projector(d: int, k: int) -> np.ndarray:
    _check_dimension(d)
    if not 0 <= k < d:
        raise IndexOutOfRange(f"projector index {k} outside [0, {d})")
    return _projector(int(d), int(k))


def check_unitary(m, tol: float = UNITARY_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        return False
    dev = m @ m.conj().T - np.eye(m.shape[0])
    return bool(np.max(np.abs(dev)) <= tol)


def require_unitary(m, tol: float = UNITARY_TOL) -> np.ndarray:
    arr = np.asarray(m, dtype=np.complex128)
    if not check_unitary(arr, tol):
        raise NotUnitary(f"matrix of shape {arr.shape} is not unitary within {tol:g}")
    return arr


def adjoint(u) -> np.ndarray:
    return require_unitary(u).conj().T.copy()


def matrix_power(u, k: int) -> np.ndarray:
    if k < 0:
        raise ValueError(f"matrix power exponent must be >= 0, got {k}")
    return np.linalg.matrix_power(require_unitary(u), int(k))


def wire_count(size: int, d: int) -> int:
    """Number of d-level wires a ``size``-dimensional matrix acts on."""
    k, s = 0, 1
    while s < size:
        s *= d
        k += 1
    if s != size or k == 0:
        raise SizeMismatch(f"matrix size {size} is not a positive power of {d}")
    return k


def controlled(u, d: int) -> np.ndarray:
    """Block-diagonal ``sum_k P_k (x) U^k`` with a single d-level control.

    ``u`` may act on several wires (size ``d**k``); the result has size
    ``d * size(u)``.
    """
    _check_dimension(d)
    u = require_unitary(u)
    size = u.shape[0]
    wire_count(size, d)
    out = np.zeros((d * size, d * size), dtype=np.complex128)
    block = np.eye(size, dtype=np.complex128)
    for c in range(d):
        out[c * size:(c + 1) * size, c * size:(c + 1) * size] = block
        block = u @ block
    return out


@lru_cache(maxsize=None)
def _sum_gate(d: int) -> np.ndarray:
    return _frozen(controlled(pauli_x(d, 1), d))


def sum_gate(d: int) -> np.ndarray:
    """Qudit CNOT: ``|c, t> -> |c, t + c mod d>``."""
    _check_dimension(d)
    return _sum_gate(int(d))


@lru_cache(maxsize=64)
def _gqft(d: int, n: int) -> np.ndarray:
    size = d**n
    w = roots_of_unity(size)
    k = np.arange(size)
    return _frozen(w[np.outer(k, k) % size] / np.sqrt(size))


def gqft(d: int, n: int = 1) -> np.ndarray:
    """Unitary DFT over ``n`` qudits, entries ``W^(k j) / sqrt(d^n)``.

    The root of unity is ``W = exp(2*pi*i / d^n)``; for ``n == 1`` this is the
    generalized Hadamard gate, and for ``d == 2, n == 1`` the Hadamard gate.
    """
    _check_dimension(d)
    if n < 1:
        raise BadDimension(f"GQFT needs at least one qudit, got n={n}")
    if d**n > MAX_MATRIX_SIZE:
        raise SizeOverflow(f"GQFT of size {d}^{n} exceeds the {MAX_MATRIX_SIZE} limit")
    return _gqft(int(d), int(n))


NAMED_GATES = ("I", "X", "Y", "Z", "W", "WADJ", "SUM", "GQFT", "U")

# wires each family acts on; None means "as many as targets"
FAMILY_WIRES = {"I": 1, "X": 1, "Y": 1, "Z": 1, "W": 1, "WADJ": 1, "SUM": 2, "GQFT": None, "U": None}


def named_gate(name: str, d: int, *, exponent: int = 1, p: int = 0, q: int = 0, wires: int = 1) -> np.ndarray:
    """Matrix for a named family.

    ``exponent`` is the Pauli index ``m`` for I/X/Y/Z and a matrix power for
    W, WADJ, SUM and GQFT. ``wires`` only matters for GQFT.
    """
    if name == "I":
        return identity_gate(d)
    if name == "X":
        return pauli_x(d, exponent)
    if name == "Y":
        return pauli_y(d, exponent)
    if name == "Z":
        return pauli_z(d, exponent)
    if name == "W":
        base = weyl(d, p, q)
    elif name == "WADJ":
        base = weyl_adjoint(d, q, p)
    elif name == "SUM":
        base = sum_gate(d)
    elif name == "GQFT":
        base = gqft(d, wires)
    else:
        raise KeyError(name)
    if name == "GQFT":
        exponent %= 4
    elif name == "SUM":
        exponent %= d
    return base if exponent == 1 else np.linalg.matrix_power(base, exponent)
