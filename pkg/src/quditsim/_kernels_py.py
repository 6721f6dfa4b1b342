"""Pure numpy implementations of the state-vector kernels.

Same contract as the compiled ``_kernels_ext`` module; used when the
extension is unavailable or ``QUDITSIM_PURE_PYTHON`` is set.
"""

import numpy as np


def apply_matrix(psi, mat, offsets, bases):
    """In place: for each base index ``b``, ``psi[b + offsets] = mat @ psi[b + offsets]``."""
    idx = bases[:, None] + offsets[None, :]
    psi[idx] = psi[idx] @ mat.T


def marginals(psi, d, n):
    probs = (psi.real**2 + psi.imag**2).reshape((d,) * n)
    out = np.empty((n, d))
    for i in range(n):
        axes = tuple(a for a in range(n) if a != i)
        out[i] = probs.sum(axis=axes) if axes else probs
    return out
