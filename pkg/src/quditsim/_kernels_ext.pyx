# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled state-vector kernels (see ``_kernels_py`` for the reference versions)."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

from . import _kernels_py

# from this gate size up the gathered BLAS matmul wins
BLAS_MIN_SIZE = 16


def apply_matrix(double complex[::1] psi,
                 const double complex[:, ::1] mat,
                 const cnp.int64_t[::1] offsets,
                 const cnp.int64_t[::1] bases):
    cdef Py_ssize_t size = offsets.shape[0]
    cdef Py_ssize_t nbases = bases.shape[0]
    cdef Py_ssize_t b, r, c
    cdef cnp.int64_t idx
    cdef double ar, ai, mr, mi, xr, xi
    if mat.shape[0] != size or mat.shape[1] != size:
        raise ValueError("matrix shape does not match offsets")
    if size >= BLAS_MIN_SIZE:
        _kernels_py.apply_matrix(np.asarray(psi), np.asarray(mat), np.asarray(offsets), np.asarray(bases))
        return
    # split storage avoids the C99 complex multiply helper
    cdef double[:, ::1] m_re = np.ascontiguousarray(np.asarray(mat).real)
    cdef double[:, ::1] m_im = np.ascontiguousarray(np.asarray(mat).imag)
    cdef double[::1] buf_re = np.empty(size)
    cdef double[::1] buf_im = np.empty(size)
    with nogil:
        for b in range(nbases):
            for c in range(size):
                idx = bases[b] + offsets[c]
                buf_re[c] = psi[idx].real
                buf_im[c] = psi[idx].imag
            for r in range(size):
                ar = 0.0
                ai = 0.0
                for c in range(size):
                    mr = m_re[r, c]
                    mi = m_im[r, c]
                    xr = buf_re[c]
                    xi = buf_im[c]
                    ar = ar + mr * xr - mi * xi
                    ai = ai + mr * xi + mi * xr
                psi[bases[b] + offsets[r]] = ar + 1j * ai


def marginals(const double complex[::1] psi, Py_ssize_t d, Py_ssize_t n):
    cdef Py_ssize_t total = psi.shape[0]
    out_arr = np.zeros((n, d), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[::1] probs = np.empty(total)
    cdef Py_ssize_t i, j, k, outer, inner, stride, block
    cdef double acc
    with nogil:
        for j in range(total):
            probs[j] = psi[j].real * psi[j].real + psi[j].imag * psi[j].imag
        # wire i has stride d**(n-1-i); walk blocks of that stride digit by digit
        stride = total
        for i in range(n):
            block = stride
            stride = stride // d
            for k in range(d):
                acc = 0.0
                outer = k * stride
                while outer < total:
                    for inner in range(stride):
                        acc = acc + probs[outer + inner]
                    outer = outer + block
                out[i, k] = acc
    return out_arr
