# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled structure-projection kernels.

Same contract as ``_numpy``: per-diagonal Toeplitz averaging, the dual
equality-set projection, and two-level (block) Toeplitz assembly/averaging.
Each function does a single fused pass over the matrix instead of one
NumPy call per diagonal or index class.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "cython"


def herm_toeplitz_means(cnp.ndarray[cnp.complex128_t, ndim=2] a):
    cdef Py_ssize_t m = a.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] u = np.empty(m, dtype=np.complex128)
    cdef Py_ssize_t j, i
    cdef double complex acc
    for j in range(m):
        acc = 0
        for i in range(m - j):
            acc = acc + a[i + j, i] + a[i, i + j].conjugate()
        u[j] = acc / (2.0 * (m - j))
    u[0] = u[0].real
    return u


def toeplitz_build(cnp.ndarray[cnp.complex128_t, ndim=1] u):
    cdef Py_ssize_t m = u.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] t = np.empty((m, m), dtype=np.complex128)
    cdef Py_ssize_t i, j
    cdef double complex v
    for j in range(m):
        v = u[j]
        if j == 0:
            v = v.real
        for i in range(m - j):
            t[i + j, i] = v
            t[i, i + j] = v.conjugate()
    return t


def htilde_project(cnp.ndarray[cnp.complex128_t, ndim=3] h):
    cdef Py_ssize_t n = h.shape[0]
    cdef Py_ssize_t m = h.shape[1]
    cdef cnp.ndarray[cnp.complex128_t, ndim=3] out = np.empty_like(h)
    cdef Py_ssize_t k, i, j
    cdef double total = 0
    cdef double complex v, mean
    for k in range(n):
        for i in range(m):
            total += h[k, i, i].real
    for k in range(n):
        # hermitian part, upper triangle demeaned per superdiagonal
        for j in range(1, m):
            mean = 0
            for i in range(m - j):
                mean = mean + 0.5 * (h[k, i, i + j] + h[k, i + j, i].conjugate())
            mean = mean / (m - j)
            for i in range(m - j):
                v = 0.5 * (h[k, i, i + j] + h[k, i + j, i].conjugate()) - mean
                out[k, i, i + j] = v
                out[k, i + j, i] = v.conjugate()
        if total > 1e-12 or total < -1e-12:
            for i in range(m):
                out[k, i, i] = h[k, i, i].real / total
        else:
            for i in range(m):
                out[k, i, i] = 1.0 / (m * n)
    return out


def bt_generator_means(cnp.ndarray[cnp.complex128_t, ndim=2] b, Py_ssize_t m, Py_ssize_t l):
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] s = np.zeros((2 * m - 1, 2 * l - 1), dtype=np.complex128)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] cnt = np.zeros((2 * m - 1, 2 * l - 1), dtype=np.int64)
    cdef Py_ssize_t i, j, p, q, dm, dl
    for i in range(m):
        for p in range(l):
            for j in range(m):
                for q in range(l):
                    dm = i - j + m - 1
                    dl = p - q + l - 1
                    s[dm, dl] = s[dm, dl] + b[i * l + p, j * l + q]
                    cnt[dm, dl] += 1
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] t = s / cnt
    t = 0.5 * (t + np.conj(t[::-1, ::-1]))
    t[m - 1, l - 1] = t[m - 1, l - 1].real
    return t


def bt_build(cnp.ndarray[cnp.complex128_t, ndim=2] t, Py_ssize_t m, Py_ssize_t l):
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = np.empty((m * l, m * l), dtype=np.complex128)
    cdef Py_ssize_t i, j, p, q
    for i in range(m):
        for p in range(l):
            for j in range(m):
                for q in range(l):
                    out[i * l + p, j * l + q] = t[i - j + m - 1, p - q + l - 1]
    return out
