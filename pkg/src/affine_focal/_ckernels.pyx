# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels; see ``_kernels_py`` for the reference semantics."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def cauchy1(const double[:, ::1] a, const double[:, ::1] b):
    cdef Py_ssize_t m1 = a.shape[0], nb = a.shape[1]
    cdef Py_ssize_t k, i, j
    out = np.zeros((m1, nb))
    cdef double[:, ::1] o = out
    for k in range(m1):
        for i in range(k + 1):
            for j in range(nb):
                o[k, j] += a[i, j] * b[k - i, j]
    return out


def cauchy2(const double[:, :, ::1] a, const double[:, :, ::1] b):
    cdef Py_ssize_t m1 = a.shape[0], nb = a.shape[2]
    cdef Py_ssize_t i, j, p, q, r
    out = np.zeros((m1, m1, nb))
    cdef double[:, :, ::1] o = out
    for i in range(m1):
        for j in range(m1 - i):
            for p in range(i + 1):
                for q in range(j + 1):
                    for r in range(nb):
                        o[i, j, r] += a[p, q, r] * b[i - p, j - q, r]
    return out


def stencil_apply(const double[:, ::1] values, const long[::1] offsets, const double[::1] weights, bint periodic):
    cdef Py_ssize_t n = values.shape[0], d = values.shape[1]
    cdef Py_ssize_t ns = offsets.shape[0]
    cdef Py_ssize_t i, s, c, idx, lo = 0, hi = 0
    out = np.zeros((n, d))
    cdef double[:, ::1] o = out
    for s in range(ns):
        if -offsets[s] > lo:
            lo = -offsets[s]
        if offsets[s] > hi:
            hi = offsets[s]
    if periodic:
        for i in range(n):
            for s in range(ns):
                idx = (i + offsets[s]) % n
                if idx < 0:
                    idx += n
                for c in range(d):
                    o[i, c] += weights[s] * values[idx, c]
        return out
    for i in range(n):
        if i < lo or i >= n - hi:
            for c in range(d):
                o[i, c] = np.nan
            continue
        for s in range(ns):
            for c in range(d):
                o[i, c] += weights[s] * values[i + offsets[s], c]
    return out


def rk4_tabulated(const double[::1] f_nodes, const double[::1] f_mid, double h, double y0):
    cdef Py_ssize_t n = f_mid.shape[0], i
    y = np.empty(n + 1)
    cdef double[::1] yv = y
    cdef double acc = y0
    yv[0] = y0
    for i in range(n):
        acc = acc + (h / 6.0) * (f_nodes[i] + 4.0 * f_mid[i] + f_nodes[i + 1])
        yv[i + 1] = acc
    return y
