"""Pure numpy implementations of the hot kernels.

Signatures and results match the compiled ``_ckernels`` module exactly;
:mod:`affine_focal.kernels` picks one of the two at import time.
"""

import numpy as np


def cauchy1(a, b):
    """Truncated Cauchy product of two coefficient tables of shape (M+1, B)."""
    m1 = a.shape[0]
    out = np.zeros_like(a)
    for k in range(m1):
        acc = out[k]
        for i in range(k + 1):
            acc += a[i] * b[k - i]
    return out


def cauchy2(a, b):
    """Bivariate truncated product on tables of shape (M+1, M+1, B), total degree <= M."""
    m1 = a.shape[0]
    out = np.zeros_like(a)
    for i in range(m1):
        for j in range(m1 - i):
            acc = out[i, j]
            for p in range(i + 1):
                for q in range(j + 1):
                    acc += a[p, q] * b[i - p, j - q]
    return out


def stencil_apply(values, offsets, weights, periodic):
    """Apply a finite-difference stencil along axis 0 of a (N, D) table.

    Non-periodic rows whose stencil leaves the table are NaN.
    """
    n = values.shape[0]
    out = np.zeros_like(values)
    if periodic:
        for off, w in zip(offsets, weights):
            out += w * np.roll(values, -int(off), axis=0)
        return out
    lo = -int(min(offsets.min(), 0))
    hi = int(max(offsets.max(), 0))
    out[:] = np.nan
    if n - hi <= lo:
        return out
    inner = np.zeros_like(values[lo:n - hi])
    for off, w in zip(offsets, weights):
        off = int(off)
        inner += w * values[lo + off:n - hi + off]
    out[lo:n - hi] = inner
    return out


def rk4_tabulated(f_nodes, f_mid, h, y0):
    """Classical RK4 for y' = f(u) with f tabulated at nodes and midpoints."""
    incr = (h / 6.0) * (f_nodes[:-1] + 4.0 * f_mid + f_nodes[1:])
    y = np.empty(f_nodes.shape[0])
    y[0] = y0
    # sequential accumulation keeps the rounding order fixed
    acc = y0
    for i in range(incr.shape[0]):
        acc = acc + incr[i]
        y[i + 1] = acc
    return y
