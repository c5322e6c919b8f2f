"""Truncated Taylor arithmetic in one or two variables.

A :class:`Jet` holds Taylor coefficients ``c[k] = f^(k)(u0) / k!`` (or
``c[i, j]`` for two variables, total degree <= order) for a whole batch of
expansion points at once.  Arithmetic on jets propagates derivatives
exactly up to round-off, which is how the library obtains high-order
derivatives of invariants built from analytic curves and surfaces.

Coefficient arrays have shape ``(M+1,) * nvars + batch``.  Vector-valued
jets keep the ambient dimension as the last batch axis.
"""

from math import comb, factorial

import numpy as np

from . import kernels


def _tri_mask(m1):
    i, j = np.indices((m1, m1))
    return (i + j) < m1


class Jet:
    __slots__ = ("c", "nvars")

    def __init__(self, coeffs, nvars=1):
        self.c = np.asarray(coeffs, dtype=float)
        self.nvars = nvars

    # -- construction ----------------------------------------------------

    @classmethod
    def const(cls, values, order, nvars=1):
        values = np.asarray(values, dtype=float)
        c = np.zeros((order + 1,) * nvars + values.shape)
        c[(0,) * nvars] = values
        return cls(c, nvars)

    @classmethod
    def variable(cls, values, order):
        """Identity jet ``u0 + du`` expanded at each point of ``values``."""
        values = np.asarray(values, dtype=float)
        c = np.zeros((order + 1,) + values.shape)
        c[0] = values
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def variables2(cls, x, y, order):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        cx = np.zeros((order + 1, order + 1) + x.shape)
        cy = np.zeros_like(cx)
        cx[0, 0] = x
        cy[0, 0] = y
        if order >= 1:
            cx[1, 0] = 1.0
            cy[0, 1] = 1.0
        return cls(cx, 2), cls(cy, 2)

    @classmethod
    def from_derivatives(cls, derivs):
        """Univariate jet from derivative values ``derivs[k] = f^(k)``."""
        derivs = np.asarray(derivs, dtype=float)
        fact = np.array([factorial(k) for k in range(derivs.shape[0])], float)
        return cls(derivs / fact.reshape((-1,) + (1,) * (derivs.ndim - 1)))

    @classmethod
    def stack(cls, jets, axis=-1):
        nv = jets[0].nvars
        m = min(j.order for j in jets)
        arrs = [j._trunc(m) for j in jets]
        ax = axis if axis < 0 else axis + nv
        return cls(np.stack(arrs, axis=ax), nv)

    # -- basic properties ------------------------------------------------

    @property
    def order(self):
        return self.c.shape[0] - 1

    @property
    def batch_shape(self):
        return self.c.shape[self.nvars:]

    @property
    def value(self):
        return self.c[(0,) * self.nvars]

    def derivative(self, k, l=None):
        """Value of the k-th derivative (or d^k/dx^k d^l/dy^l for two variables)."""
        if self.nvars == 1:
            return self.c[k] * factorial(k)
        return self.c[k, l] * factorial(k) * factorial(l)

    def derivatives(self):
        """All derivative values, shape (M+1, *batch); univariate only."""
        fact = np.array([factorial(k) for k in range(self.order + 1)], float)
        return self.c * fact.reshape((-1,) + (1,) * len(self.batch_shape))

    def _trunc(self, m):
        if self.nvars == 1:
            return self.c[:m + 1]
        c = self.c[:m + 1, :m + 1].copy()
        c[~_tri_mask(m + 1)] = 0.0
        return c

    def pad(self, m):
        """Extend a univariate jet to order ``m`` with zero coefficients."""
        if m <= self.order:
            return self
        extra = np.zeros((m - self.order,) + self.batch_shape)
        return Jet(np.concatenate([self.c, extra]), 1)

    def truncate(self, m):
        return Jet(self._trunc(min(m, self.order)), self.nvars)

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Jet(self.c[(slice(None),) * self.nvars + idx], self.nvars)

    def v(self):
        """Append a trailing unit axis so a scalar jet broadcasts against vectors."""
        return Jet(self.c[..., None], self.nvars)

    def copy(self):
        return Jet(self.c.copy(), self.nvars)

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            return other
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            c = self.c.copy()
            c[(0,) * self.nvars] = c[(0,) * self.nvars] + np.asarray(other, float)
            return Jet(c, self.nvars)
        m = min(self.order, o.order)
        return Jet(self._trunc(m) + o._trunc(m), self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c, self.nvars)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            other = np.asarray(other, float)
            return Jet(self.c * other, self.nvars)
        return Jet(_product(self, o), self.nvars)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return Jet(self.c / np.asarray(other, float), self.nvars)
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, alpha):
        if isinstance(alpha, int) and alpha >= 0:
            out = Jet.const(np.ones(self.batch_shape), self.order, self.nvars)
            base = self
            while alpha:
                if alpha & 1:
                    out = out * base
                alpha >>= 1
                if alpha:
                    base = base * base
            return out
        return self.power(alpha)

    # -- elementary functions via Taylor composition ---------------------

    def _compose_scalar(self, coeffs_fn):
        """f(self) given f^(k)(c0)/k! as coeffs_fn(c0, M) -> list of arrays."""
        m = self.order
        c0 = self.value
        fk = coeffs_fn(c0, m)
        delta = self.copy()
        delta.c[(0,) * self.nvars] = 0.0
        res = Jet.const(fk[m], m, self.nvars)
        for k in range(m - 1, -1, -1):
            res = res * delta + fk[k]
        return res

    def reciprocal(self):
        return self.power(-1.0)

    def power(self, alpha):
        def coeffs(c0, m):
            return [comb_real(alpha, k) * c0 ** (alpha - k) for k in range(m + 1)]
        return self._compose_scalar(coeffs)

    def sqrt(self):
        return self.power(0.5)

    def exp(self):
        def coeffs(c0, m):
            e = np.exp(c0)
            return [e / factorial(k) for k in range(m + 1)]
        return self._compose_scalar(coeffs)

    def log(self):
        def coeffs(c0, m):
            out = [np.log(c0)]
            for k in range(1, m + 1):
                out.append((-1.0) ** (k + 1) / (k * c0 ** k))
            return out
        return self._compose_scalar(coeffs)

    def sin(self):
        def coeffs(c0, m):
            s, c = np.sin(c0), np.cos(c0)
            cyc = [s, c, -s, -c]
            return [cyc[k % 4] / factorial(k) for k in range(m + 1)]
        return self._compose_scalar(coeffs)

    def cos(self):
        def coeffs(c0, m):
            s, c = np.sin(c0), np.cos(c0)
            cyc = [c, -s, -c, s]
            return [cyc[k % 4] / factorial(k) for k in range(m + 1)]
        return self._compose_scalar(coeffs)

    # -- calculus ---------------------------------------------------------

    def deriv(self, axis=0):
        m = self.order
        if m == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        k = np.arange(1, m + 1, dtype=float)
        if self.nvars == 1:
            return Jet(self.c[1:] * k.reshape((-1,) + (1,) * len(self.batch_shape)), 1)
        bs = (1,) * len(self.batch_shape)
        if axis == 0:
            c = self.c[1:, :m] * k.reshape((-1, 1) + bs)
        else:
            c = self.c[:m, 1:] * k.reshape((1, -1) + bs)
        c = c.copy()
        c[~_tri_mask(m)] = 0.0
        return Jet(c, 2)

    def integ(self):
        """Antiderivative vanishing at the expansion point (univariate)."""
        m = self.order
        c = np.zeros((m + 2,) + self.batch_shape)
        k = np.arange(1, m + 2, dtype=float).reshape((-1,) + (1,) * len(self.batch_shape))
        c[1:] = self.c / k
        return Jet(c, 1)

    def eval_at(self, du):
        """Evaluate the univariate polynomial at offset ``du`` (broadcast over batch)."""
        du = np.asarray(du, float)
        acc = np.zeros(np.broadcast_shapes(self.batch_shape, du.shape))
        for k in range(self.order, -1, -1):
            acc = acc * du + self.c[k]
        return acc

    def shift(self, du):
        """Re-expand the univariate jet at ``u0 + du`` (same order)."""
        du = np.asarray(du, float)
        m = self.order
        bshape = np.broadcast_shapes(self.batch_shape, du.shape)
        c = np.zeros((m + 1,) + bshape)
        for j in range(m + 1):
            acc = np.zeros(bshape)
            for k in range(m, j - 1, -1):
                acc = acc * du + comb(k, j) * self.c[k]
            c[j] = acc
        return Jet(c, 1)

    def compose(self, inner):
        """Univariate composition ``self(inner)``; ``inner`` has zero constant term.

        ``self`` is read as a polynomial in the offset from its expansion point.
        """
        m = min(self.order, inner.order)
        res = Jet.const(self.c[m], m)
        b = inner.c[(Ellipsis,) + (None,) * (len(self.batch_shape) - len(inner.batch_shape))] \
            if len(self.batch_shape) > len(inner.batch_shape) else inner.c
        innr = Jet(b[:m + 1].copy(), 1)
        innr.c[0] = 0.0
        for k in range(m - 1, -1, -1):
            res = res * innr + self.c[k]
        return res

    def revert(self):
        """Series reversion: ``T`` with ``self(T(v)) = v`` where self[0] == 0."""
        m = self.order
        u1 = self.c[1]
        t = Jet(np.zeros_like(self.c), 1)
        t.c[1] = 1.0 / u1
        ident = Jet(np.zeros_like(self.c), 1)
        ident.c[1] = 1.0
        d = self.deriv().pad(m)
        prec = 1
        while prec < m:
            prec = min(2 * prec + 1, m)
            resid = self.compose(t) - ident
            slope = d.compose(t).truncate(m)
            t = (t - resid / slope).truncate(m)
            t.c[0] = 0.0
        # one extra correction removes the last-order error from the slope truncation
        resid = self.compose(t) - ident
        t = t - resid / d.compose(t).truncate(m)
        t.c[0] = 0.0
        return t


def comb_real(alpha, k):
    """Generalized binomial coefficient for real ``alpha``."""
    out = 1.0
    for i in range(k):
        out *= (alpha - i) / (i + 1)
    return out


def _product(a, b):
    nv = a.nvars
    m = min(a.order, b.order)
    ca, cb = a._trunc(m), b._trunc(m)
    bshape = np.broadcast_shapes(ca.shape[nv:], cb.shape[nv:])
    lead = (m + 1,) * nv
    ca = np.broadcast_to(ca, lead + bshape).reshape(lead + (-1,))
    cb = np.broadcast_to(cb, lead + bshape).reshape(lead + (-1,))
    if nv == 1:
        out = kernels.cauchy1(ca, cb)
    else:
        out = kernels.cauchy2(ca, cb)
    return out.reshape(lead + bshape)


# -- vector helpers (ambient dimension on the last batch axis) ----------

def dot(a, b):
    p = a * b
    return Jet(p.c.sum(axis=-1), p.nvars)


def cross(a, b):
    ax, ay, az = a[..., 0], a[..., 1], a[..., 2]
    bx, by, bz = b[..., 0], b[..., 1], b[..., 2]
    return Jet.stack([ay * bz - az * by, az * bx - ax * bz, ax * by - ay * bx])


def det2(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def det3(a, b, c):
    return dot(a, cross(b, c))


def det(vectors):
    """Volume form of d vector jets of dimension d (Laplace expansion)."""
    d = len(vectors)
    if d == 2:
        return det2(*vectors)
    if d == 3:
        return det3(*vectors)
    total = None
    for i in range(d):
        minor = [Jet(np.delete(v.c, i, axis=-1), v.nvars) for v in vectors[1:]]
        term = vectors[0][..., i] * det(minor)
        if i % 2:
            term = -term
        total = term if total is None else total + term
    return total


def matvec(A, x):
    """Constant matrix (d, d) applied to a vector jet."""
    return Jet(np.einsum("ij,...j->...i", np.asarray(A, float), x.c), x.nvars)
