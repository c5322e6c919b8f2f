"""Numeric kernel: volume forms, derivative jets, ODE integration, zero finding."""

import csv
from dataclasses import dataclass, field
from math import factorial
from typing import Callable, NamedTuple, Optional

import numpy as np

from . import kernels
from .errors import (DimensionMismatch, DivergentODE, GridTooCoarse,
                     NonUniformGrid, SpecError)
from .jets import Jet

DIVERGENCE_BOUND = 1e12


@dataclass(frozen=True)
class ToleranceConfig:
    tol_det: float = 1e-8
    tol_zero: float = 1e-6
    tol_residual: float = 1e-6
    refine_depth: int = 60

    def __post_init__(self):
        for name in ("tol_det", "tol_zero", "tol_residual"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.refine_depth < 20:
            raise ValueError("refine_depth must be >= 20")


DEFAULT_TOL = ToleranceConfig()


@dataclass(frozen=True, eq=False)
class JetCurve:
    """Parametrized curve with derivative jets on a strictly increasing grid.

    ``jets[k, i]`` is the k-th derivative of the position at ``grid[i]``.
    ``evaluator(u, order)`` returns jets at arbitrary parameters when the
    curve comes from an analytic source; sampled curves fall back to
    Taylor re-expansion from the nearest grid node.
    """

    grid: np.ndarray
    jets: np.ndarray
    source: str = "sampled"
    evaluator: Optional[Callable] = None
    low_confidence: Optional[np.ndarray] = None
    closed: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        jets = np.asarray(self.jets, dtype=float)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "jets", jets)
        if grid.ndim != 1 or grid.size < 16:
            raise GridTooCoarse(f"need at least 16 grid samples, got {grid.size}")
        if np.any(np.diff(grid) <= 0):
            raise NonUniformGrid("grid must be strictly increasing")
        if jets.ndim != 3 or jets.shape[1] != grid.size:
            raise DimensionMismatch("jets must have shape (order+1, len(grid), d)")
        if self.low_confidence is None:
            object.__setattr__(self, "low_confidence", np.zeros(grid.size, bool))

    @property
    def order(self):
        return self.jets.shape[0] - 1

    @property
    def dim(self):
        return self.jets.shape[2]

    @property
    def position(self):
        return self.jets[0]

    @property
    def step(self):
        return float(self.grid[1] - self.grid[0])

    def jet(self, order=None):
        """Taylor jet at every grid node."""
        d = self.jets if order is None else self.jets[:order + 1]
        return Jet.from_derivatives(d)

    def jets_at(self, u, order=None):
        """Derivative values (order+1, len(u), d) at arbitrary parameters."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        order = self.order if order is None else order
        if self.evaluator is not None:
            return np.asarray(self.evaluator(u, order))[:order + 1]
        if order > self.order:
            raise ValueError("sampled curve cannot supply more derivatives than stored")
        idx = np.clip(np.searchsorted(self.grid, u), 1, self.grid.size - 1)
        left = self.grid[idx - 1]
        right = self.grid[idx]
        idx = np.where(np.abs(u - left) <= np.abs(right - u), idx - 1, idx)
        du = u - self.grid[idx]
        jet = Jet.from_derivatives(self.jets[:, idx])
        return jet.shift(du[:, None]).derivatives()[:order + 1]


class Zero(NamedTuple):
    u: float
    tangential: bool


# -- volume form --------------------------------------------------------

def volume_form(vectors):
    """Determinant of the matrix whose columns are the given d vectors of dimension d."""
    mat = np.asarray(vectors, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionMismatch(
            f"volume form needs d vectors of dimension d, got shape {mat.shape}")
    return float(np.linalg.det(mat.T))


def batched_volume(*columns):
    """Samplewise volume form; each argument is an (N, d) table of column vectors."""
    mat = np.stack(columns, axis=-1)
    if mat.shape[-1] != mat.shape[-2]:
        raise DimensionMismatch("need d columns of dimension d")
    return np.linalg.det(mat)


# -- finite differences --------------------------------------------------

def fd_weights(z, x, m):
    """Fornberg weights for derivatives 0..m at ``z`` on nodes ``x``; shape (len(x), m+1)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    c = np.zeros((n, m + 1))
    c1 = 1.0
    c4 = x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c


def richardson_stencil(k):
    """Integer offsets and weights (for unit spacing) of the k-th derivative.

    A second-order central difference at spacing h and 2h combined by one
    Richardson step, which cancels the h^2 error term.
    """
    p = (k + 1) // 2
    base_off = np.arange(-p, p + 1)
    w_h = fd_weights(0.0, base_off, k)[:, k]
    w_2h = w_h / 2.0 ** k
    off = np.arange(-2 * p, 2 * p + 1)
    w = np.zeros(off.size)
    w[base_off + 2 * p] += 4.0 * w_h / 3.0
    w[2 * base_off + 2 * p] -= w_2h / 3.0
    return off, w


def derive_jets(samples, grid, order, periodic=False):
    """Jets of order ``order`` from a position table on a uniform grid.

    Interior rows use Richardson-extrapolated central differences; rows
    within the stencil reach of a boundary use one-sided stencils and are
    flagged in ``low_confidence``.  With ``periodic=True`` the last sample
    must repeat the first and stencils wrap instead.
    """
    samples = np.asarray(samples, dtype=float)
    grid = np.asarray(grid, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    if not 1 <= order <= 4:
        raise ValueError("order must be in 1..4")
    n = samples.shape[0]
    if grid.shape != (n,):
        raise DimensionMismatch("grid and samples disagree in length")
    if n < 2 * order + 9:
        raise GridTooCoarse(f"need at least {2 * order + 9} samples, got {n}")
    steps = np.diff(grid)
    h = steps.mean()
    if np.max(np.abs(steps - h)) > 1e-12 * max(abs(h), np.max(np.abs(grid))):
        raise NonUniformGrid("finite-difference jets require a uniform grid")

    jets = np.empty((order + 1, n, samples.shape[1]))
    jets[0] = samples
    low = np.zeros(n, bool)
    if periodic:
        base = samples[:-1]
        for k in range(1, order + 1):
            off, w = richardson_stencil(k)
            d = kernels.stencil_apply(base, off, w, periodic=True) / h ** k
            jets[k, :-1] = d
            jets[k, -1] = d[0]
    else:
        width = order + 5
        for k in range(1, order + 1):
            off, w = richardson_stencil(k)
            d = kernels.stencil_apply(samples, off, w, periodic=False) / h ** k
            bad = np.isnan(d[:, 0])
            low |= bad
            for i in np.nonzero(bad)[0]:
                lo = 0 if i < n // 2 else n - width
                nodes = np.arange(lo, lo + width)
                wts = fd_weights(float(i), nodes.astype(float), k)[:, k]
                d[i] = wts @ samples[nodes] / h ** k
            jets[k] = d
    return JetCurve(grid, jets, source="sampled", low_confidence=low, closed=periodic)


# -- ODE integration -----------------------------------------------------

def integrate_ode(rhs, y0, grid):
    """Classical RK4 for a vector ODE y' = rhs(u, y) on the given grid."""
    grid = np.asarray(grid, dtype=float)
    y = np.array(y0, dtype=float, ndmin=1)
    out = np.empty((grid.size,) + y.shape)
    out[0] = y
    for i in range(grid.size - 1):
        u, h = grid[i], grid[i + 1] - grid[i]
        k1 = np.asarray(rhs(u, y), float)
        k2 = np.asarray(rhs(u + h / 2, y + h / 2 * k1), float)
        k3 = np.asarray(rhs(u + h / 2, y + h / 2 * k2), float)
        k4 = np.asarray(rhs(u + h, y + h * k3), float)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > DIVERGENCE_BOUND:
            raise DivergentODE(f"solution exceeded {DIVERGENCE_BOUND:g} at u={grid[i + 1]:.6g}")
        out[i + 1] = y
    return out


def integrate_scalar_ode(rhs, y0, grid):
    """Classical RK4 for a scalar ODE y' = rhs(u, y); returns the table of y."""
    return integrate_ode(lambda u, y: np.atleast_1d(rhs(u, y[0])), [y0], grid)[:, 0]


def integrate_tabulated(f_nodes, f_mid, h, y0=0.0):
    """RK4 for y' = f(u) when f is known at the nodes and midpoints of a uniform grid."""
    y = kernels.rk4_tabulated(f_nodes, f_mid, h, y0)
    if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > DIVERGENCE_BOUND:
        raise DivergentODE("tabulated integral diverged")
    return y


# -- zero localization ---------------------------------------------------

def _local_cubic(grid, values, i):
    lo = min(max(i - 1, 0), max(grid.size - 4, 0))
    idx = np.arange(lo, min(lo + 4, grid.size))
    xs, ys = grid[idx], values[idx]

    def p(x):
        total = 0.0
        for a in range(xs.size):
            term = ys[a]
            for b in range(xs.size):
                if a != b:
                    term *= (x - xs[b]) / (xs[a] - xs[b])
            total += term
        return total
    return p


def _bisect(fn, a, b, fa, depth):
    for _ in range(depth):
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        fm = fn(m)
        if fm == 0.0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def locate_zeros(values, grid, cfg=DEFAULT_TOL, func=None, periodic=False):
    """Zeros of a sampled scalar function.

    One root per sign change, refined by bisection on a local cubic
    interpolant (or on ``func`` when an exact callable is supplied).
    Near-zero samples without a sign change are reported as possible
    tangential zeros.  With ``periodic`` the first and last samples are
    the same point and exact zeros there see the wrapped neighbours.
    """
    values = np.asarray(values, dtype=float)
    grid = np.asarray(grid, dtype=float)
    if values.size < 3:
        raise ValueError("need at least 3 samples")
    zeros = []
    used = np.zeros(values.size, bool)
    for i in range(values.size - 1):
        a, b = values[i], values[i + 1]
        if a * b < 0:
            fn = func if func is not None else _local_cubic(grid, values, i)
            u = _bisect(fn, grid[i], grid[i + 1], fn(grid[i]), cfg.refine_depth)
            zeros.append(Zero(float(u), False))
            used[i] = used[i + 1] = True
    for i in range(values.size):
        if values[i] != 0.0:
            continue
        left = values[i - 1] if i > 0 else (values[-2] if periodic else None)
        right = values[i + 1] if i + 1 < values.size else (values[1] if periodic else None)
        if left is not None and right is not None and left * right < 0:
            zeros.append(Zero(float(grid[i]), False))
            used[i] = True
    absv = np.abs(values)
    for i in range(values.size):
        if used[i] or absv[i] >= cfg.tol_zero:
            continue
        lo, hi = max(i - 1, 0), min(i + 1, values.size - 1)
        if absv[i] <= absv[lo] and absv[i] <= absv[hi]:
            # plateaus of equal values report their first sample only
            if i > 0 and absv[i - 1] == absv[i] and not used[i - 1]:
                continue
            zeros.append(Zero(float(grid[i]), True))
    zeros.sort(key=lambda z: z.u)
    return zeros


def is_identically_zero(values, cfg=DEFAULT_TOL):
    return bool(np.max(np.abs(values)) < cfg.tol_zero)


def periodic_zero_count(zeros, grid):
    """Count sign-change zeros over one period of a closed table (endpoint duplicate removed)."""
    period = grid[-1] - grid[0]
    h = grid[1] - grid[0]
    us = sorted(z.u for z in zeros if not z.tangential)
    if len(us) >= 2 and abs((us[-1] - us[0]) - period) < 0.5 * h:
        us = us[:-1]
    return len(us)


# -- CSV ingestion --------------------------------------------------------

def read_curve_csv(path):
    """Read ``u,x0,x1[,x2[,x3]]`` rows; returns (grid, samples)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SpecError(f"{path}: empty CSV") from None
        expected = ["u"] + [f"x{i}" for i in range(len(header) - 1)]
        if header != expected or not 3 <= len(header) <= 5:
            raise SpecError(f"{path}: header must be u,x0,x1[,x2[,x3]], got {','.join(header)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                raise SpecError(f"{path}:{lineno}: non-numeric value") from None
            if len(rows[-1]) != len(header):
                raise SpecError(f"{path}:{lineno}: expected {len(header)} columns")
    data = np.array(rows, dtype=float)
    return data[:, 0], data[:, 1:]


def factorials(m):
    return np.array([factorial(k) for k in range(m + 1)], float)
