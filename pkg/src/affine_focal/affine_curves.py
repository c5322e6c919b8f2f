"""Equi-affine invariants of planar and spatial curves.

Planar curves are brought to affine arc-length (``[G', G''] = 1``) and
spatial ones to ``[F', F'', F'''] = 1``.  Invariants are read off with
volume forms from the reparametrized jets:

    planar:   G''' = -rho G',           rho = [G'', G''']
    spatial:  F'''' = -rho F'' + tau F', rho = -[F', F'''', F'''],
                                         tau = [F'''', F'', F''']
"""

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize_scalar

from .curves import AnalyticCurve, table_source
from .errors import DegenerateTorsion, InflectionPoint, NotClosed
from .jets import Jet, det2, det3
from .numkit import (DEFAULT_TOL, JetCurve, derive_jets, integrate_ode,
                     is_identically_zero, locate_zeros, periodic_zero_count)
from .reparam import DEFAULT_ORDER, reparametrize

DENSE = 4


# -- input handling -------------------------------------------------------

@dataclass
class _Input:
    source: object
    t0: float
    t1: float
    order: int
    exact: bool
    periodic: bool
    name: str


def _as_input(raw, dim):
    if isinstance(raw, AnalyticCurve):
        if raw.dim != dim:
            from .errors import DimensionMismatch
            raise DimensionMismatch(f"expected a curve in dimension {dim}, got {raw.dim}")
        return _Input(raw.func, raw.t0, raw.t1, DEFAULT_ORDER, True, raw.periodic, raw.name)
    if isinstance(raw, JetCurve):
        if raw.dim != dim:
            from .errors import DimensionMismatch
            raise DimensionMismatch(f"expected a curve in dimension {dim}, got {raw.dim}")
        exact = raw.source == "analytic" and raw.evaluator is not None
        return _Input(table_source(raw), float(raw.grid[0]), float(raw.grid[-1]),
                      raw.order, exact, raw.closed, raw.meta.get("name", "table"))
    raise TypeError(f"unsupported curve input {type(raw).__name__}")


def _reflect(source, axis):
    def f(t):
        p = source(t)
        sign = np.ones(p.c.shape[-1])
        sign[axis] = -1.0
        return Jet(p.c * sign, p.nvars)
    return f


def _local_minima(values):
    a = np.abs(values)
    return [i for i in range(a.size)
            if (i == 0 or a[i] <= a[i - 1]) and (i == a.size - 1 or a[i] <= a[i + 1])]


def _raise(error, msg, t):
    if error is InflectionPoint:
        raise error(msg, float(t))
    raise error(msg)


def _check_volume(inp, volume, samples, cfg, refine, error, what):
    """Sign of the volume function along the curve; raises ``error`` where it vanishes."""
    tn = np.linspace(inp.t0, inp.t1, DENSE * samples + 1)
    vol = volume(inp.source(Jet.variable(tn, 3))).value
    worst = int(np.argmin(np.abs(vol)))
    if abs(vol[worst]) < cfg.tol_zero or np.any(np.sign(vol) != np.sign(vol[0])):
        _raise(error, f"{what} vanishes near t={tn[worst]:.12g} "
                      f"(|value|={abs(vol[worst]):.3g})", tn[worst])
    if refine:
        h = tn[1] - tn[0]

        def fn(t):
            return abs(float(volume(inp.source(Jet.variable(np.array([t]), 3))).value[0]))
        for i in _local_minima(vol):
            lo, hi = max(tn[i] - h, inp.t0), min(tn[i] + h, inp.t1)
            res = minimize_scalar(fn, bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-13})
            if res.fun < cfg.tol_zero:
                _raise(error, f"{what} vanishes at t={res.x:.12g} (|value|={res.fun:.3g})", res.x)
    return float(np.sign(vol[0]))


# -- planar curves --------------------------------------------------------

@dataclass
class PlanarAffineCurve:
    """Planar curve in affine arc-length with its affine curvature."""

    jets: JetCurve
    rho: np.ndarray
    rho_prime: np.ndarray
    reflected: bool = False
    exact: bool = True
    t: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    @property
    def grid(self):
        return self.jets.grid

    @property
    def closed(self):
        return self.jets.closed

    @property
    def length(self):
        return float(self.grid[-1] - self.grid[0])

    def at(self, u, order=4):
        return self.jets.jets_at(u, order)

    def rho_at(self, u):
        d = self.at(u, 3)
        return d[2, :, 0] * d[3, :, 1] - d[2, :, 1] * d[3, :, 0]

    def rho_prime_at(self, u):
        d = self.at(u, 4)
        return d[2, :, 0] * d[4, :, 1] - d[2, :, 1] * d[4, :, 0]

    def residuals(self):
        """(max |[G',G''] - 1|, max |G''' + rho G'|) over the grid."""
        d = self.jets.jets
        vol = d[1, :, 0] * d[2, :, 1] - d[1, :, 1] * d[2, :, 0]
        ode = d[3] + self.rho[:, None] * d[1]
        return float(np.max(np.abs(vol - 1.0))), float(np.max(np.abs(ode)))


def _planar_volume(b):
    x = b if isinstance(b, Jet) else b["x"]
    d = x.deriv()
    return det2(d, d.deriv())


def reparam_affine_planar(raw, convex_check=True, cfg=DEFAULT_TOL, samples=256):
    """Reparametrize a non-inflectional planar curve by affine arc-length.

    ``raw`` is an :class:`AnalyticCurve` or a :class:`JetCurve`.  With
    ``convex_check`` the local minima of ``|[G_t, G_tt]|`` are refined
    on the analytic source as well, so flat points between samples are
    caught.  Negatively oriented curves are reflected in the x-axis; the
    result records this in ``reflected``.
    """
    inp = _as_input(raw, 2)
    sign = _check_volume(inp, _planar_volume, samples, cfg, convex_check and inp.exact,
                         InflectionPoint, "[G_t, G_tt]")
    source = inp.source if sign > 0 else _reflect(inp.source, 1)
    rep = reparametrize(lambda t: {"x": source(t)}, inp.t0, inp.t1, samples,
                        log_speed=lambda b: _planar_volume(b).log() * (1.0 / 3.0),
                        order=inp.order, kind="analytic" if inp.exact else "sampled")
    jc = rep["x"]
    d = jc.jets
    rho = d[2, :, 0] * d[3, :, 1] - d[2, :, 1] * d[3, :, 0]
    if d.shape[0] > 4 and inp.exact:
        rho_prime = d[2, :, 0] * d[4, :, 1] - d[2, :, 1] * d[4, :, 0]
    else:
        rho_prime = _table_derivative(rho, jc.grid, jc.closed)
    jc.meta["name"] = inp.name
    return PlanarAffineCurve(jc, rho, rho_prime, reflected=sign < 0, exact=inp.exact,
                             t=rep.t, meta={"name": inp.name})


def _table_derivative(values, grid, closed):
    return derive_jets(values[:, None], grid, 1, periodic=closed).jets[1, :, 0]


class Evolute(NamedTuple):
    u: np.ndarray
    points: np.ndarray   # NaN rows where omitted
    omitted: list


def affine_evolute(c: PlanarAffineCurve, cfg=DEFAULT_TOL):
    """E(u) = G(u) + G''(u) / rho(u); samples with |rho| < tol_zero are omitted."""
    d = c.jets.jets
    ok = np.abs(c.rho) >= cfg.tol_zero
    pts = np.full((c.grid.size, 2), np.nan)
    pts[ok] = d[0, ok] + d[2, ok] / c.rho[ok, None]
    omitted = [float(u) for u in c.grid[~ok]]
    return Evolute(c.grid, pts, omitted)


def evolute_cusps(c: PlanarAffineCurve, cfg=DEFAULT_TOL):
    """Cusps of the evolute, located as the zeros of rho' (one period for closed curves)."""
    zs = [z for z in _rho_prime_zeros(c, cfg) if not z.tangential]
    if c.closed and len(zs) >= 2:
        h = c.grid[1] - c.grid[0]
        if abs((zs[-1].u - zs[0].u) - c.length) < 0.5 * h:
            zs = zs[:-1]
    return zs


class Support(NamedTuple):
    z: np.ndarray
    dz: np.ndarray
    ddz: np.ndarray
    residual: float     # max |z'' - (1 - rho z)|


def support_function(c: PlanarAffineCurve, O):
    """Affine distance z(u) = [G(u) - O, G'(u)] and its identity z'' = 1 - rho z."""
    O = np.asarray(O, float)
    d = c.jets.jets
    rel = d[0] - O

    def vol(a, b):
        return a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    z = vol(rel, d[1])
    dz = vol(rel, d[2])
    ddz = vol(d[1], d[2]) + vol(rel, d[3])
    residual = float(np.max(np.abs(ddz - (1.0 - c.rho * z))))
    return Support(z, dz, ddz, residual)


class VertexReport(NamedTuple):
    count: Optional[int]     # None when rho' vanishes identically
    zeros: list
    tangential: list
    degenerate: bool
    closed: bool


def _rho_prime_zeros(c, cfg):
    func = (lambda u: float(c.rho_prime_at(u)[0])) if c.exact else None
    return locate_zeros(c.rho_prime, c.grid, cfg, func=func, periodic=c.closed)


def _closed_check(jc, cfg):
    d = jc.jets
    gap = np.max(np.abs(d[:4, 0] - d[:4, -1]))
    return gap < cfg.tol_residual, gap


def count_vertices(c: PlanarAffineCurve, closed=None, cfg=DEFAULT_TOL):
    """Number of zeros of rho' over one period (sign changes only)."""
    if closed is None:
        closed = c.closed
    elif closed:
        ok, gap = _closed_check(c.jets, cfg)
        if not ok:
            raise NotClosed(f"endpoint jets differ by {gap:.3g}")
    if is_identically_zero(c.rho_prime, cfg):
        return VertexReport(None, [], [], True, bool(closed))
    zeros = _rho_prime_zeros(c, cfg)
    simple = [z for z in zeros if not z.tangential]
    tang = [z for z in zeros if z.tangential]
    count = periodic_zero_count(simple, c.grid) if closed else len(simple)
    return VertexReport(count, simple, tang, False, bool(closed))


SUBSTEPS = 4


def reconstruct_from_curvature(rho, grid, gamma0, dgamma0, z0, dz0):
    """Integrate gamma'' = -rho gamma, z'' = -rho z + 1 on ``grid``.

    gamma plays the role of the tangent G' and z of the support function.

    ``rho`` may be a constant, a callable of u, or a table on ``grid``
    (interpolated by a cubic spline).  Returns (gamma (N, 2), z (N,)).
    """
    grid = np.asarray(grid, float)
    if callable(rho):
        rfun = rho
    elif np.ndim(rho) == 0:
        val = float(rho)

        def rfun(u):
            return val
    else:
        table = np.asarray(rho, float)
        periodic = np.isclose(table[0], table[-1], rtol=0, atol=1e-12)
        spline = CubicSpline(grid, table, bc_type="periodic" if periodic else "not-a-knot")

        def rfun(u):
            return float(spline(u))

    def rhs(u, y):
        r = rfun(u)
        return np.array([y[2], y[3], -r * y[0], -r * y[1], y[5], 1.0 - r * y[4]])

    y0 = np.concatenate([np.asarray(gamma0, float), np.asarray(dgamma0, float), [z0, dz0]])
    # RK4 on a 4x refined grid, reported on the input grid
    fine = np.concatenate([np.linspace(a, b, SUBSTEPS + 1)[:-1] for a, b in zip(grid[:-1], grid[1:])]
                          + [grid[-1:]])
    y = integrate_ode(rhs, y0, fine)[::SUBSTEPS]
    return y[:, :2], y[:, 4]


def area_function(c: PlanarAffineCurve, O, u0=None):
    """Z(u) = integral of the support function from u0; Z(u0) = 0.

    Cell integrals use the Taylor jet of z at both cell ends, so the
    quadrature error is far below the jet truncation order.
    """
    O = np.asarray(O, float)
    grid = c.grid
    zj = _support_jet(c.jets.jets, O)
    h = np.diff(grid)
    left = zj[:-1].integ().eval_at(h)
    right = -zj[1:].integ().eval_at(-h)
    cells = 0.5 * (left + right)
    Z = np.concatenate([[0.0], np.cumsum(cells)])
    if u0 is not None and u0 != grid[0]:
        Z = Z - _area_at(c, O, grid, Z, np.array([u0]))[0]
    return Z


def _support_jet(d, O):
    g = Jet.from_derivatives(d)
    return det2(g - O, g.deriv())


def _area_at(c, O, grid, Z, u):
    idx = np.clip(np.searchsorted(grid, u) - 1, 0, grid.size - 2)
    idx = np.where(np.abs(u - grid[idx]) <= np.abs(grid[idx + 1] - u), idx, idx + 1)
    zj = _support_jet(c.jets.jets[:, idx], O)
    return Z[idx] + zj.integ().eval_at(u - grid[idx])


def lift_with_area(c: PlanarAffineCurve, O, u0=None):
    """Spatial curve F = (G, Z) with Z the area function; returned as a JetCurve.

    F is already in affine arc-length: [F', F'', F'''] = z'' + rho z = 1.
    """
    O = np.asarray(O, float)
    Z = area_function(c, O, u0)
    grid = c.grid

    def jets_for(d, Zvals):
        zj = _support_jet(d, O)
        m = min(d.shape[0], zj.order + 2)
        zd = zj.derivatives()
        out = np.zeros((m, d.shape[1], 3))
        out[:, :, :2] = d[:m]
        out[0, :, 2] = Zvals
        out[1:m, :, 2] = zd[:m - 1]
        return out

    def ev(u, order):
        u = np.atleast_1d(np.asarray(u, float))
        d = c.at(u, c.jets.order)
        return jets_for(d, _area_at(c, O, grid, Z, u))[:order + 1]

    jets = jets_for(c.jets.jets, Z)
    return JetCurve(grid, jets, source="analytic" if c.exact else "sampled",
                    evaluator=ev, closed=False, meta={"name": "area_lift"})


# -- spatial curves -------------------------------------------------------

@dataclass
class SpatialAffineCurve:
    jets: JetCurve
    rho: np.ndarray
    tau: np.ndarray
    rho_prime: np.ndarray
    reflected: bool = False
    exact: bool = True
    t: Optional[np.ndarray] = None

    @property
    def grid(self):
        return self.jets.grid

    def residuals(self):
        """(max |[F',F'',F'''] - 1|, max |F'''' + rho F'' - tau F'|)."""
        d = self.jets.jets
        vol = np.einsum("ij,ij->i", d[1], np.cross(d[2], d[3]))
        ode = d[4] + self.rho[:, None] * d[2] - self.tau[:, None] * d[1]
        return float(np.max(np.abs(vol - 1.0))), float(np.max(np.abs(ode)))


def _spatial_volume(b):
    x = b if isinstance(b, Jet) else b["x"]
    d1 = x.deriv()
    d2 = d1.deriv()
    return det3(d1, d2, d2.deriv())


def spatial_invariants(raw, cfg=DEFAULT_TOL, samples=256):
    """Affine arc-length reparametrization and (rho, tau) of a space curve."""
    inp = _as_input(raw, 3)
    sign = _check_volume(inp, _spatial_volume, samples, cfg, inp.exact,
                         DegenerateTorsion, "[F_t, F_tt, F_ttt]")
    source = inp.source if sign > 0 else _reflect(inp.source, 2)
    rep = reparametrize(lambda t: {"x": source(t)}, inp.t0, inp.t1, samples,
                        log_speed=lambda b: _spatial_volume(b).log() * (1.0 / 6.0),
                        order=inp.order, kind="analytic" if inp.exact else "sampled")
    jc = rep["x"]
    d = jc.jets
    if d.shape[0] < 5:
        from .errors import InsufficientJets
        raise InsufficientJets("spatial invariants need fourth derivatives")
    g = Jet.from_derivatives(d)
    g1 = g.deriv()
    g2 = g1.deriv()
    g3 = g2.deriv()
    g4 = g3.deriv()
    rho_j = -det3(g1, g4, g3)
    tau_j = det3(g4, g2, g3)
    rho = rho_j.value
    tau = tau_j.value
    if rho_j.order >= 1 and inp.exact:
        rho_prime = rho_j.derivative(1)
    else:
        rho_prime = _table_derivative(rho, jc.grid, jc.closed)
    return SpatialAffineCurve(jc, rho, tau, rho_prime, reflected=sign < 0,
                              exact=inp.exact, t=rep.t)


class Cylindricity(NamedTuple):
    cylindrical: bool
    residual: np.ndarray   # rho' + tau per sample


def cylindricity_test(c: SpatialAffineCurve, cfg=DEFAULT_TOL):
    res = c.rho_prime + c.tau
    return Cylindricity(bool(np.max(np.abs(res)) < cfg.tol_residual), res)


class ProjectiveDensity(NamedTuple):
    density: np.ndarray
    zeros: list
    identically_zero: bool


def projective_density(c: SpatialAffineCurve, cfg=DEFAULT_TOL):
    """Signed cube root of rho' + 2 tau and its zero set."""
    base = c.rho_prime + 2.0 * c.tau
    dens = np.cbrt(base)
    if is_identically_zero(base, cfg):
        return ProjectiveDensity(dens, [], True)
    return ProjectiveDensity(dens, locate_zeros(base, c.grid, cfg), False)
