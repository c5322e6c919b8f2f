"""Darboux frame of a curve on a surface in 3-space and its focal sheet.

Pipeline: the curve is reparametrized so that phi''' is tangent to the
surface; the Darboux field xi (tangent to the surface, derivative along
the curve parallel to T) fixes sigma, rho, tau through

    xi' = -sigma T,   phi''' = -rho T + tau xi,   [T, phi'', xi] = 1,

and a choice of lambda(u0) completes the frame with lambda' = -tau,
eta = phi'' + lambda xi, mu = rho + lambda sigma.  The focal sheet is the
ruled surface of lines {phi + a xi + b eta : a sigma + b mu = 1}.

All frame quantities are kept as Taylor jets in u at every sample, so
the singularity classifier reads sigma', sigma'', sigma''' exactly.
"""

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import (ContainmentError, DegeneratePoint, EmptyLocus,
                     GaugeError, InsufficientJets)
from .jets import Jet, cross, det3, dot
from .numkit import (DEFAULT_TOL, integrate_tabulated, is_identically_zero,
                     locate_zeros, periodic_zero_count)
from .reparam import reparametrize
from .surfaces import CurveOnSurface

SMOOTH = "Smooth"
CUSPIDAL_EDGE = "CuspidalEdge"
SWALLOWTAIL = "Swallowtail"
DEGENERATE = "Degenerate"
LABELS = (SMOOTH, CUSPIDAL_EDGE, SWALLOWTAIL, DEGENERATE)

DENSE = 4


# -- non-degeneracy and gauge ---------------------------------------------

class NondegeneracyReport(NamedTuple):
    min_value: float     # min |phi'' . n_hat| over the dense grid
    t_at_min: float
    containment: float


def check_nondegenerate(c: CurveOnSurface, cfg=DEFAULT_TOL, samples=256):
    """Osculating plane transversal to the tangent plane: min |phi_tt . n_hat| > tol_zero."""
    containment = c.containment_residual(DENSE * samples)
    if containment >= cfg.tol_residual:
        raise ContainmentError(f"curve is not on the surface (residual {containment:.3g})")
    tn = np.linspace(c.t0, c.t1, DENSE * samples + 1)
    b = c.source(Jet.variable(tn, 2))
    d2 = b["x"].derivatives()[2]
    n = b["n"].value
    nn = np.linalg.norm(n, axis=-1)
    if np.any(nn == 0):
        raise DegeneratePoint("surface normal vanishes", float(tn[np.argmin(nn)]))
    val = np.abs(np.einsum("ij,ij->i", d2, n)) / nn
    i = int(np.argmin(val))
    if val[i] < cfg.tol_zero:
        raise DegeneratePoint(f"osculating plane is tangent to the surface at t={tn[i]:.12g}",
                              float(tn[i]))
    return NondegeneracyReport(float(val[i]), float(tn[i]), containment)


def gauge_rate(bundle):
    """d/dt log(du/dt) making phi_uuu tangent: (phi_ttt . n) / (3 phi_tt . n)."""
    x, n = bundle["x"], bundle["n"]
    d2 = x.deriv().deriv()
    return dot(d2.deriv(), n) / (dot(d2, n) * 3.0)


def reparam_darboux(c: CurveOnSurface, cfg=DEFAULT_TOL, samples=256, gauge=1.0, order=12):
    """Reparametrize so that phi''' is tangent to the surface; t'(u0) = gauge."""
    if not gauge > 0:
        raise GaugeError("gauge must be positive")
    check_nondegenerate(c, cfg, samples)
    return reparametrize(c.source, c.t0, c.t1, samples, log_rate=gauge_rate,
                         log_speed0=-np.log(gauge), order=order,
                         closed=None if c.periodic else False)


# -- frame ------------------------------------------------------------------

def _frame_jets(dx, dn):
    """Frame jets from derivative arrays of position and normal in the gauge parameter."""
    P = Jet.from_derivatives(dx)
    N = Jet.from_derivatives(dn)
    T = P.deriv()
    P2 = T.deriv()
    P3 = P2.deriv()
    w = cross(N, T)
    vol = det3(T, P2, w)
    xi0 = w / vol.v()
    corr = -dot(xi0.deriv(), N) / dot(P2, N)
    xi = xi0 + T * corr.v()
    dxi = xi.deriv()
    return {"P": P, "N": N, "T": T, "P2": P2, "P3": P3, "w_vol": vol, "xi": xi, "dxi": dxi,
            "sigma": -det3(dxi, P2, xi), "tau": det3(T, P2, P3), "rho": -det3(P3, P2, xi)}


def _complete_jets(j, lam_values):
    lam = (-j["tau"]).integ() + lam_values
    j = dict(j)
    j["lambda"] = lam
    j["eta"] = j["P2"] + j["xi"] * lam.v()
    j["mu"] = j["rho"] + lam * j["sigma"]
    return j


@dataclass
class DarbouxFrame:
    grid: np.ndarray
    jets: dict                  # Taylor jets in u at every sample
    evaluate: Callable = field(repr=False)   # u -> derivative arrays of x and n
    gauge: float = 1.0
    lambda0: Optional[float] = None
    closed: bool = False
    t: Optional[np.ndarray] = None

    def table(self, key):
        return self.jets[key].value

    @property
    def phi(self):
        return self.table("P")

    @property
    def T(self):
        return self.table("T")

    @property
    def phi2(self):
        return self.table("P2")

    @property
    def xi(self):
        return self.table("xi")

    @property
    def eta(self):
        return self.table("eta")

    @property
    def normal(self):
        return self.table("N")

    @property
    def sigma(self):
        return self.table("sigma")

    @property
    def rho(self):
        return self.table("rho")

    @property
    def tau(self):
        return self.table("tau")

    @property
    def lam(self):
        return self.table("lambda")

    @property
    def mu(self):
        return self.table("mu")

    @property
    def complete(self):
        return "mu" in self.jets

    def at(self, u):
        """Frame jets at arbitrary parameters (lambda carried over from the nearest sample)."""
        u = np.atleast_1d(np.asarray(u, float))
        d = self.evaluate(u)
        j = _frame_jets(d["x"], d["n"])
        if self.complete:
            idx = np.clip(np.round((u - self.grid[0]) / (self.grid[1] - self.grid[0])).astype(int),
                          0, self.grid.size - 1)
            lam = self.jets["lambda"][idx].eval_at(u - self.grid[idx])
            j = _complete_jets(j, lam)
        return j

    def residuals(self):
        """Sup-norm residuals of the normalizations and structure equations."""
        j = self.jets
        T, P2, xi = j["T"].value, j["P2"].value, j["xi"].value
        out = {
            "T_phi2_xi": _sup(_vol(T, P2, xi) - 1.0),
            "xi_dot_n": _sup(np.einsum("ij,ij->i", xi, j["N"].value)
                             / np.linalg.norm(j["N"].value, axis=-1)),
            "xi_prime": _sup(j["dxi"].value + self.sigma[:, None] * T),
            "phi3_decomposition": _sup(j["P3"].value + self.rho[:, None] * T
                                       - self.tau[:, None] * xi),
        }
        if self.complete:
            eta, lam, mu = self.eta, self.lam, self.mu
            out["T_eta_xi"] = _sup(_vol(T, eta, xi) - 1.0)
            out["eta_prime"] = _sup(j["eta"].deriv().value + mu[:, None] * T)
            out["T_prime"] = _sup(j["T"].deriv().value - eta + lam[:, None] * xi)
        return out


def _vol(a, b, c):
    return np.einsum("ij,ij->i", a, np.cross(b, c))


def _sup(x):
    return float(np.max(np.abs(x)))


def darboux_field(rep, cfg=DEFAULT_TOL, gauge=1.0, closed=None):
    """Darboux field and (sigma, rho, tau) from a gauge reparametrization."""
    xc, nc = rep["x"], rep["n"]
    dx, dn = xc.jets, nc.jets
    phi3n = np.einsum("ij,ij->i", dx[3], dn[0]) / np.linalg.norm(dn[0], axis=-1)
    if np.max(np.abs(phi3n)) >= cfg.tol_residual:
        raise GaugeError(f"phi''' not tangent to the surface (residual {np.max(np.abs(phi3n)):.3g})")
    j = _frame_jets(dx, dn)
    bad = np.abs(j["w_vol"].value) < cfg.tol_det
    if np.any(bad):
        u = float(rep.grid[np.argmax(bad)])
        raise DegeneratePoint(f"[T, phi'', n x T] vanishes at u={u:.12g}", u)

    def evaluate(u):
        d = rep.evaluate(u)
        return {"x": d["x"], "n": d["n"]}
    is_closed = xc.closed if closed is None else closed
    return DarbouxFrame(rep.grid, j, evaluate, gauge, None, is_closed, rep.t)


def complete_frame(f: DarbouxFrame, lambda0=0.0):
    """Integrate lambda' = -tau from lambda(u0) = lambda0 and add eta, mu."""
    h = f.grid[1] - f.grid[0]
    tau = f.jets["tau"]
    lam = integrate_tabulated(-tau.value, -tau[:-1].eval_at(h / 2), h, lambda0)
    jets = _complete_jets({k: v for k, v in f.jets.items()
                           if k not in ("lambda", "eta", "mu")}, lam)
    return DarbouxFrame(f.grid, jets, f.evaluate, f.gauge, float(lambda0), f.closed, f.t)


def darboux_frame(c: CurveOnSurface, cfg=DEFAULT_TOL, samples=256, gauge=1.0, lambda0=0.0):
    """Full pipeline: gauge reparametrization, Darboux field, completed frame."""
    rep = reparam_darboux(c, cfg, samples, gauge)
    return complete_frame(darboux_field(rep, cfg, gauge), lambda0)


# -- constancy tests --------------------------------------------------------

class ConstantPoint(NamedTuple):
    point: Optional[np.ndarray]
    spread: float          # max |value - mean| of the scalar invariant
    point_spread: float    # max distance of per-sample points from the mean point


def _constant_point(values, base, direction, cfg):
    mean = float(np.mean(values))
    spread = float(np.max(np.abs(values - mean)))
    if spread >= cfg.tol_residual or abs(mean) < cfg.tol_zero:
        return ConstantPoint(None, spread, float("nan"))
    pts = base + direction / mean
    centre = pts.mean(axis=0)
    return ConstantPoint(centre, spread, float(np.max(np.linalg.norm(pts - centre, axis=-1))))


def visual_contour_test(f: DarbouxFrame, cfg=DEFAULT_TOL):
    """O = phi + xi / sigma when sigma is constant (tangent planes through O)."""
    return _constant_point(f.sigma, f.phi, f.xi, cfg)


def constant_Q_test(f: DarbouxFrame, cfg=DEFAULT_TOL):
    """Q = phi + eta / mu when mu is constant."""
    return _constant_point(f.mu, f.phi, f.eta, cfg)


class FlatteningReport(NamedTuple):
    count: Optional[int]
    zeros: list
    identically_zero: bool


def flattening_points(f: DarbouxFrame, cfg=DEFAULT_TOL):
    """Zeros of tau; count is per period for closed curves, None if tau vanishes identically."""
    tau = f.tau
    if is_identically_zero(tau, cfg):
        return FlatteningReport(None, [], True)
    zeros = locate_zeros(tau, f.grid, cfg, func=lambda u: float(f.at(u)["tau"].value[0]),
                         periodic=f.closed)
    simple = [z for z in zeros if not z.tangential]
    count = periodic_zero_count(simple, f.grid) if f.closed else len(simple)
    return FlatteningReport(count, zeros, False)


# -- singularity classification --------------------------------------------

def _label(c1, c2, c3, tol):
    if abs(c1) > tol:
        return SMOOTH
    if abs(c2) > tol:
        return CUSPIDAL_EDGE
    if abs(c3) > tol:
        return SWALLOWTAIL
    return DEGENERATE


def _combos(jets, a, b, idx=slice(None)):
    s = jets["sigma"][idx].derivatives()
    m = jets["mu"][idx].derivatives()
    if s.shape[0] < 4 or m.shape[0] < 4:
        raise InsufficientJets("classification needs third derivatives of sigma and mu")
    return [a * s[k] + b * m[k] for k in range(4)]


def classify_singularity(f: DarbouxFrame, u, ab, cfg=DEFAULT_TOL, jets=None):
    """Label of the focal sheet at phi(u) + a xi + b eta from the (sigma, mu) jets."""
    a, b = ab
    j = f.at(u) if jets is None else jets
    c0, c1, c2, c3 = (float(np.asarray(v).ravel()[0]) for v in _combos(j, a, b))
    if abs(c0 - 1.0) >= cfg.tol_residual:
        raise ValueError(f"(a, b) is not on the line l(u): a sigma + b mu - 1 = {c0 - 1.0:.3g}")
    return _label(c1, c2, c3, cfg.tol_zero)


def distance_jet(f: DarbouxFrame, u, x, jets=None):
    """Taylor jet in u of the affine distance F(x, u) = [x - phi(u), eta(u), xi(u)]."""
    j = f.at(u) if jets is None else jets
    return det3(j["P"] * -1.0 + np.asarray(x, float), j["eta"], j["xi"])


def classify_by_distance(f: DarbouxFrame, u, x, cfg=DEFAULT_TOL, jets=None):
    """Oracle label from F_u, F_uu, F_uuu, F_uuuu of the affine distance at fixed x."""
    d = distance_jet(f, u, x, jets).derivatives()[:, 0]
    if d.shape[0] < 5:
        raise InsufficientJets("oracle needs the fourth u-derivative of F")
    if abs(d[1]) >= cfg.tol_residual:
        raise ValueError("x is not a critical point of F(x, .) at u")
    return _label(d[2], d[3], d[4], cfg.tol_zero)


def sheet_point(f: DarbouxFrame, u, ab, jets=None):
    j = f.at(u) if jets is None else jets
    a, b = ab
    return (j["P"].value + a * j["xi"].value + b * j["eta"].value)[0]


def edge_coefficients(jets, idx=slice(None)):
    """(a, b) of the cuspidal edge: a sigma + b mu = 1, a sigma' + b mu' = 0."""
    s = jets["sigma"][idx].derivatives()
    m = jets["mu"][idx].derivatives()
    det = s[0] * m[1] - m[0] * s[1]
    with np.errstate(divide="ignore", invalid="ignore"):
        return m[1] / det, -s[1] / det, det


# -- focal sheet ------------------------------------------------------------

@dataclass
class FocalSheet:
    u: np.ndarray
    O_pts: np.ndarray        # NaN where |sigma| < tol_zero
    Q_pts: np.ndarray        # NaN where |mu| < tol_zero
    foot: np.ndarray         # point of l(u) closest to phi(u)
    direction: np.ndarray    # unit direction of l(u)
    s: np.ndarray
    points: np.ndarray       # (len(u), len(s), 3)
    a: np.ndarray
    b: np.ndarray
    labels: np.ndarray
    edge_points: np.ndarray  # cuspidal edge per u (NaN where undefined)
    edge_ab: np.ndarray
    edge_labels: list
    swallowtails: list       # (u*, point) of refined swallowtail points
    degenerate: bool         # all lines coincide


def _line_data(phi, xi, eta, sigma, mu):
    nrm = sigma ** 2 + mu ** 2
    A0, B0 = sigma / nrm, mu / nrm
    V = A0[:, None] * xi + B0[:, None] * eta
    D = mu[:, None] * xi - sigma[:, None] * eta
    dd = np.einsum("ij,ij->i", D, D)
    s_star = -np.einsum("ij,ij->i", V, D) / dd
    dlen = np.sqrt(dd)
    foot = phi + V + s_star[:, None] * D
    return foot, D / dlen[:, None], A0 + s_star * mu, B0 - s_star * sigma, dlen


def focal_sheet(f: DarbouxFrame, s_range=(-1.0, 1.0), n_s=33, cfg=DEFAULT_TOL,
                classify=True, find_swallowtails=True):
    """Sample the ruled focal surface; lines are parametrized by Euclidean length."""
    if not f.complete:
        raise ValueError("frame needs lambda; call complete_frame first")
    sigma, mu = f.sigma, f.mu
    empty = (np.abs(sigma) < cfg.tol_zero) & (np.abs(mu) < cfg.tol_zero)
    if np.any(empty):
        raise EmptyLocus(f"sigma = mu = 0 at u={f.grid[np.argmax(empty)]:.12g}")
    phi, xi, eta = f.phi, f.xi, f.eta
    with np.errstate(divide="ignore", invalid="ignore"):
        O_pts = np.where(np.abs(sigma)[:, None] >= cfg.tol_zero, phi + xi / sigma[:, None], np.nan)
        Q_pts = np.where(np.abs(mu)[:, None] >= cfg.tol_zero, phi + eta / mu[:, None], np.nan)
    foot, dirn, a_f, b_f, dlen = _line_data(phi, xi, eta, sigma, mu)
    s = np.linspace(s_range[0], s_range[1], n_s)
    points = foot[:, None, :] + s[None, :, None] * dirn[:, None, :]
    a = a_f[:, None] + (s[None, :] / dlen[:, None]) * mu[:, None]
    b = b_f[:, None] - (s[None, :] / dlen[:, None]) * sigma[:, None]

    labels = np.full(a.shape, SMOOTH, dtype=object)
    if classify:
        s_d = f.jets["sigma"].derivatives()
        m_d = f.jets["mu"].derivatives()
        if s_d.shape[0] < 4 or m_d.shape[0] < 4:
            raise InsufficientJets("classification needs third derivatives of sigma and mu")
        for k in range(a.shape[1]):
            c = [a[:, k] * s_d[r] + b[:, k] * m_d[r] for r in (1, 2, 3)]
            labels[:, k] = [_label(c[0][i], c[1][i], c[2][i], cfg.tol_zero)
                            for i in range(a.shape[0])]

    ea, eb, det = edge_coefficients(f.jets)
    ok = np.abs(det) >= cfg.tol_zero
    edge_ab = np.where(ok[:, None], np.stack([ea, eb], axis=-1), np.nan)
    edge_points = np.where(ok[:, None], phi + edge_ab[:, :1] * xi + edge_ab[:, 1:] * eta, np.nan)
    s_d = f.jets["sigma"].derivatives()
    m_d = f.jets["mu"].derivatives()
    with np.errstate(invalid="ignore"):
        d2 = np.where(ok, ea * s_d[2] + eb * m_d[2], np.nan)
        d3 = np.where(ok, ea * s_d[3] + eb * m_d[3], np.nan)
    edge_labels = [DEGENERATE if not ok[i] else _label(0.0, d2[i], d3[i], cfg.tol_zero)
                   for i in range(f.grid.size)]
    # zeros of a sigma'' + b mu'' along the edge, located on the pole-free
    # numerator sigma'' mu' - sigma' mu''
    swallowtails = []
    num = s_d[2] * m_d[1] - s_d[1] * m_d[2]
    if find_swallowtails and not is_identically_zero(num, cfg):
        for z in locate_zeros(num, f.grid, cfg, func=lambda u: _edge_numerator(f, u),
                              periodic=f.closed):
            if z.tangential or (f.closed and z.u >= f.grid[-1]):
                continue
            j = f.at(z.u)
            ea_u, eb_u, det_u = edge_coefficients(j)
            if abs(det_u[0]) < cfg.tol_zero:
                continue
            ab = [float(ea_u[0]), float(eb_u[0])]
            swallowtails.append((z.u, sheet_point(f, z.u, ab, j), ab))

    ref = (foot[0], dirn[0])
    dist = np.max([_point_line_distance(foot, *ref), _point_line_distance(foot + dirn, *ref)])
    return FocalSheet(f.grid, O_pts, Q_pts, foot, dirn, s, points, a, b, labels,
                      edge_points, edge_ab, edge_labels, swallowtails, bool(dist < 1e-8))


def _edge_numerator(f, u):
    j = f.at(u)
    s = j["sigma"].derivatives()[:, 0]
    m = j["mu"].derivatives()[:, 0]
    return float(s[2] * m[1] - s[1] * m[2])


def _point_line_distance(p, base, direction):
    rel = np.atleast_2d(p) - base
    perp = rel - np.outer(rel @ direction, direction)
    return np.linalg.norm(perp, axis=-1)


def sheet_distance(points, sheet: FocalSheet):
    """Max distance of points[i, k] from the line l(u_i) of ``sheet``."""
    out = 0.0
    for i in range(sheet.u.size):
        d = _point_line_distance(points[i], sheet.foot[i], sheet.direction[i])
        out = max(out, float(np.max(d)))
    return out


def developability_residual(f: DarbouxFrame, cfg=DEFAULT_TOL):
    """[Q', O', O - Q] per sample; NaN where sigma, mu or their derivatives vanish."""
    j = f.jets
    sig, mu = j["sigma"], j["mu"]
    O = j["P"] + j["xi"] / sig.v()
    Q = j["P"] + j["eta"] / mu.v()
    res = det3(Q.deriv(), O.deriv(), O - Q).value
    s_d, m_d = sig.derivatives(), mu.derivatives()
    ok = ((np.abs(s_d[0]) >= cfg.tol_zero) & (np.abs(m_d[0]) >= cfg.tol_zero)
          & (np.abs(s_d[1]) >= cfg.tol_zero) & (np.abs(m_d[1]) >= cfg.tol_zero))
    return np.where(ok, res, np.nan)
