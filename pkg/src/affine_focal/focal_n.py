"""Bifurcation polynomial q(a, b) of the affine distance and closed-form fixtures.

At a point of an n-dimensional N with shape data S_1 (matrix sigma_kl in
an orthonormal basis) and S_2 = diag(mu_k), the affine distance to
x = p + a xi + b eta has Hessian with diagonal 1 - b mu_k - a sigma_kk
and off-diagonal -a sigma_kl; the focal set at p is {q(a, b) = 0} with
q = det(I - b S_2 - a S_1).  Coefficients are computed exactly over the
rationals from rounded sample values.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional

import numpy as np
import sympy as sp
from scipy.spatial import cKDTree

from .affine_curves import PlanarAffineCurve, affine_evolute
from .blaschke import blaschke_apparatus, is_proper_affine_sphere
from .curves import AnalyticCurve
from .errors import (ApexOnHyperplane, DegenerateTangent, EmptySection,
                     NonSimpleEigenvalue, SpecError)
from .jets import Jet
from .numkit import DEFAULT_TOL

A_SYM, B_SYM = sp.symbols("a b")
DENOMINATOR_CAP = 10 ** 12
EIGEN_GAP = 1e-6


@dataclass
class FrameData:
    """Per-sample shape data of an n-dimensional N in its affine normal frame."""

    n: int
    grid: np.ndarray                 # (K,) or (K, n) sample parameters
    mu: np.ndarray                   # (K, n) eigenvalues of S_2
    sigma_mat: np.ndarray            # (K, n, n) S_1 in the eigenbasis of S_2
    h1: Optional[np.ndarray] = None  # (K, n, n)
    signature: Optional[np.ndarray] = None   # (n,) signs of the Hessian rows
    basis_residual: Optional[np.ndarray] = None
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        self.mu = np.asarray(self.mu, float).reshape(-1, self.n)
        self.sigma_mat = np.asarray(self.sigma_mat, float).reshape(-1, self.n, self.n)
        self.grid = np.asarray(self.grid, float)
        if self.mu.shape[0] != self.sigma_mat.shape[0]:
            raise ValueError("mu and sigma must have the same number of samples")
        asym = np.max(np.abs(self.sigma_mat - np.swapaxes(self.sigma_mat, 1, 2)), initial=0.0)
        if asym > 1e-9 * max(1.0, np.max(np.abs(self.sigma_mat), initial=0.0)):
            raise ValueError(f"sigma matrix is not symmetric (asymmetry {asym:.3g})")
        if self.h1 is None:
            self.h1 = np.broadcast_to(np.eye(self.n), self.sigma_mat.shape).copy()
        if self.basis_residual is None:
            self.basis_residual = np.zeros(len(self))

    def __len__(self):
        return self.mu.shape[0]


def _rational(x, cap=DENOMINATOR_CAP):
    fr = Fraction(float(x)).limit_denominator(int(cap))
    return sp.Rational(fr.numerator, fr.denominator)


class BifurcationLocus(NamedTuple):
    poly: sp.Poly                  # q(a, b), q(0, 0) = 1
    coeffs: dict                   # {(i, j): Rational} for a^i b^j
    degree: int
    factors: list                  # [(factor Poly, multiplicity)]
    line_factors: list             # [(alpha, beta, gamma, multiplicity)]: alpha a + beta b + gamma
    signed_poly: sp.Poly           # signature-weighted form (product of row signs times q)


def bifurcation_polynomial(fd: FrameData, k, cap=DENOMINATOR_CAP):
    n = fd.n
    mu = [_rational(v, cap) for v in fd.mu[k]]
    sig = [[_rational(fd.sigma_mat[k, i, j], cap) for j in range(n)] for i in range(n)]
    M = sp.zeros(n, n)
    for i in range(n):
        for j in range(n):
            M[i, j] = (1 - B_SYM * mu[i] - A_SYM * sig[i][i]) if i == j else -A_SYM * sig[i][j]
    q = sp.Poly(sp.expand(M.det(method="berkowitz")), A_SYM, B_SYM)
    coeffs = {m: sp.Rational(c) for m, c in zip(q.monoms(), q.coeffs())}
    _, flist = sp.factor_list(q.as_expr(), A_SYM, B_SYM)
    factors = [(sp.Poly(f, A_SYM, B_SYM), int(m)) for f, m in flist]
    lines = []
    for f, m in factors:
        if f.total_degree() == 1:
            lines.append((f.coeff_monomial(A_SYM), f.coeff_monomial(B_SYM),
                          f.coeff_monomial(1), m))
    sign = 1
    if fd.signature is not None:
        sign = int(np.prod(np.sign(fd.signature)))
    return BifurcationLocus(q, coeffs, q.total_degree(), factors, lines, sp.Poly(sign * q.as_expr(), A_SYM, B_SYM))


def locus_summary(loc: BifurcationLocus):
    lines = [{"a": float(al), "b": float(be), "const": float(ga), "multiplicity": m}
             for al, be, ga, m in loc.line_factors]
    return {"degree": loc.degree, "factors": [str(f.as_expr()) for f, _ in loc.factors],
            "multiplicities": [m for _, m in loc.factors], "lines": lines,
            "single_line": len(loc.factors) == 1 and loc.factors[0][0].total_degree() == 1}


def sample_locus(loc: BifurcationLocus, extent=4.0, count=64):
    """Points (a, b) of {q = 0}: along line factors, else by root finding in b on an a-grid."""
    pts = []
    ts = np.linspace(-extent, extent, count)
    done_lines = set()
    for al, be, ga, _ in loc.line_factors:
        al, be, ga = float(al), float(be), float(ga)
        if (al, be, ga) in done_lines:
            continue
        done_lines.add((al, be, ga))
        nrm = al * al + be * be
        base = np.array([-ga * al / nrm, -ga * be / nrm])
        d = np.array([-be, al]) / np.sqrt(nrm)
        pts.extend(base + t * d for t in ts)
    rest = [f for f, _ in loc.factors if f.total_degree() > 1]
    for f in rest:
        for a in ts:
            coeffs = sp.Poly(f.as_expr().subs(A_SYM, sp.Float(a, 30)), B_SYM).all_coeffs()
            for r in np.roots([float(c) for c in coeffs]):
                if abs(r.imag) < 1e-12:
                    pts.append(np.array([a, r.real]))
    return np.array(pts).reshape(-1, 2)


# -- structure tests ----------------------------------------------------------

class CommutingReport(NamedTuple):
    commute: bool
    commutator_norm: float
    semiumbilic: Optional[bool]
    lines: Optional[list]           # [(sigma_k, mu_k)] for lines 1 - b mu_k - a sigma_k = 0


def commuting_and_semiumbilic(fd: FrameData, k, cfg=DEFAULT_TOL):
    S1 = fd.sigma_mat[k]
    S2 = np.diag(fd.mu[k])
    comm = S1 @ S2 - S2 @ S1
    cn = float(np.linalg.norm(comm))
    commute = cn < cfg.tol_residual
    semi = None
    if fd.n == 2:
        d = np.linalg.det(np.array([[S1[1, 1] - S1[0, 0], S1[0, 1]],
                                    [S2[1, 1] - S2[0, 0], S2[0, 1]]]))
        semi = bool(abs(d) < cfg.tol_residual)
    lines = None
    if commute:
        # a generic combination separates the common eigenvectors
        _, vecs = np.linalg.eigh(S1 + np.pi * S2)
        lines = [(float(v @ S1 @ v), float(v @ S2 @ v)) for v in vecs.T]
    return CommutingReport(commute, cn, semi, lines)


class RegularityReport(NamedTuple):
    smooth: bool
    tangent_basis: list       # symbolic basis of the tangent space
    zeta: tuple               # zeta = mu_1 xi - sigma_11 eta as (xi, eta) coefficients
    gap: float


def regularity_probe(fd: FrameData, k, eta_parallel, dmu1, cfg=DEFAULT_TOL):
    """Smoothness of the focal set at p + mu_1^(-1) eta: X_1(mu_1) != 0."""
    if not eta_parallel:
        raise ValueError("regularity criterion requires a parallel eta")
    mu = fd.mu[k]
    gap = float(np.min(np.abs(mu[1:] - mu[0]))) if fd.n > 1 else float("inf")
    if gap < EIGEN_GAP:
        raise NonSimpleEigenvalue(f"mu_1 is not simple (gap {gap:.3g})")
    basis = [f"X{i}" for i in range(2, fd.n + 1)] + ["xi", "eta"]
    zeta = (float(mu[0]), float(-fd.sigma_mat[k, 0, 0]))
    return RegularityReport(bool(abs(dmu1) > cfg.tol_zero), basis, zeta, gap)


# -- product of planar curves ----------------------------------------------------

@dataclass
class ProductFixture:
    frame_data: FrameData
    alpha: PlanarAffineCurve
    beta: PlanarAffineCurve
    index: np.ndarray            # (K, 2) grid indices (i on alpha, j on beta)
    evolute_alpha: np.ndarray
    evolute_beta: np.ndarray
    description: str

    def point(self, k, a, b):
        """x = phi + a xi + b eta in R^4 with xi = (alpha'', beta''), eta = (alpha'', 0)."""
        i, j = self.index[k]
        da, db = self.alpha.jets.jets, self.beta.jets.jets
        r, s = a + b, a
        return np.concatenate([da[0, i] + r * da[2, i], db[0, j] + s * db[2, j]])


def product_curves_fixture(alpha: PlanarAffineCurve, beta: PlanarAffineCurve,
                           stride_alpha=1, stride_beta=1):
    """Frame data of phi(u1, u2) = (alpha(u1), beta(u2)).

    With xi = (alpha'', beta'') and eta = (alpha'', 0) the shape operators
    are S_xi = diag(k_alpha, k_beta), S_eta = diag(k_alpha, 0), and the
    focal coordinates r = a + b, s = a give q = (1 - r k_alpha)(1 - s k_beta).
    The signature (1, -1) records the sign of the second Hessian row in
    the (1 - r k)(-1 + s k) form.
    """
    ia = np.arange(0, alpha.grid.size, stride_alpha)
    ib = np.arange(0, beta.grid.size, stride_beta)
    I, J = np.meshgrid(ia, ib, indexing="ij")
    I, J = I.ravel(), J.ravel()
    ka, kb = alpha.rho[I], beta.rho[J]
    mu = np.stack([ka, np.zeros_like(ka)], axis=-1)
    sigma = np.zeros((I.size, 2, 2))
    sigma[:, 0, 0] = ka
    sigma[:, 1, 1] = kb
    grid = np.stack([alpha.grid[I], beta.grid[J]], axis=-1)
    fd = FrameData(2, grid, mu, sigma, signature=np.array([1.0, -1.0]),
                   extras={"dmu1": alpha.rho_prime[I]})
    Ea = affine_evolute(alpha).points
    Eb = affine_evolute(beta).points
    return ProductFixture(fd, alpha, beta, np.stack([I, J], axis=-1), Ea, Eb,
                          "E(alpha) x R^2  union  R^2 x E(beta)")


def product_locus_distance(fx: ProductFixture, samples, extent=3.0, count=16):
    """Hausdorff-type distance between the q-locus and E(alpha) x R^2 u R^2 x E(beta).

    Every sampled zero (a, b) of q is mapped to R^4 and its distance to the
    union is measured against the evolute samples from the planar pipeline.
    Returns (max distance, number of points).
    """
    ea = fx.evolute_alpha[np.all(np.isfinite(fx.evolute_alpha), axis=1)]
    eb = fx.evolute_beta[np.all(np.isfinite(fx.evolute_beta), axis=1)]
    ta, tb = cKDTree(ea), cKDTree(eb)
    worst = 0.0
    npts = 0
    hit_a = np.zeros(len(ea), bool)
    for k in samples:
        loc = bifurcation_polynomial(fx.frame_data, k)
        for a, b in sample_locus(loc, extent, count):
            x = fx.point(k, a, b)
            da, ia = ta.query(x[:2])
            db, _ = tb.query(x[2:])
            worst = max(worst, min(da, db))
            if da < 1e-9:
                hit_a[ia] = True
            npts += 1
    return worst, npts


# -- quadric sections ----------------------------------------------------------

@dataclass(frozen=True)
class QuadricSpace:
    signs: tuple

    def form(self, x, y):
        return np.einsum("...i,i,...i->...", x, np.asarray(self.signs, float), y)

    def surface(self):
        from .surfaces import ImplicitPoly
        d = len(self.signs)
        if d != 3:
            raise ValueError("quadric surfaces are built in R^3")
        terms = [(2, 0, 0, self.signs[0]), (0, 2, 0, self.signs[1]),
                 (0, 0, 2, self.signs[2]), (0, 0, 0, -1.0)]
        s = ImplicitPoly(terms, f"quadric{tuple(self.signs)}")
        s.center = np.zeros(3)
        return s


def _plane_basis(normal):
    normal = np.asarray(normal, float)
    nhat = normal / np.linalg.norm(normal)
    helper = np.eye(3)[int(np.argmin(np.abs(nhat)))]
    e1 = np.cross(nhat, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(nhat, e1)
    return nhat, e1, e2


def plane_section(space: QuadricSpace, normal, offset):
    """Analytic parametrization of {<x,x> = 1} cut by {normal . x = offset} (ellipse case)."""
    nhat, e1, e2 = _plane_basis(normal)
    p0 = nhat * (offset / np.linalg.norm(normal))
    eps = np.asarray(space.signs, float)
    E = np.stack([e1, e2])
    A = np.einsum("ai,i,bi->ab", E, eps, E)
    bvec = np.einsum("ai,i,i->a", E, eps, p0)
    c = float(np.sum(eps * p0 * p0)) - 1.0
    evals, evecs = np.linalg.eigh(A)
    if np.any(np.abs(evals) < 1e-12):
        raise DegenerateTangent("section is not a central conic")
    centre2 = -np.linalg.solve(A, bvec)
    level = float(centre2 @ A @ centre2) - c   # (x - c)^T A (x - c) = level
    if np.all(evals > 0) and level > 0 or np.all(evals < 0) and level < 0:
        radii = np.sqrt(level / evals)
    elif np.all(np.sign(evals) == np.sign(evals[0])):
        raise EmptySection("plane misses the quadric")
    else:
        raise DegenerateTangent("hyperbolic sections are not supported")
    centre = p0 + centre2 @ E
    axes = (evecs.T * radii[:, None]) @ E    # rows: semi-axis vectors in R^3

    def f(t):
        return (Jet.stack([t.cos() * axes[0, i] + t.sin() * axes[1, i] + centre[i]
                           for i in range(3)]))
    curve = AnalyticCurve(f, 0.0, 2 * np.pi, 3, True, "plane_section")
    # tangents must be non-null for the form
    tt = np.linspace(0, 2 * np.pi, 64)
    tang = -np.sin(tt)[:, None] * axes[0] + np.cos(tt)[:, None] * axes[1]
    if np.min(np.abs(space.form(tang, tang))) < 1e-12:
        raise DegenerateTangent("section has null tangents")
    return curve, centre


@dataclass
class QuadricSection:
    curve: AnalyticCurve
    frame: object                 # DarbouxFrame
    frame_data: FrameData
    sigma_spread: float
    mu_spread: float
    umbilic: bool
    hyperplanar: bool
    focal_line: Optional[tuple]   # (point, unit direction)
    xi_parallel_residual: float   # the <,>-unit normal inside M: xi' tangent to N


def quadric_section_fixture(space: QuadricSpace, plane=None, curve=None, cfg=DEFAULT_TOL,
                            samples=256, umbilic_tol=1e-8):
    """Curve on the quadric {<x,x> = 1}: a plane section, or any given curve.

    The verdict is umbilic iff sigma and mu are constant (to ``umbilic_tol``)
    along the Darboux frame with lambda0 = 0.
    """
    from .darboux3 import darboux_frame, focal_sheet
    from .surfaces import on_surface
    M = space.surface()
    if curve is None:
        curve, _ = plane_section(space, *plane)
    f = darboux_frame(on_surface(curve, M), cfg, samples, lambda0=0.0)
    ss = float(np.ptp(f.sigma))
    ms = float(np.ptp(f.mu))
    umb = ss < umbilic_tol and ms < umbilic_tol
    focal = None
    if umb:
        sh = focal_sheet(f, classify=False, find_swallowtails=False)
        focal = (sh.foot[0], sh.direction[0])
    # <,>-unit normal to N inside M: xi_q proportional to the part of xi
    # orthogonal (for <,>) to T within T_pM; parallel iff xi_q' is tangent
    xi_res = _unit_normal_parallel_residual(space, f)
    pts = f.phi
    centre = pts.mean(axis=0)
    sv = np.linalg.svd(pts - centre, compute_uv=False)
    hyper = bool(sv[-1] / np.sqrt(len(pts)) < 1e-8)
    fd = FrameData(1, f.grid, f.mu[:, None], f.sigma[:, None, None])
    return QuadricSection(curve, f, fd, ss, ms, umb, hyper, focal, xi_res)


def _unit_normal_parallel_residual(space, f):
    eps = np.asarray(space.signs, float)
    p, T = f.phi, f.T
    # normal to T and p for <,>: epsilon-weighted cross product
    v = np.cross(eps * T, eps * p)
    nrm = np.sqrt(np.abs(space.form(v, v)))
    xi = v / nrm[:, None]
    # derivative by central differences on the periodic grid
    h = f.grid[1] - f.grid[0]
    d = (np.roll(xi[:-1], -1, axis=0) - np.roll(xi[:-1], 1, axis=0)) / (2 * h)
    # component of xi' along p (the only non-tangent direction of M besides xi itself)
    comp = np.abs(np.einsum("ij,ij->i", d, eps * p[:-1]))
    return float(np.max(comp))


# -- hyperplane sections (cones) -------------------------------------------------

@dataclass
class HyperplaneSection:
    curve3: AnalyticCurve
    frame: object
    umbilic: bool
    affine_sphere_centre: Optional[np.ndarray]
    sigma_spread: float
    mu_spread: float
    focal_line: Optional[tuple]


def hyperplane_section_fixture(L, planar_curve: AnalyticCurve, apex, cfg=DEFAULT_TOL,
                               samples=256, umbilic_tol=1e-8):
    """N inside the plane L = (normal, offset), M the cone over N with the given apex.

    The verdict (umbilic iff N is an affine sphere in L) comes from the
    Blaschke pipeline; the Darboux pipeline on the cone is run alongside.
    """
    from .darboux3 import darboux_frame, focal_sheet
    from .surfaces import Cone, on_surface
    normal, offset = np.asarray(L[0], float), float(L[1])
    apex = np.asarray(apex, float)
    if abs(normal @ apex - offset) < 1e-12 * max(1.0, np.linalg.norm(normal)):
        raise ApexOnHyperplane("cone apex lies on the hyperplane")
    nhat, e1, e2 = _plane_basis(normal)
    p0 = nhat * (offset / np.linalg.norm(normal))

    def f(t):
        q = planar_curve(t)
        return Jet.stack([q[..., 0] * e1[i] + q[..., 1] * e2[i] + p0[i] for i in range(3)])
    curve3 = AnalyticCurve(f, planar_curve.t0, planar_curve.t1, 3, planar_curve.periodic,
                           f"{planar_curve.name} in L")
    sph = is_proper_affine_sphere(blaschke_apparatus(planar_curve, samples, cfg), cfg)
    fr = darboux_frame(on_surface(curve3, Cone(apex, curve3)), cfg, samples, lambda0=0.0)
    ss, ms = float(np.ptp(fr.sigma)), float(np.ptp(fr.mu))
    focal = None
    if sph.center is not None:
        sh = focal_sheet(fr, classify=False, find_swallowtails=False)
        focal = (sh.foot[0], sh.direction[0])
    centre3 = None if sph.center is None else p0 + sph.center[0] * e1 + sph.center[1] * e2
    return HyperplaneSection(curve3, fr, sph.center is not None, centre3, ss, ms, focal)


# -- envelope of tangent spaces -------------------------------------------------

class Envelope(NamedTuple):
    points: np.ndarray     # (N, M, d) samples p + t xi
    t: np.ndarray
    marks: np.ndarray      # (N, d) points p + xi / sigma (NaN where sigma ~ 0)


def envelope_tangent_spaces(frame, t_range=(-2.0, 2.0), n_t=33, cfg=DEFAULT_TOL):
    """Ruled set {p + t xi}; marks the focal points at t = 1/sigma.

    ``frame`` is a DarbouxFrame (curves in 3-space) or an UmbilicImmersion,
    where xi = phi and S_xi = -Id, so every mark is the origin.
    """
    from .umbilic import UmbilicImmersion
    t = np.linspace(t_range[0], t_range[1], n_t)
    if isinstance(frame, UmbilicImmersion):
        p = frame.phi.reshape(-1, frame.phi.shape[-1])
        xi = p
        sigma = -np.ones(p.shape[0])
    else:
        p, xi, sigma = frame.phi, frame.xi, frame.sigma
    pts = p[:, None, :] + t[None, :, None] * xi[:, None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        marks = np.where(np.abs(sigma)[:, None] >= cfg.tol_zero, p + xi / sigma[:, None], np.nan)
    return Envelope(pts, t, marks)


# -- JSON -----------------------------------------------------------------------

def parse_frame_data(obj):
    """FrameData from ``{n, grid, mu, sigma, h1[, signature]}`` (per-sample lists)."""
    try:
        n = int(obj["n"])
        mu = np.asarray(obj["mu"], float).reshape(-1, n)
        sigma = np.asarray(obj["sigma"], float).reshape(-1, n, n)
        grid = np.asarray(obj.get("grid", np.arange(mu.shape[0])), float)
        h1 = obj.get("h1")
        h1 = None if h1 is None else np.asarray(h1, float).reshape(-1, n, n)
        sig = obj.get("signature")
        return FrameData(n, grid, mu, sigma, h1,
                         None if sig is None else np.asarray(sig, float))
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"bad frame data: {exc}") from None


def random_frame_data(rng, n, samples, scale=2.0, integer=False):
    """Random symmetric S_1 and eigenvalues mu (optionally small integers)."""
    if integer:
        mu = rng.integers(-3, 4, size=(samples, n)).astype(float)
        B = rng.integers(-3, 4, size=(samples, n, n)).astype(float)
    else:
        mu = rng.uniform(-scale, scale, size=(samples, n))
        B = rng.uniform(-scale, scale, size=(samples, n, n))
    sigma = 0.5 * (B + np.swapaxes(B, 1, 2))
    return FrameData(n, np.arange(samples), mu, sigma)


def umbilic_frame_data(n, sigma, mu, samples=4):
    s = np.broadcast_to(np.eye(n) * sigma, (samples, n, n)).copy()
    m = np.full((samples, n), float(mu))
    return FrameData(n, np.arange(samples), m, s)
