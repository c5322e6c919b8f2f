"""Blaschke structure of non-degenerate curves (n = 1) and surfaces (n = 2).

For a surface patch f(u, v) with L_ij = [f_u, f_v, f_ij] the Blaschke
metric is h = L / |det L|^(1/4) (sign chosen positive definite), the
affine normal is xiB = (1/2) Lap_h f, the co-normal nu solves
nu . f_u = nu . f_v = 0, nu . xiB = 1, and the shape operator S is read
from xiB_i = -S^k_i f_k with H = (1/2) tr S.  Everything is evaluated in
bivariate Taylor arithmetic, so the derivatives of xiB needed for H come
straight from the analytic patch.
"""

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .affine_curves import PlanarAffineCurve, reparam_affine_planar
from .curves import AnalyticCurve
from .errors import DegenerateMetric
from .jets import Jet, cross, det3, dot
from .numkit import DEFAULT_TOL

PATCH_ORDER = 8


@dataclass(frozen=True)
class Patch:
    """Analytic surface patch: ``func(u_jet, v_jet)`` returns a 3-vector jet."""

    func: Callable
    u_range: tuple
    v_range: tuple
    name: str = "patch"

    def mapped(self, A, b=None):
        A = np.asarray(A, float)
        b = np.zeros(3) if b is None else np.asarray(b, float)

        def f(u, v):
            p = self.func(u, v)
            return Jet(np.einsum("ij,...j->...i", A, p.c), p.nvars) + b
        return Patch(f, self.u_range, self.v_range, self.name)


def sphere_patch(r=1.0, center=(0.0, 0.0, 0.0), v_max=1.2):
    c = np.asarray(center, float)

    def f(u, v):
        cv = v.cos()
        return Jet.stack([cv * u.cos() * r, cv * u.sin() * r, v.sin() * r]) + c
    return Patch(f, (0.0, 2 * np.pi), (-v_max, v_max), f"sphere({r})")


def ellipsoid_patch(a, b, c, v_max=1.2):
    def f(u, v):
        cv = v.cos()
        return Jet.stack([cv * u.cos() * a, cv * u.sin() * b, v.sin() * c])
    return Patch(f, (0.0, 2 * np.pi), (-v_max, v_max), f"ellipsoid({a},{b},{c})")


def graph_patch(terms, half_width=1.0, name="graph"):
    """Graph (x, y, sum c x^i y^j) over a centered square."""
    terms = [(int(i), int(j), float(c)) for i, j, c in terms]

    def f(x, y):
        z = x * 0.0
        for i, j, c in terms:
            m = x * 0.0 + 1.0
            for _ in range(i):
                m = m * x
            for _ in range(j):
                m = m * y
            z = z + m * c
        return Jet.stack([x, y, z])
    w = float(half_width)
    return Patch(f, (-w, w), (-w, w), name)


def paraboloid_patch(half_width=1.0):
    return graph_patch([(2, 0, 0.5), (0, 2, 0.5)], half_width, "paraboloid")


# -- apparatus --------------------------------------------------------------

@dataclass
class BlaschkeApparatus:
    n: int
    grid: tuple               # (u,) or (u, v) 1-D grids
    f: np.ndarray             # (..., n+1)
    h: np.ndarray             # (..., n, n)
    xiB: np.ndarray
    nu: np.ndarray
    H: np.ndarray
    S: Optional[np.ndarray] = None
    jets: Optional[dict] = None      # bivariate jets for n = 2
    curve: Optional[PlanarAffineCurve] = None   # affine arc-length curve for n = 1
    low_confidence: bool = False

    def residuals(self):
        """Sup-norm of nu . f_* and nu . xiB - 1."""
        if self.n == 1:
            d = self.curve.jets.jets
            tang = np.einsum("ij,ij->i", self.nu, d[1])
        else:
            fu = self.jets["f"].deriv(0).value
            fv = self.jets["f"].deriv(1).value
            tang = np.maximum(np.abs(np.einsum("...j,...j->...", self.nu, fu)),
                              np.abs(np.einsum("...j,...j->...", self.nu, fv)))
        norm = np.einsum("...j,...j->...", self.nu, self.xiB) - 1.0
        return {"nu_tangent": float(np.max(np.abs(tang))), "nu_xiB": float(np.max(np.abs(norm)))}


def blaschke_apparatus(f, samples=32, cfg=DEFAULT_TOL, order=PATCH_ORDER):
    """Blaschke apparatus of an AnalyticCurve (n = 1) or a Patch (n = 2)."""
    if isinstance(f, (AnalyticCurve, PlanarAffineCurve)):
        return _curve_apparatus(f, samples, cfg)
    if isinstance(f, Patch):
        return _patch_apparatus(f, samples, cfg, order)
    raise TypeError(f"unsupported hypersurface {type(f).__name__}")


def _curve_apparatus(f, samples, cfg):
    c = f if isinstance(f, PlanarAffineCurve) else reparam_affine_planar(f, cfg=cfg, samples=samples)
    d = c.jets.jets
    nu = np.stack([-d[1, :, 1], d[1, :, 0]], axis=-1)
    N = c.grid.size
    return BlaschkeApparatus(1, (c.grid,), d[0], np.ones((N, 1, 1)), d[2], nu, c.rho.copy(),
                             S=c.rho.reshape(N, 1, 1), curve=c, low_confidence=not c.exact)


def patch_grid(patch: Patch, samples):
    u = np.linspace(*patch.u_range, samples + 1)
    v = np.linspace(*patch.v_range, samples + 1)
    return u, v


def _metric_jets(F):
    """L_ij, h_ij jets and the sign making h positive definite."""
    fu, fv = F.deriv(0), F.deriv(1)
    fuu, fuv, fvv = fu.deriv(0), fu.deriv(1), fv.deriv(1)
    L11, L12, L22 = det3(fu, fv, fuu), det3(fu, fv, fuv), det3(fu, fv, fvv)
    detL = L11 * L22 - L12 * L12
    return fu, fv, (L11, L12, L22), detL


def blaschke_jets(F, cfg=DEFAULT_TOL):
    """Bivariate jets of h, xiB, nu, S, H for a patch jet F (batched)."""
    fu, fv, (L11, L12, L22), detL = _metric_jets(F)
    dval = detL.value
    if np.any(dval <= cfg.tol_det * np.max(np.abs(dval))) or np.any(dval <= 0):
        raise DegenerateMetric("det L is not positive: metric degenerate or indefinite")
    sign = np.sign(L11.value)
    if np.any(sign != sign.flat[0]):
        raise DegenerateMetric("Blaschke metric changes sign on the patch")
    scale = detL.power(-0.25) * float(sign.flat[0])
    h = (L11 * scale, L12 * scale, L22 * scale)
    lap_f = laplacian_jet(F, h)
    xiB = lap_f * 0.5
    nrm = cross(fu, fv)
    nu = nrm / dot(nrm, xiB).v()
    # shape operator from xiB_i = -S^k_i f_k (least squares on the 3x2 system)
    xu, xv = xiB.deriv(0), xiB.deriv(1)
    g11, g12, g22 = dot(fu, fu), dot(fu, fv), dot(fv, fv)
    gdet = g11 * g22 - g12 * g12

    def solve(x):
        r1, r2 = dot(fu, x) * -1.0, dot(fv, x) * -1.0
        return (r1 * g22 - r2 * g12) / gdet, (r2 * g11 - r1 * g12) / gdet
    S11, S21 = solve(xu)
    S12, S22 = solve(xv)
    H = (S11 + S22) * 0.5
    return {"f": F, "h": h, "xiB": xiB, "nu": nu, "S": (S11, S12, S21, S22), "H": H}


def _patch_apparatus(patch, samples, cfg, order):
    u, v = patch_grid(patch, samples)
    U, V = np.meshgrid(u, v, indexing="ij")
    uj, vj = Jet.variables2(U, V, order)
    F = patch.func(uj, vj)
    J = blaschke_jets(F, cfg)
    h = np.stack([np.stack([J["h"][0].value, J["h"][1].value], -1),
                  np.stack([J["h"][1].value, J["h"][2].value], -1)], -2)
    S11, S12, S21, S22 = (s.value for s in J["S"])
    S = np.stack([np.stack([S11, S12], -1), np.stack([S21, S22], -1)], -2)
    return BlaschkeApparatus(2, (u, v), F.value, h, J["xiB"].value, J["nu"].value,
                             J["H"].value, S=S, jets=J)


# -- Laplacian ----------------------------------------------------------------

def laplacian_jet(F, h):
    """Lap_h F = h^ij (F_ij - Gamma^k_ij F_k) as a bivariate jet (h = (h11, h12, h22) jets)."""
    h11, h12, h22 = h
    det = h11 * h22 - h12 * h12
    i11, i12, i22 = h22 / det, h12 * -1.0 / det, h11 / det
    hm = {(0, 0): h11, (0, 1): h12, (1, 0): h12, (1, 1): h22}
    inv = {(0, 0): i11, (0, 1): i12, (1, 0): i12, (1, 1): i22}
    dh = {(i, j, k): hm[i, j].deriv(k) for i in range(2) for j in range(2) for k in range(2)}

    def christoffel(k, i, j):
        out = None
        for l in range(2):
            term = inv[k, l] * (dh[j, l, i] + dh[i, l, j] - dh[i, j, l]) * 0.5
            out = term if out is None else out + term
        return out
    Fd = [F.deriv(0), F.deriv(1)]
    total = None
    for i in range(2):
        for j in range(2):
            hess = Fd[i].deriv(j)
            for k in range(2):
                hess = hess - Fd[k] * _vec(christoffel(k, i, j), F)
            term = hess * _vec(inv[i, j], F)
            total = term if total is None else total + term
    return total


def _vec(scalar, like):
    return scalar.v() if len(like.batch_shape) > len(scalar.batch_shape) else scalar


def laplacian_of(field, h=None):
    """Lap_h of a field given as jets.

    n = 1: ``field`` is a univariate Jet in a parameter with h = du^2 (or
    h a scalar jet giving h(u) du^2); returns the values of Lap_h field.
    n = 2: ``field`` is a bivariate Jet and ``h`` = (h11, h12, h22) jets.
    """
    if field.nvars == 1:
        if h is None:
            return field.deriv().deriv().value
        # Lap = h^(-1/2) d/du (h^(-1/2) d/du)
        hs = h.power(-0.5)
        inner = field.deriv() * _vec(hs, field)
        return (inner.deriv() * _vec(hs, field)).value
    if h is None:
        raise ValueError("bivariate Laplacian needs the metric")
    det = (h[0] * h[2] - h[1] * h[1]).value
    if np.any(det == 0) or np.any(np.sign(det) != np.sign(det.flat[0])):
        raise DegenerateMetric("metric is not definite")
    return laplacian_jet(field, h).value


# -- affine spheres -------------------------------------------------------------

class SphereTest(NamedTuple):
    center: Optional[np.ndarray]
    residual: float          # max distance of the center from the normal lines
    parallel: bool           # all affine normals parallel (improper candidate)


def is_proper_affine_sphere(b: BlaschkeApparatus, cfg=DEFAULT_TOL):
    """Least-squares concurrency point of the affine normal lines f + t xiB."""
    d = b.xiB.reshape(-1, b.xiB.shape[-1])
    p = b.f.reshape(-1, b.f.shape[-1])
    d = d / np.linalg.norm(d, axis=-1, keepdims=True)
    dim = d.shape[1]
    proj = np.eye(dim)[None] - d[:, :, None] * d[:, None, :]
    M = proj.sum(axis=0)
    rhs = np.einsum("nij,nj->i", proj, p)
    evals = np.linalg.eigvalsh(M)
    if evals[0] < 1e-12 * d.shape[0]:
        return SphereTest(None, float("inf"), True)
    centre = np.linalg.solve(M, rhs)
    rel = centre - p
    dist = np.linalg.norm(rel - np.einsum("ni,ni->n", rel, d)[:, None] * d, axis=-1)
    res = float(np.max(dist))
    return SphereTest(centre if res < cfg.tol_residual else None, res, False)
