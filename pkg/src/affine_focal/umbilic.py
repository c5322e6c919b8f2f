"""Umbilic, normally flat immersions from the Blaschke co-normal.

Forward: phi = (nu, nu . (f - O)) in R^(n+2) with Q = (0, ..., 0, 1).
Converse: given phi = (psi, z), f - O solves psi . (f - O) = z,
psi_(u_i) . (f - O) = z_(u_i) at every sample.
"""

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .blaschke import (BlaschkeApparatus, blaschke_apparatus, blaschke_jets,
                       is_proper_affine_sphere, laplacian_jet)
from .errors import SingularSystem
from .jets import Jet, det, det2
from .numkit import DEFAULT_TOL

PLANE_TOL_ANALYTIC = 1e-8
PLANE_TOL_SAMPLED = 1e-5


@dataclass
class UmbilicImmersion:
    n: int
    grid: tuple
    phi: np.ndarray          # (..., n+2)
    O_used: np.ndarray
    source: BlaschkeApparatus
    jets: Jet                # phi as a jet (univariate for n = 1, bivariate for n = 2)

    @property
    def Q(self):
        q = np.zeros(self.n + 2)
        q[-1] = 1.0
        return q


def construct_umbilic(f, O=None, samples=32, cfg=DEFAULT_TOL):
    """phi = (nu, nu . (f - O)) for a hypersurface or a ready Blaschke apparatus."""
    b = f if isinstance(f, BlaschkeApparatus) else blaschke_apparatus(f, samples, cfg)
    O = np.zeros(b.n + 1) if O is None else np.asarray(O, float)
    if b.n == 1:
        F = Jet.from_derivatives(b.curve.jets.jets)
        d = F.deriv()
        nu = Jet.stack([-d[..., 1], d[..., 0]])
        z = (nu * (F - O)).c.sum(axis=-1)
        phi = Jet(np.concatenate([nu.c, z[..., None]], axis=-1), 1)
    else:
        nu = b.jets["nu"]
        fO = b.jets["f"] - O
        z = Jet((nu * fO).c.sum(axis=-1), 2)
        phi = Jet(np.concatenate([nu.truncate(z.order).c, z.c[..., None]], axis=-1), 2)
    return UmbilicImmersion(b.n, b.grid, phi.value, O, b, phi)


def _orthonormal_frame(h, tangents=None, xiB=None):
    """Columns X_a with h(X_a, X_b) = delta_ab, from the Cholesky factor of h.

    With ``tangents`` (f_u_i) and ``xiB`` given, the frame is oriented so
    that [f_* X_1, ..., f_* X_n, xiB] has sign (-1)^(n+1); this is the
    orientation in which [nu_* X_1, ..., nu_* X_n, nu] = -1.
    """
    L = np.linalg.cholesky(h)
    X = np.linalg.inv(np.swapaxes(L, -1, -2))
    if tangents is None:
        return X
    n = h.shape[-1]
    push = [sum(X[..., i, a, None] * tangents[i] for i in range(n)) for a in range(n)]
    theta = np.linalg.det(np.stack(push + [xiB], axis=-1))
    flip = np.sign(theta) != (-1.0) ** (n + 1)
    X[..., :, -1] = np.where(flip[..., None], -X[..., :, -1], X[..., :, -1])
    return X


def _source_tangents(b):
    if b.n == 1:
        return [b.curve.jets.jets[1]]
    return [b.jets["f"].deriv(0).value, b.jets["f"].deriv(1).value]


def _tangent_jets(m):
    if m.n == 1:
        return [m.jets.deriv()]
    return [m.jets.deriv(0), m.jets.deriv(1)]


class UmbilicReport(NamedTuple):
    z_residual: float           # last coordinate vs psi . (f - O)
    frame_det_residual: float   # max |[phi_* X_1..X_n, phi, Q] + 1|
    metric_residual: float      # max |Q-coefficient of phi_ij + h_ij|
    normal_residual: float      # component of phi_ij off span(phi_*, phi, Q)
    contour_offset: float       # distance of the origin from the tangent spaces of {t phi}


def verify_umbilic(m: UmbilicImmersion):
    """Structure checks of the forward construction."""
    n = m.n
    b = m.source
    tang = [t.value for t in _tangent_jets(m)]
    phi = m.phi
    Q = np.broadcast_to(m.Q, phi.shape)
    X = _orthonormal_frame(b.h, _source_tangents(b), b.xiB)
    push = [sum(X[..., i, a, None] * tang[i] for i in range(n)) for a in range(n)]
    frame = np.stack(push + [phi, Q], axis=-1)
    fdet = np.linalg.det(frame)
    z = np.einsum("...j,...j->...", b.nu, b.f - m.O_used)
    basis = np.stack(tang + [phi, Q], axis=-1)
    metric = 0.0
    normal = 0.0
    for i in range(n):
        for j in range(n):
            second = _second_derivative(m, i, j)
            coef = np.linalg.solve(basis, second[..., None])[..., 0]
            metric = max(metric, float(np.max(np.abs(coef[..., -1] + b.h[..., i, j]))))
            normal = max(normal, float(np.max(np.abs(
                np.einsum("...ij,...j->...i", basis, coef) - second))))
    # tangent spaces of the cone {t phi} contain the origin: the origin's
    # residual after projection onto span(phi_*, phi) taken from phi
    span = np.stack(tang + [phi], axis=-1)
    offset = _lstsq_residual(span, -phi)
    return UmbilicReport(float(np.max(np.abs(phi[..., -1] - z))),
                         float(np.max(np.abs(fdet + 1.0))), metric, normal, offset)


def _lstsq_residual(A, y):
    flatA = A.reshape(-1, *A.shape[-2:])
    flaty = y.reshape(-1, y.shape[-1])
    worst = 0.0
    for Ai, yi in zip(flatA, flaty):
        c, *_ = np.linalg.lstsq(Ai, yi, rcond=None)
        worst = max(worst, float(np.linalg.norm(Ai @ c - yi)))
    return worst


def _second_derivative(m, i, j):
    if m.n == 1:
        return m.jets.deriv().deriv().value
    return m.jets.deriv(i).deriv(j).value


def verify_laplacian_identity(m: UmbilicImmersion):
    """Sup-norm of (1/n) Lap_h phi + H phi + Q with h the source Blaschke metric."""
    b = m.source
    if m.n == 1:
        lap = m.jets.deriv().deriv().value
    else:
        lap = laplacian_jet(m.jets, b.jets["h"]).value
    res = lap / m.n + b.H[..., None] * m.phi + m.Q
    return float(np.max(np.abs(res)))


class Hyperplane(NamedTuple):
    normal: np.ndarray
    offset: float            # normal . x = offset


class PlaneFit(NamedTuple):
    hyperplane: Optional[Hyperplane]
    residual: float          # max distance of the samples from the best hyperplane transversal to Q
    any_residual: float      # same for unrestricted hyperplanes (SVD fit)


def hyperplanarity_test(m: UmbilicImmersion, tol=None):
    """Does phi = (psi, z) lie in a hyperplane transversal to Q?

    Such hyperplanes are the graphs z = w . psi + c, and z is affine in
    psi exactly when z is constant for a shifted origin, i.e. when f is a
    proper affine sphere.  Hyperplanes containing the Q direction
    (w . psi = c) arise from improper affine spheres and are reported
    only through ``any_residual``.
    """
    if tol is None:
        tol = PLANE_TOL_SAMPLED if m.source.low_confidence else PLANE_TOL_ANALYTIC
    pts = m.phi.reshape(-1, m.phi.shape[-1])
    psi, z = pts[:, :-1], pts[:, -1]
    A = np.column_stack([psi, np.ones(len(z))])
    coef, *_ = np.linalg.lstsq(A, z, rcond=None)
    w = coef[:-1]
    resid = float(np.max(np.abs(A @ coef - z)) / np.sqrt(1.0 + w @ w))
    centre = pts.mean(axis=0)
    _, _, vt = np.linalg.svd(pts - centre, full_matrices=False)
    any_resid = float(np.max(np.abs((pts - centre) @ vt[-1])))
    plane = None
    if resid < tol:
        normal = np.append(-w, 1.0)
        nrm = np.linalg.norm(normal)
        plane = Hyperplane(normal / nrm, float(coef[-1] / nrm))
    return PlaneFit(plane, resid, any_resid)


def umbilic_report(m: UmbilicImmersion, cfg=DEFAULT_TOL):
    """Verification summary used by the CLI."""
    fit = hyperplanarity_test(m)
    sphere = is_proper_affine_sphere(m.source, cfg)
    checks = verify_umbilic(m)
    return {
        "laplacian_residual": verify_laplacian_identity(m),
        "frame_det_residual": checks.frame_det_residual,
        "metric_residual": checks.metric_residual,
        "normal_plane_residual": checks.normal_residual,
        "contour_offset": checks.contour_offset,
        "hyperplanar": fit.hyperplane is not None,
        "hyperplane": None if fit.hyperplane is None else
        {"normal": fit.hyperplane.normal.tolist(), "offset": fit.hyperplane.offset},
        "plane_fit_residual": fit.residual,
        "any_hyperplane_residual": fit.any_residual,
        "proper_affine_sphere": sphere.center is not None,
        "center": None if sphere.center is None else sphere.center.tolist(),
    }


# -- converse -------------------------------------------------------------------

class InverseResult(NamedTuple):
    f: np.ndarray                # recovered immersion (samples of f, O = caller origin)
    f_jets: Jet
    O: np.ndarray
    scale_residual: float        # max |psi - nu(f)|  (psi = lambda nu with lambda = 1)
    frame_det_residual: float    # max |[nu_* X_1..X_n, nu] + 1|


def inverse_construction(phi, O=None, cfg=DEFAULT_TOL, verify=True):
    """Recover f from phi = (psi, z) given as a univariate or bivariate jet.

    Solves psi . (f - O) = z and psi_(u_i) . (f - O) = z_(u_i) by Cramer's
    rule in jet arithmetic.  The translation ambiguity is fixed by the
    caller origin ``O`` (default 0).
    """
    if isinstance(phi, UmbilicImmersion):
        phi = phi.jets
    n = phi.nvars if phi.nvars == 2 else 1
    if phi.c.shape[-1] != n + 2:
        raise ValueError(f"phi must have {n + 2} components")
    O = np.zeros(n + 1) if O is None else np.asarray(O, float)
    psi = Jet(phi.c[..., :-1], phi.nvars)
    z = Jet(phi.c[..., -1], phi.nvars)
    if n == 1:
        rows = [psi, psi.deriv()]
        rhs = [z, z.deriv()]
    else:
        rows = [psi, psi.deriv(0), psi.deriv(1)]
        rhs = [z, z.deriv(0), z.deriv(1)]
    M = det(rows)
    scale = np.prod([np.linalg.norm(r.value, axis=-1) for r in rows], axis=0)
    bad = np.abs(M.value) <= cfg.tol_det * np.maximum(scale, 1e-300)
    if np.any(bad):
        raise SingularSystem(f"linear system singular at {int(np.sum(bad))} samples")
    comps = []
    for k in range(n + 1):
        # Cramer: replace column k of the system by rhs; rows are equations
        cols = [Jet.stack([r[..., j] for r in rows]) for j in range(n + 1)]
        cols[k] = Jet.stack(rhs)
        comps.append(det(cols) / M)
    F = Jet.stack(comps) + O
    if not verify:
        return InverseResult(F.value, F, O, float("nan"), float("nan"))
    return InverseResult(F.value, F, O, *_check_conormal(F, psi, n, cfg))


def _check_conormal(F, psi, n, cfg):
    if n == 1:
        d1 = F.deriv()
        s = det2(d1, d1.deriv()).power(1.0 / 3.0)
        nu = Jet.stack([-d1[..., 1], d1[..., 0]]) / s.v()
        dnu = nu.deriv() / s.v()              # derivative in affine arc-length
        scale_res = np.max(np.abs(psi.value - nu.value))
        fdet = det2(dnu, nu).value
    else:
        J = blaschke_jets(F, cfg)
        nu = J["nu"]
        h = np.stack([np.stack([J["h"][0].value, J["h"][1].value], -1),
                      np.stack([J["h"][1].value, J["h"][2].value], -1)], -2)
        X = _orthonormal_frame(h, [F.deriv(0).value, F.deriv(1).value], J["xiB"].value)
        du, dv = nu.deriv(0).value, nu.deriv(1).value
        push = [X[..., 0, a, None] * du + X[..., 1, a, None] * dv for a in range(2)]
        fdet = np.linalg.det(np.stack(push + [nu.value], axis=-1))
        scale_res = np.max(np.abs(psi.value - nu.value))
    return float(scale_res), float(np.max(np.abs(fdet + 1.0)))
