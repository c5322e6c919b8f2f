import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from _helpers import random_sl
from affine_focal.affine_curves import (affine_evolute, area_function, count_vertices,
                                        cylindricity_test, evolute_cusps, lift_with_area,
                                        projective_density, reconstruct_from_curvature,
                                        reparam_affine_planar, spatial_invariants,
                                        support_function)
from affine_focal.curves import (AnalyticCurve, circle, ellipse, fourier_oval, helix, parametric_poly,
                                 sampled_curve)
from affine_focal.errors import DegenerateTorsion, InflectionPoint, NotClosed


# -- planar reparametrization -------------------------------------------------------

def test_unit_circle_is_affine_arclength():
    c = reparam_affine_planar(circle(), samples=64)
    np.testing.assert_allclose(c.rho, 1.0, atol=1e-12)
    assert c.length == pytest.approx(2 * np.pi, rel=1e-12)
    vol, ode = c.residuals()
    assert vol < 1e-12 and ode < 1e-12


def test_parabola_has_zero_curvature():
    c = reparam_affine_planar(parametric_poly([[0, 1], [0, 0, 0.5]]), samples=64)
    np.testing.assert_allclose(c.rho, 0.0, atol=1e-14)
    assert c.length == pytest.approx(2.0)


def test_ellipse_constant_curvature_and_length():
    c = reparam_affine_planar(ellipse(2.0, 1.0), samples=128)
    np.testing.assert_allclose(c.rho, 2.0 ** (-2.0 / 3.0), atol=1e-12)
    # u = (ab)^(1/3) t
    assert c.length == pytest.approx(2.0 ** (1.0 / 3.0) * 2 * np.pi, rel=1e-12)
    np.testing.assert_allclose(c.t, c.grid / 2.0 ** (1.0 / 3.0), atol=1e-10)


def test_clockwise_curve_is_reflected():
    c = reparam_affine_planar(circle().mapped(np.diag([1.0, -1.0])), samples=64)
    assert c.reflected
    np.testing.assert_allclose(c.rho, 1.0, atol=1e-12)


def test_inflection_raises_with_location():
    # (t, t^3) has an inflection at t = 0
    with pytest.raises(InflectionPoint) as info:
        reparam_affine_planar(parametric_poly([[0, 1], [0, 0, 0, 1]]), samples=64)
    assert abs(info.value.u) < 1e-6


def test_oval_with_flat_points_is_rejected():
    # r = 1 + 0.1 cos 3t: [G_t, G_tt] = 1.18 + 1.1 e - 0.08 e^2 with e = cos 3t,
    # which touches 0 (flat point, no sign change) where e = -1
    with pytest.raises(InflectionPoint) as info:
        reparam_affine_planar(fourier_oval([1.0, 0.0, 0.0, 0.1]))
    assert min(abs(info.value.u - np.pi / 3 * k) for k in (1, 3, 5)) < 1e-6


@given(st.integers(0, 2 ** 31 - 1))
def test_planar_curvature_equiaffine_invariant(seed):
    rng = np.random.default_rng(seed)
    A = random_sl(rng, 2)
    b = rng.standard_normal(2)
    base = fourier_oval([1.0, 0.0, 0.04, 0.03], [0.0, 0.02])
    c0 = reparam_affine_planar(base, samples=128)
    c1 = reparam_affine_planar(base.mapped(A, b), samples=128)
    np.testing.assert_allclose(c1.rho, c0.rho, atol=1e-9)
    np.testing.assert_allclose(c1.jets.jets[0], c0.jets.jets[0] @ A.T + b, atol=1e-9)


def test_sampled_curve_close_to_analytic():
    t = np.linspace(0, 2 * np.pi, 401)
    xy = np.stack([2 * np.cos(t), np.sin(t)], -1)
    c = reparam_affine_planar(sampled_curve(t, xy), samples=128)
    assert not c.exact
    np.testing.assert_allclose(c.rho, 2.0 ** (-2.0 / 3.0), atol=1e-4)


# -- evolute, support, vertices ------------------------------------------------------

def test_conic_evolutes_collapse_to_center():
    for cur in (circle(), ellipse(2.0, 1.0)):
        ev = affine_evolute(reparam_affine_planar(cur, samples=64))
        np.testing.assert_allclose(ev.points, 0.0, atol=1e-12)
        assert ev.omitted == []


def test_parabola_evolute_omitted():
    ev = affine_evolute(reparam_affine_planar(parametric_poly([[0, 1], [0, 0, 0.5]]), samples=64))
    assert len(ev.omitted) == ev.u.size and np.all(np.isnan(ev.points))


def test_support_function_circles():
    c = reparam_affine_planar(circle(), samples=64)
    s = support_function(c, [0.0, 0.0])
    np.testing.assert_allclose(s.z, 1.0, atol=1e-12)
    assert s.residual < 1e-12
    s = support_function(reparam_affine_planar(circle(2.0), samples=64), [0.0, 0.0])
    np.testing.assert_allclose(s.z, 2.0 ** (4.0 / 3.0), atol=1e-12)


def test_support_identity_on_oval(oval_curve):
    s = support_function(oval_curve, [0.1, -0.05])
    assert s.residual < 1e-9


def test_vertices():
    rep = count_vertices(reparam_affine_planar(circle(), samples=64))
    assert rep.degenerate and rep.count is None
    oval2 = reparam_affine_planar(fourier_oval([1.0, 0.0, 0.05]), samples=256)
    assert count_vertices(oval2).count >= 6


def test_oval_vertices_and_cusps(oval_curve):
    rep = count_vertices(oval_curve)
    assert rep.count == 12
    assert len(evolute_cusps(oval_curve)) == 12
    # the zeros found are zeros of rho'
    for z in rep.zeros:
        assert abs(oval_curve.rho_prime_at(z.u)[0]) < 1e-9


def test_not_closed():
    e = ellipse(2.0, 1.0)
    arc = reparam_affine_planar(AnalyticCurve(e.func, 0.0, 3.0, 2, False, "arc"), samples=64)
    assert not arc.closed
    with pytest.raises(NotClosed):
        count_vertices(arc, closed=True)


# -- reconstruction ------------------------------------------------------------------

def test_reconstruct_examples():
    u = np.linspace(0, 2 * np.pi, 2001)
    g, z = reconstruct_from_curvature(1.0, u, [1, 0], [0, 1], 1.0, 0.0)
    np.testing.assert_allclose(g, np.stack([np.cos(u), np.sin(u)], -1), atol=1e-10)
    np.testing.assert_allclose(z, 1.0, atol=1e-10)
    _, z = reconstruct_from_curvature(0.0, u, [0, 0], [1, 0], 0.0, 0.0)
    np.testing.assert_allclose(z, u ** 2 / 2, atol=1e-9)
    _, z = reconstruct_from_curvature(np.ones_like(u), u, [1, 0], [0, 1], 0.0, 0.0)
    np.testing.assert_allclose(z, 1 - np.cos(u), atol=1e-9)


def test_reconstruct_recovers_oval(oval_curve):
    d = oval_curve.jets.jets
    O = np.array([0.1, -0.05])
    s = support_function(oval_curve, O)
    g, z = reconstruct_from_curvature(lambda u: float(oval_curve.rho_at(u)[0]), oval_curve.grid,
                                      d[1, 0], d[2, 0], s.z[0], s.dz[0])
    np.testing.assert_allclose(g, d[1], atol=1e-6)
    np.testing.assert_allclose(z, s.z, atol=1e-6)
    np.testing.assert_allclose(oval_curve.rho_at(oval_curve.grid), oval_curve.rho, atol=1e-12)


# -- area --------------------------------------------------------------------------

def test_area_function_circle():
    c = reparam_affine_planar(circle(), samples=64)
    Z = area_function(c, [0.0, 0.0], 0.0)
    np.testing.assert_allclose(Z, c.grid, atol=1e-12)
    Z = area_function(c, [0.0, 0.0], 1.0)
    assert np.interp(1.0, c.grid, Z) == pytest.approx(0.0, abs=1e-12)


def test_area_function_shoelace_oracle(oval_curve):
    Z = area_function(oval_curve, [0.2, 0.1])
    t = np.linspace(0, 2 * np.pi, 200001)
    r = 1 + 0.05 * np.cos(3 * t)
    x, y = r * np.cos(t), r * np.sin(t)
    area = 0.5 * np.sum(x[:-1] * y[1:] - x[1:] * y[:-1])
    assert Z[-1] == pytest.approx(2 * area, rel=1e-9)


# -- spatial --------------------------------------------------------------------------

def test_helix_invariants():
    c = spatial_invariants(helix(), samples=128)
    np.testing.assert_allclose(c.rho, 1.0, atol=1e-12)
    np.testing.assert_allclose(c.tau, 0.0, atol=1e-12)
    assert cylindricity_test(c).cylindrical
    assert projective_density(c).identically_zero


def test_twisted_cubic_invariants():
    c = spatial_invariants(parametric_poly([[0, 1], [0, 0, 0.5], [0, 0, 0, 1 / 6]]), samples=64)
    np.testing.assert_allclose(c.rho, 0.0, atol=1e-13)
    np.testing.assert_allclose(c.tau, 0.0, atol=1e-13)
    assert projective_density(c).identically_zero


def test_wobbly_helix_not_cylindrical():
    c = spatial_invariants(helix(wobble=0.1), samples=256)
    vol, ode = c.residuals()
    assert vol < 1e-8 and ode < 1e-6
    assert np.ptp(c.rho) > 0.1 and np.ptp(c.tau) > 0.1
    cyl = cylindricity_test(c)
    assert not cyl.cylindrical and np.max(np.abs(cyl.residual)) > 1.0


def test_planar_curve_is_degenerate_in_space():
    with pytest.raises(DegenerateTorsion):
        spatial_invariants(parametric_poly([[0, 1], [0, 0, 1], [0.0]]), samples=64)


def test_area_lift_cylindrical(oval_curve):
    c = spatial_invariants(lift_with_area(oval_curve, [0.0, 0.0]), samples=256)
    cyl = cylindricity_test(c)
    assert cyl.cylindrical and np.max(np.abs(cyl.residual)) < 1e-6
    pd = projective_density(c)
    simple = {round(z.u, 6) for z in pd.zeros if not z.tangential and z.u < c.grid[-1] - 1e-9}
    assert len(simple) >= 6


@given(st.integers(0, 2 ** 31 - 1))
def test_spatial_invariants_equiaffine(seed):
    rng = np.random.default_rng(seed)
    A = random_sl(rng, 3, 0.3)
    base = helix(wobble=0.05)
    c0 = spatial_invariants(base, samples=128)
    c1 = spatial_invariants(base.mapped(A, rng.standard_normal(3)), samples=128)
    np.testing.assert_allclose(c1.rho, c0.rho, atol=1e-8)
    np.testing.assert_allclose(c1.tau, c0.tau, atol=1e-8)
