import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from affine_focal.affine_curves import reparam_affine_planar
from affine_focal.curves import circle, ellipse, fourier_oval, spherical_curve
from affine_focal.errors import (ApexOnHyperplane, DegenerateTangent, EmptySection, NonSimpleEigenvalue,
                                 SpecError)
from affine_focal.focal_n import (A_SYM, B_SYM, FrameData, QuadricSpace, bifurcation_polynomial,
                                  commuting_and_semiumbilic, envelope_tangent_spaces,
                                  hyperplane_section_fixture, locus_summary, parse_frame_data,
                                  product_curves_fixture, product_locus_distance, quadric_section_fixture,
                                  random_frame_data, regularity_probe, sample_locus, umbilic_frame_data)
from affine_focal.umbilic import construct_umbilic
from affine_focal.blaschke import sphere_patch

a, b = A_SYM, B_SYM
SPHERE = QuadricSpace((1, 1, 1))


@pytest.fixture(scope="module")
def circle_a():
    return reparam_affine_planar(circle(), samples=64)


@pytest.fixture(scope="module")
def oval_a():
    return reparam_affine_planar(fourier_oval([1.0, 0.0, 0.0, 0.05]), samples=128)


# -- bifurcation polynomial -----------------------------------------------------------

def test_n1_polynomial_is_the_line():
    fd = FrameData(1, [0.0], [[0.75]], [[[-2.5]]])
    loc = bifurcation_polynomial(fd, 0)
    assert sp.expand(loc.poly.as_expr() - (1 - sp.Rational(3, 4) * b + sp.Rational(5, 2) * a)) == 0
    assert loc.degree == 1 and len(loc.line_factors) == 1


@pytest.mark.parametrize("n", [2, 3, 4])
def test_umbilic_locus_single_line(n):
    fd = umbilic_frame_data(n, 2.0, 0.5)
    loc = bifurcation_polynomial(fd, 0)
    assert sp.expand(loc.poly.as_expr() - (1 - b / 2 - 2 * a) ** n) == 0
    summary = locus_summary(loc)
    assert summary["single_line"] and summary["multiplicities"] == [n]
    rep = commuting_and_semiumbilic(fd, 0)
    assert rep.commute
    assert len(set(rep.lines)) == 1
    if n == 2:
        assert rep.semiumbilic


def test_product_of_unit_circles(circle_a):
    fx = product_curves_fixture(circle_a, circle_a, 16, 16)
    r, s = a + b, a
    for k in range(len(fx.frame_data)):
        loc = bifurcation_polynomial(fx.frame_data, k)
        assert sp.expand(loc.poly.as_expr() - (1 - r) * (1 - s)) == 0
        # the source's sign convention: (1 - r)(-1 + s)
        assert sp.expand(loc.signed_poly.as_expr() - (1 - r) * (-1 + s)) == 0
        # lines a + b = 1 and a = 1, each up to an overall sign
        lines = {(al, be, ga) if al > 0 else (-al, -be, -ga) for al, be, ga, _ in loc.line_factors}
        assert lines == {(1, 1, -1), (1, 0, -1)}
    rep = commuting_and_semiumbilic(fx.frame_data, 0)
    assert rep.commute and len(set(rep.lines)) == 2
    worst, npts = product_locus_distance(fx, range(0, len(fx.frame_data), 7), count=8)
    assert worst < 1e-6 and npts > 0


def test_circle_times_ellipse(circle_a):
    e = reparam_affine_planar(ellipse(2.0, 1.0), samples=64)
    fx = product_curves_fixture(circle_a, e, 16, 16)
    np.testing.assert_allclose(fx.evolute_alpha, 0.0, atol=1e-12)
    np.testing.assert_allclose(fx.evolute_beta, 0.0, atol=1e-12)
    worst, _ = product_locus_distance(fx, range(0, len(fx.frame_data), 5), count=8)
    assert worst < 1e-6


def test_oval_times_circle_locus(oval_a, circle_a):
    fx = product_curves_fixture(oval_a, circle_a, 4, 32)
    worst, npts = product_locus_distance(fx, range(0, len(fx.frame_data), 3), count=8)
    assert worst < 1e-6 and npts >= 200


@settings(max_examples=25)
@given(st.integers(1, 4), st.integers(0, 2 ** 31 - 1), st.booleans())
def test_degree_bound_and_normalization(n, seed, integer):
    fd = random_frame_data(np.random.default_rng(seed), n, 4, integer=integer)
    for k in range(len(fd)):
        loc = bifurcation_polynomial(fd, k)
        assert loc.degree <= n
        assert loc.coeffs.get((0, 0)) == 1


def test_degree_bound_hundred_samples(rng):
    for n in (2, 3):
        fd = random_frame_data(rng, n, 50, integer=True)
        assert all(bifurcation_polynomial(fd, k).degree <= n for k in range(len(fd)))


@settings(max_examples=15)
@given(st.integers(0, 2 ** 31 - 1))
def test_commuting_data_factor_into_lines(seed):
    rng = np.random.default_rng(seed)
    # S_2 with a repeated eigenvalue, S_1 block-symmetric: they commute
    mu = np.array([1.0, 1.0, -0.5])
    B = rng.integers(-3, 4, (2, 2)).astype(float)
    S1 = np.zeros((3, 3))
    S1[:2, :2] = (B + B.T) / 2
    S1[2, 2] = float(rng.integers(-3, 4))
    fd = FrameData(3, [0.0], mu[None], S1[None])
    rep = commuting_and_semiumbilic(fd, 0)
    assert rep.commute
    prod = sp.Integer(1)
    for s_k, m_k in rep.lines:
        prod *= 1 - b * sp.Float(m_k, 30) - a * sp.Float(s_k, 30)
    q = bifurcation_polynomial(fd, 0).poly
    diff = sp.Poly(sp.expand(prod - q.as_expr()), a, b)
    assert max((abs(float(c)) for c in diff.coeffs()), default=0.0) < 1e-12


def test_random_symmetric_pair_does_not_commute(rng):
    fd = random_frame_data(rng, 2, 20)
    for k in range(len(fd)):
        rep = commuting_and_semiumbilic(fd, k)
        if rep.commutator_norm > 0.1:
            assert not rep.commute
    assert any(not commuting_and_semiumbilic(fd, k).commute for k in range(len(fd)))


def test_sample_locus_points_are_zeros(rng):
    fd = random_frame_data(rng, 2, 3)
    for k in range(3):
        loc = bifurcation_polynomial(fd, k)
        f = sp.lambdify((a, b), loc.poly.as_expr())
        pts = sample_locus(loc, 2.0, 16)
        for p in pts:
            assert abs(f(*p)) < 1e-8 * max(1.0, np.abs(p).max() ** 2)


# -- regularity ----------------------------------------------------------------------

def test_regularity_probe(oval_a, circle_a):
    fx = product_curves_fixture(oval_a, circle_a, 1, 64)
    fd = fx.frame_data
    dmu = fd.extras["dmu1"]
    k = int(np.argmax(np.abs(dmu)))
    rep = regularity_probe(fd, k, True, dmu[k])
    assert rep.smooth
    assert rep.tangent_basis == ["X2", "xi", "eta"]
    assert rep.zeta == pytest.approx((fd.mu[k, 0], -fd.sigma_mat[k, 0, 0]))
    # circle factor: mu_1 constant
    cx = product_curves_fixture(circle_a, oval_a, 16, 64)
    assert not regularity_probe(cx.frame_data, 0, True, cx.frame_data.extras["dmu1"][0]).smooth
    with pytest.raises(NonSimpleEigenvalue):
        regularity_probe(umbilic_frame_data(2, 1.0, 1.0), 0, True, 1.0)
    with pytest.raises(ValueError):
        regularity_probe(fd, k, False, dmu[k])


# -- n = 1 cross-check with the Darboux pipeline --------------------------------------

def test_n1_line_matches_focal_sheet(graph_frame):
    from affine_focal.darboux3 import focal_sheet
    f = graph_frame
    fd = FrameData(1, f.grid, f.mu[:, None], f.sigma[:, None, None])
    sh = focal_sheet(f, classify=False, find_swallowtails=False)
    worst = 0.0
    for k in range(0, len(fd), 8):
        al, be, ga, _ = bifurcation_polynomial(fd, k).line_factors[0]
        al, be, ga = float(al), float(be), float(ga)
        d = np.abs(al * sh.a[k] + be * sh.b[k] + ga) / np.hypot(al, be)
        worst = max(worst, float(np.max(d)))
    assert worst < 1e-8


# -- quadric and hyperplane sections -----------------------------------------------------

def test_sphere_latitude_section_is_umbilic():
    qs = quadric_section_fixture(SPHERE, ([0.0, 0.0, 1.0], 0.6))
    assert qs.umbilic and qs.hyperplanar
    point, direction = qs.focal_line
    assert abs(abs(direction[2]) - 1.0) < 1e-8
    np.testing.assert_allclose(point[:2], 0.0, atol=1e-8)
    assert qs.xi_parallel_residual < 1e-6


def test_tilted_sphere_section_is_umbilic():
    n = np.array([0.3, 0.2, 1.0])
    qs = quadric_section_fixture(SPHERE, (n, 0.5))
    assert qs.umbilic
    point, direction = qs.focal_line
    nh = n / np.linalg.norm(n)
    assert abs(abs(direction @ nh) - 1.0) < 1e-8
    # the axis passes through the sphere's centre
    assert np.linalg.norm(point - (point @ nh) * nh) < 1e-8


def test_hyperboloid_section_is_umbilic():
    qs = quadric_section_fixture(QuadricSpace((1, 1, -1)), ([0.0, 0.0, 1.0], 2.0))
    assert qs.umbilic and qs.hyperplanar


def test_nonplanar_spherical_curve_is_not_umbilic():
    c = spherical_curve([[0, 0.6, 0.0], [3, 0.0, 0.1]])
    qs = quadric_section_fixture(SPHERE, curve=c)
    assert not qs.umbilic and not qs.hyperplanar
    assert qs.mu_spread > 1e-3


def test_section_errors():
    with pytest.raises(EmptySection):
        quadric_section_fixture(SPHERE, ([0.0, 0.0, 1.0], 2.0))
    with pytest.raises(DegenerateTangent):
        quadric_section_fixture(QuadricSpace((1, 1, -1)), ([1.0, 0.0, 0.0], 0.5))


def test_hyperplane_sections(cone_frame):
    L = ([0.0, 0.0, 1.0], 1.0)
    hc = hyperplane_section_fixture(L, circle(), [0.0, 0.0, 0.0])
    assert hc.umbilic and hc.sigma_spread < 1e-8 and hc.mu_spread < 1e-8
    np.testing.assert_allclose(hc.frame.sigma, cone_frame.sigma, atol=1e-8)
    he = hyperplane_section_fixture(L, ellipse(2.0, 1.0, (0.2, 0.1)), [0.0, 0.0, 0.0])
    assert he.umbilic and he.mu_spread < 1e-8
    point, direction = he.focal_line
    # the focal line joins the apex and the ellipse centre in L
    centre = he.affine_sphere_centre
    cross = np.cross(direction, centre / np.linalg.norm(centre))
    assert np.linalg.norm(cross) < 1e-8 and np.linalg.norm(np.cross(direction, point)) < 1e-8
    ho = hyperplane_section_fixture(L, fourier_oval([1.0, 0.0, 0.0, 0.05]), [0.0, 0.0, 0.0])
    assert not ho.umbilic and ho.mu_spread > 1e-3
    with pytest.raises(ApexOnHyperplane):
        hyperplane_section_fixture(L, circle(), [0.0, 0.0, 1.0])


# -- envelope of tangent spaces --------------------------------------------------------

def test_envelope_marks(cone_frame, latitude_frame):
    env = envelope_tangent_spaces(cone_frame)
    np.testing.assert_allclose(env.marks, 0.0, atol=1e-8)
    # the envelope is the cone x^2 + y^2 = z^2 itself
    p = env.points.reshape(-1, 3)
    np.testing.assert_allclose(p[:, 0] ** 2 + p[:, 1] ** 2, p[:, 2] ** 2, atol=1e-8)
    env = envelope_tangent_spaces(latitude_frame)
    np.testing.assert_allclose(env.marks, np.broadcast_to([0.0, 0.0, 1 / 0.6], env.marks.shape),
                               atol=1e-8)
    m = construct_umbilic(sphere_patch(), [0.0, 0.0, 0.0], samples=6)
    env = envelope_tangent_spaces(m)
    np.testing.assert_allclose(env.marks, 0.0, atol=1e-12)


# -- input validation ----------------------------------------------------------------

def test_frame_data_validation():
    with pytest.raises(ValueError):
        FrameData(2, [0.0], [[1.0, 2.0]], [[[1.0, 0.5], [0.0, 1.0]]])
    with pytest.raises(SpecError):
        parse_frame_data({"n": 2, "mu": [[1.0]]})
    fd = parse_frame_data({"n": 2, "mu": [[1.0, 2.0]], "sigma": [[[1.0, 0.5], [0.5, 1.0]]],
                           "signature": [1, -1]})
    assert len(fd) == 1 and fd.h1.shape == (1, 2, 2)
