import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _helpers import GRAPH_TERMS, graph_fixture, random_sl
from affine_focal.affine_curves import reparam_affine_planar
from affine_focal.curves import (ellipse, ellipsoidal_curve, fourier_oval, latitude, parametric_poly,
                                 parse_curve)
from affine_focal.darboux3 import (CUSPIDAL_EDGE, DEGENERATE, SMOOTH, SWALLOWTAIL, check_nondegenerate,
                                   classify_by_distance, classify_singularity, complete_frame,
                                   constant_Q_test, darboux_frame, developability_residual,
                                   edge_coefficients, flattening_points, focal_sheet, sheet_distance,
                                   sheet_point, visual_contour_test)
from affine_focal.errors import ContainmentError, DegeneratePoint, GaugeError
from affine_focal.fixtures import FIXTURES
from affine_focal.surfaces import (ImplicitPoly, ellipsoid, graph_curve, graph_surface, mapped_pair,
                                   on_surface, parse_surface, sphere, support_curve)


@pytest.fixture(scope="module")
def perturbed_frame():
    spec = FIXTURES["perturbed-ellipsoid"]["spec"]
    return darboux_frame(on_surface(parse_curve(spec["curve"]), parse_surface(spec["surface"])))


@pytest.fixture(scope="module")
def ellipsoid_frame():
    e = ellipsoidal_curve(1.5, 1.0, 0.8, [[0, 0.3, 0.0], [2, 0.1, 0.05]])
    return darboux_frame(on_surface(e, ellipsoid(1.5, 1.0, 0.8)))


def assert_frame_ok(f, tol=1e-8):
    for key, val in f.residuals().items():
        assert val < tol, key


# -- non-degeneracy --------------------------------------------------------------------

def test_nondegeneracy_examples():
    # latitude at height h in the angle: |phi'' . n| = 1 - h^2
    rep = check_nondegenerate(on_surface(latitude(0.6), sphere()))
    assert rep.min_value == pytest.approx(0.64, abs=1e-12)
    rep = check_nondegenerate(on_surface(latitude(0.0), sphere()))
    assert rep.min_value == pytest.approx(1.0, abs=1e-12)
    cylinder = ImplicitPoly([(2, 0, 0, 1.0), (0, 2, 0, 1.0), (0, 0, 0, -1.0)])
    ruling = parametric_poly([[1.0], [0.0], [0.0, 1.0]])
    with pytest.raises(DegeneratePoint):
        check_nondegenerate(on_surface(ruling, cylinder))


def test_curve_off_surface_rejected():
    with pytest.raises(ContainmentError):
        darboux_frame(on_surface(latitude(0.6), sphere(2.0)))


def test_gauge_must_be_positive():
    with pytest.raises(GaugeError):
        darboux_frame(on_surface(latitude(0.6), sphere()), gauge=0.0)


# -- frame on the fixtures -------------------------------------------------------------

def test_latitude_frame(latitude_frame):
    f = latitude_frame
    assert_frame_ok(f)
    # symmetry: constant speed, so t is affine in u
    assert np.ptp(np.diff(f.t)) < 1e-10
    assert np.ptp(f.sigma) < 1e-8 and np.max(np.abs(f.tau)) < 1e-10
    vc = visual_contour_test(f)
    np.testing.assert_allclose(vc.point, [0.0, 0.0, 1 / 0.6], atol=1e-8)
    # with lambda0 = 0, eta = phi'' and Q is the centre of the latitude circle
    np.testing.assert_allclose(constant_Q_test(f).point, [0.0, 0.0, 0.6], atol=1e-8)
    assert focal_sheet(f).degenerate
    # Q(a) = (mu Q0 + a sigma O) / (mu + a sigma): the sphere centre needs a = -0.36 mu / sigma
    a = -0.36 * f.mu[0] / f.sigma[0]
    np.testing.assert_allclose(constant_Q_test(complete_frame(f, a)).point, 0.0, atol=1e-8)


def test_cone_frame(cone_frame):
    f = cone_frame
    assert_frame_ok(f)
    np.testing.assert_allclose(f.sigma, -1.0, atol=1e-10)
    np.testing.assert_allclose(f.rho, 1.0, atol=1e-10)
    np.testing.assert_allclose(f.tau, 0.0, atol=1e-10)
    np.testing.assert_allclose(f.lam, 0.0, atol=1e-10)
    np.testing.assert_allclose(f.mu, 1.0, atol=1e-10)
    np.testing.assert_allclose(f.xi, f.phi, atol=1e-10)
    np.testing.assert_allclose(visual_contour_test(f).point, 0.0, atol=1e-8)
    np.testing.assert_allclose(constant_Q_test(f).point, [0.0, 0.0, 1.0], atol=1e-8)
    sh = focal_sheet(f)
    assert sh.degenerate
    np.testing.assert_allclose(sh.points[..., :2], 0.0, atol=1e-8)
    assert set(sh.labels.ravel()) == {DEGENERATE}
    assert flattening_points(f).identically_zero


def test_ellipsoid_section_passes_gauge_check(ellipsoid_frame):
    f = ellipsoid_frame
    assert_frame_ok(f)
    # generic curve on an ellipsoid is not a visual contour
    assert visual_contour_test(f).point is None
    assert np.nanmax(np.abs(developability_residual(f))) < 1e-6


@pytest.mark.parametrize("a", [-2.0, 0.7, 3.0])
def test_lambda0_moves_Q_along_focal_line(cone_frame, a):
    g = complete_frame(cone_frame, a)
    np.testing.assert_allclose(g.mu, cone_frame.mu + a * cone_frame.sigma, atol=1e-12)
    # O fixed, Q slides along the axis: Q = Q0 / (1 - a) since sigma = -1, mu = 1
    np.testing.assert_allclose(visual_contour_test(g).point, 0.0, atol=1e-8)
    np.testing.assert_allclose(constant_Q_test(g).point, [0.0, 0.0, 1.0 / (1.0 - a)], atol=1e-8)
    np.testing.assert_allclose(focal_sheet(g).points[..., :2], 0.0, atol=1e-8)


# -- gauge and lambda0 invariance ------------------------------------------------------

def test_gauge_rescales_invariants_but_not_sheet(graph_frame):
    a = 2.0
    g = darboux_frame(graph_fixture(), gauge=a)
    assert_frame_ok(g)
    np.testing.assert_allclose(g.sigma, a ** -3 * graph_frame.sigma, atol=1e-10)
    s1, s2 = focal_sheet(graph_frame), focal_sheet(g)
    assert sheet_distance(s2.points, s1) < 1e-6
    assert sheet_distance(s1.points, s2) < 1e-6


def test_lambda0_invariance(graph_frame):
    g = complete_frame(graph_frame, graph_frame.lambda0 + 1.0)
    np.testing.assert_allclose(g.mu, graph_frame.mu + graph_frame.sigma, atol=1e-10)
    s1, s2 = focal_sheet(graph_frame), focal_sheet(g)
    np.testing.assert_allclose(s2.points, s1.points, atol=1e-8)
    assert np.array_equal(s1.labels, s2.labels)
    assert s1.edge_labels == s2.edge_labels
    assert len(s1.swallowtails) == len(s2.swallowtails)


@settings(max_examples=5)
@given(st.integers(0, 2 ** 31 - 1))
def test_equiaffine_equivariance(seed):
    rng = np.random.default_rng(seed)
    A = random_sl(rng, 3, 0.3)
    b = rng.standard_normal(3)
    curve = graph_curve(ellipse(0.8, 0.6, (0.1, 0.05)), GRAPH_TERMS)
    surf = graph_surface(GRAPH_TERMS)
    f0 = darboux_frame(on_surface(curve, surf))
    f1 = darboux_frame(mapped_pair(curve, surf, A, b))
    np.testing.assert_allclose(f1.sigma, f0.sigma, atol=1e-8)
    np.testing.assert_allclose(f1.mu, f0.mu, atol=1e-8)
    s0, s1 = focal_sheet(f0, classify=False), focal_sheet(f1, classify=False)
    assert sheet_distance(s0.points @ A.T + b, s1) < 1e-6
    np.testing.assert_allclose(s1.edge_points, s0.edge_points @ A.T + b, atol=1e-6)


# -- focal sheet and singularities -----------------------------------------------------

def test_mesh_points_on_lines(graph_frame):
    sh = focal_sheet(graph_frame)
    lhs = sh.a * graph_frame.sigma[:, None] + sh.b * graph_frame.mu[:, None]
    np.testing.assert_allclose(lhs, 1.0, atol=1e-10)
    assert np.nanmax(np.abs(developability_residual(graph_frame))) < 1e-6


def test_classifier_matches_distance_oracle(perturbed_frame, rng):
    f = perturbed_frame
    sh = focal_sheet(f)
    probes = 0
    for _ in range(24):
        u = rng.uniform(f.grid[0], f.grid[-1])
        j = f.at(u)
        s, m = j["sigma"].value[0], j["mu"].value[0]
        t = rng.uniform(-1, 1)
        ab = (s / (s * s + m * m) + t * m, m / (s * s + m * m) - t * s)
        x = sheet_point(f, u, ab, j)
        assert classify_singularity(f, u, ab, jets=j) == classify_by_distance(f, u, x, jets=j)
        probes += 1
    labels = set()
    for u in f.grid[::16]:
        j = f.at(u)
        ea, eb, _ = edge_coefficients(j)
        ab = (float(ea[0]), float(eb[0]))
        lab = classify_singularity(f, u, ab, jets=j)
        assert lab == classify_by_distance(f, u, sheet_point(f, u, ab, j), jets=j)
        labels.add(lab)
        probes += 1
    for u, x, ab in sh.swallowtails:
        j = f.at(u)
        assert classify_singularity(f, u, ab, jets=j) == SWALLOWTAIL
        assert classify_by_distance(f, u, x, jets=j) == SWALLOWTAIL
        probes += 1
    assert probes >= 20
    assert labels == {CUSPIDAL_EDGE}
    assert len(sh.swallowtails) >= 2


def test_generic_point_is_smooth(perturbed_frame):
    f = perturbed_frame
    sh = focal_sheet(f)
    assert np.mean(sh.labels == SMOOTH) > 0.9
    assert set(sh.edge_labels) == {CUSPIDAL_EDGE}


def test_quadric_edge_collapses(ellipsoid_frame):
    # on a quadric all affine normal lines pass through the centre
    sh = focal_sheet(ellipsoid_frame)
    assert set(sh.edge_labels) == {DEGENERATE}
    assert sh.swallowtails == []


def test_off_line_point_rejected(graph_frame):
    with pytest.raises(ValueError):
        classify_singularity(graph_frame, graph_frame.grid[3], (0.0, 0.0))


# -- flattening points -----------------------------------------------------------------

def test_support_curve_flattening_points(oval_curve):
    f = darboux_frame(support_curve(oval_curve, [0.0, 0.0]))
    assert_frame_ok(f, 1e-7)
    # tau = -rho' on this curve
    np.testing.assert_allclose(f.tau, -oval_curve.rho_prime_at(oval_curve.grid), atol=1e-8)
    fl = flattening_points(f)
    assert fl.count >= 6
    assert fl.count == 12

