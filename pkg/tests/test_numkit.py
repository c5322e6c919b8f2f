import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from affine_focal.errors import DimensionMismatch, DivergentODE, GridTooCoarse, NonUniformGrid, SpecError
from affine_focal.numkit import (DEFAULT_TOL, JetCurve, ToleranceConfig, batched_volume,
                                 derive_jets, fd_weights, integrate_ode, integrate_scalar_ode,
                                 integrate_tabulated, is_identically_zero, locate_zeros,
                                 read_curve_csv, volume_form)


def test_volume_form_examples():
    assert volume_form(np.eye(3)) == pytest.approx(1.0)
    assert volume_form(np.eye(3)[[1, 0, 2]]) == pytest.approx(-1.0)
    assert volume_form([[1, 0, 0], [1, 1, 0], [1, 1, 1]]) == pytest.approx(1.0)
    with pytest.raises(DimensionMismatch):
        volume_form([[1, 0, 0], [0, 1, 0]])


@given(st.integers(2, 4), st.integers(0, 2 ** 31 - 1))
def test_volume_form_multilinear_alternating(d, seed):
    rng = np.random.default_rng(seed)
    V = rng.standard_normal((d, d))
    w = rng.standard_normal(d)
    s = rng.standard_normal()
    W = V.copy()
    W[0] = s * V[0] + w
    U = V.copy()
    U[0] = w
    assert volume_form(W) == pytest.approx(s * volume_form(V) + volume_form(U), abs=1e-10)
    swapped = V[[1, 0] + list(range(2, d))]
    assert volume_form(swapped) == pytest.approx(-volume_form(V), abs=1e-12)
    np.testing.assert_allclose(batched_volume(*[V[None, i] for i in range(d)]), [volume_form(V)])


def test_tolerance_config_validation():
    with pytest.raises(ValueError):
        ToleranceConfig(tol_det=0.0)
    with pytest.raises(ValueError):
        ToleranceConfig(refine_depth=10)
    assert DEFAULT_TOL.tol_zero > 0


def test_fd_weights_known_stencil():
    w = fd_weights(0.0, [-1.0, 0.0, 1.0], 2)
    np.testing.assert_allclose(w[:, 1], [-0.5, 0.0, 0.5])
    np.testing.assert_allclose(w[:, 2], [1.0, -2.0, 1.0])


def test_derive_jets_circle():
    h = 1e-2
    u = np.arange(0.0, 2.0, h)
    jc = derive_jets(np.stack([np.cos(u), np.sin(u)], -1), u, 2)
    inner = ~jc.low_confidence
    np.testing.assert_allclose(jc.jets[2][inner], -np.stack([np.cos(u), np.sin(u)], -1)[inner],
                               atol=1e-6)
    assert jc.low_confidence[0] and jc.low_confidence[-1]


def test_derive_jets_polynomials():
    u = np.linspace(-1.0, 1.0, 41)
    cubic = np.stack([u ** 3 - u, 2 * u ** 3 + u ** 2], -1)
    jc = derive_jets(cubic, u, 3)
    np.testing.assert_allclose(jc.jets[3], np.tile([6.0, 12.0], (u.size, 1)), atol=1e-8)
    quad = np.stack([u, u ** 2 / 2], -1)
    jc = derive_jets(quad, u, 4)
    np.testing.assert_allclose(jc.jets[4], 0.0, atol=1e-6)


def test_derive_jets_errors():
    u = np.linspace(0, 1, 10)
    with pytest.raises(GridTooCoarse):
        derive_jets(np.stack([u, u], -1), u, 2)
    u = np.sort(np.random.default_rng(0).uniform(0, 1, 40))
    with pytest.raises(NonUniformGrid):
        derive_jets(np.stack([u, u], -1), u, 2)


def test_jetcurve_invariants():
    with pytest.raises(GridTooCoarse):
        JetCurve(np.linspace(0, 1, 10), np.zeros((3, 10, 2)))
    with pytest.raises(NonUniformGrid):
        JetCurve(np.r_[np.linspace(0, 1, 19), 0.5], np.zeros((3, 20, 2)))
    jc = JetCurve(np.linspace(0, 1, 16), np.zeros((3, 16, 2)))
    assert jc.dim == 2 and jc.order == 2


def test_integrate_ode_examples():
    g = np.linspace(0, 1, 1001)
    np.testing.assert_array_equal(integrate_scalar_ode(lambda u, y: 0.0, 1.0, g), 1.0)
    assert integrate_scalar_ode(lambda u, y: y, 1.0, g)[-1] == pytest.approx(np.e, abs=1e-8)
    g = np.linspace(0, 3, 3001)
    np.testing.assert_allclose(integrate_scalar_ode(lambda u, y: -np.sin(u), 0.0, g),
                               np.cos(g) - 1, atol=1e-8)
    with pytest.raises(DivergentODE):
        integrate_scalar_ode(lambda u, y: y * y, 1.0, np.linspace(0, 2, 201))


def test_integrate_ode_vector_fourth_order():
    errs = []
    for n in (50, 100):
        g = np.linspace(0, 2, n + 1)
        y = integrate_ode(lambda u, y: np.array([y[1], -y[0]]), [0.0, 1.0], g)
        errs.append(abs(y[-1, 0] - np.sin(2.0)))
    assert errs[0] / errs[1] == pytest.approx(16, rel=0.2)


def test_integrate_tabulated_exact_for_cubics():
    h = 0.1
    u = np.arange(0, 1 + h / 2, h)
    y = integrate_tabulated(u ** 3, (u[:-1] + h / 2) ** 3, h)
    np.testing.assert_allclose(y, u ** 4 / 4, atol=1e-14)


def test_locate_zeros_examples():
    u = np.linspace(0.1, 6.2, 2000)
    zs = locate_zeros(np.sin(u), u)
    assert len(zs) == 1 and zs[0].u == pytest.approx(np.pi, abs=1e-9)
    zs = locate_zeros(np.sin(u[::40]), u[::40], func=np.sin)
    assert zs[0].u == pytest.approx(np.pi, abs=1e-12)
    assert locate_zeros(np.ones(10), np.arange(10.0)) == []
    u = np.linspace(-1, 1, 201)
    zs = locate_zeros(u ** 2, u)
    assert len(zs) == 1 and zs[0].tangential and abs(zs[0].u) < 1e-12
    assert is_identically_zero(np.zeros(5))


def test_locate_zeros_periodic_seam():
    u = np.linspace(0, 2 * np.pi, 65)
    vals = np.sin(u)
    vals[0] = vals[-1] = 0.0
    zs = locate_zeros(vals, u, periodic=True)
    assert any(abs(z.u) < 1e-12 and not z.tangential for z in zs)


def test_read_curve_csv(tmp_path):
    p = tmp_path / "c.csv"
    u = np.linspace(0, 1, 20)
    p.write_text("u,x0,x1\n" + "\n".join(f"{a:.17g},{2 * a:.17g},{a * a:.17g}" for a in u) + "\n")
    grid, samples = read_curve_csv(p)
    np.testing.assert_array_equal(grid, u)
    assert samples.shape == (20, 2)
    bad = tmp_path / "bad.csv"
    bad.write_text("t,x,y\n0,1,2\n")
    with pytest.raises(SpecError):
        read_curve_csv(bad)
    bad.write_text("u,x0,x1\n0,1,oops\n")
    with pytest.raises(SpecError, match=":2"):
        read_curve_csv(bad)
