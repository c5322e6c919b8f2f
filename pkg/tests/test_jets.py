import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from affine_focal import _kernels_py, kernels
from affine_focal.jets import Jet, cross, det, det2, det3, dot

ORDER = 8
t_sym = sp.symbols("t")


def taylor(expr, t0, order=ORDER):
    """Oracle: derivative values of a sympy expression at t0."""
    return np.array([float(sp.diff(expr, t_sym, k).subs(t_sym, t0)) for k in range(order + 1)])


@pytest.mark.parametrize("name,build,expr", [
    ("sin*exp", lambda t: t.sin() * t.exp(), sp.sin(t_sym) * sp.exp(t_sym)),
    ("log(2+cos)", lambda t: (t.cos() + 2.0).log(), sp.log(2 + sp.cos(t_sym))),
    ("power", lambda t: (t * t + 1.0).power(-0.75), (t_sym ** 2 + 1) ** sp.Rational(-3, 4)),
    ("quotient", lambda t: t.sin() / (t.cos() + 3.0), sp.sin(t_sym) / (sp.cos(t_sym) + 3)),
    ("sqrt", lambda t: (t * 0.5 + 2.0).sqrt(), sp.sqrt(t_sym / 2 + 2)),
])
def test_univariate_against_sympy(name, build, expr):
    t0 = 0.37
    j = build(Jet.variable(np.array([t0]), ORDER))
    np.testing.assert_allclose(j.derivatives()[:, 0], taylor(expr, t0), rtol=1e-10, atol=1e-10)


def test_bivariate_against_sympy():
    x, y = sp.symbols("x y")
    expr = sp.sin(x) * sp.exp(y) + x ** 2 * y ** 3
    X, Y = Jet.variables2(0.3, -0.2, 6)
    j = X.sin() * Y.exp() + X * X * Y * Y * Y
    for k in range(4):
        for l in range(4 - k):
            want = float(sp.diff(expr, x, k, y, l).subs({x: 0.3, y: -0.2}))
            assert j.derivative(k, l) == pytest.approx(want, rel=1e-12, abs=1e-12)


def test_compose_and_revert_roundtrip():
    t = Jet.variable(np.zeros(3), 10)
    f = (t.sin() * 2.0 + t * t)            # f(0) = 0, f'(0) = 2
    g = f.revert()
    ident = f.compose(g)
    np.testing.assert_allclose(ident.c[1], 1.0, atol=1e-13)
    np.testing.assert_allclose(ident.c[2:], 0.0, atol=1e-11)


def test_shift_and_eval():
    t = Jet.variable(np.array([0.0]), 12)
    e = t.exp()
    np.testing.assert_allclose(e.eval_at(0.1), np.exp(0.1), rtol=1e-13)
    s = e.shift(np.array([0.1]))
    np.testing.assert_allclose(s.derivatives()[:4, 0], np.exp(0.1), rtol=1e-10)


def test_integ_deriv_inverse():
    t = Jet.variable(np.array([0.2, 0.5]), 7)
    f = t.cos() * t
    np.testing.assert_allclose(f.integ().deriv().c, f.c, atol=1e-15)


def test_vector_helpers():
    t = Jet.variable(np.array([0.4]), 5)
    a = Jet.stack([t.cos(), t.sin(), t * 0.0 + 1.0])
    b = Jet.stack([t, t * t, t.exp()])
    c = Jet.stack([t * 0.0 + 1.0, t, t * 3.0])
    av, bv, cv = a.value, b.value, c.value
    np.testing.assert_allclose(dot(a, b).value, np.sum(av * bv, -1))
    np.testing.assert_allclose(cross(a, b).value, np.cross(av, bv))
    np.testing.assert_allclose(det3(a, b, c).value, np.linalg.det(np.stack([av, bv, cv], -1)))
    np.testing.assert_allclose(det([a, b, c]).value, det3(a, b, c).value)
    np.testing.assert_allclose(det2(a[..., :2], b[..., :2]).value,
                               av[:, 0] * bv[:, 1] - av[:, 1] * bv[:, 0])


@given(st.integers(1, 10), st.integers(1, 6), st.integers(0, 2 ** 31 - 1))
def test_kernels_backends_agree_cauchy1(order, batch, seed):
    rng = np.random.default_rng(seed)
    a, b = rng.standard_normal((2, order + 1, batch))
    np.testing.assert_allclose(kernels.cauchy1(a, b), _kernels_py.cauchy1(a, b), atol=1e-13)
    # product of polynomials truncated at the order
    full = np.array([np.convolve(a[:, i], b[:, i])[:order + 1] for i in range(batch)]).T
    np.testing.assert_allclose(_kernels_py.cauchy1(a, b), full, atol=1e-12)


@given(st.integers(1, 6), st.integers(0, 2 ** 31 - 1))
def test_kernels_backends_agree_cauchy2(order, seed):
    rng = np.random.default_rng(seed)
    a, b = rng.standard_normal((2, order + 1, order + 1, 3))
    np.testing.assert_allclose(kernels.cauchy2(a, b), _kernels_py.cauchy2(a, b), atol=1e-12)


@given(st.booleans(), st.integers(0, 2 ** 31 - 1))
def test_kernels_backends_agree_stencil_rk4(periodic, seed):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((40, 2))
    off = np.arange(-3, 4, dtype=np.int64)
    w = rng.standard_normal(7)
    np.testing.assert_allclose(kernels.stencil_apply(v, off, w, periodic),
                               _kernels_py.stencil_apply(v, off, w, periodic), atol=1e-13)
    fn, fm = rng.standard_normal(33), rng.standard_normal(32)
    np.testing.assert_array_equal(kernels.rk4_tabulated(fn, fm, 0.1, 1.0),
                                  _kernels_py.rk4_tabulated(fn, fm, 0.1, 1.0))


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")
