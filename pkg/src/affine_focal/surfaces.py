"""Surfaces in 3-space and curves lying on them.

A surface supplies a (not necessarily unit) normal along a curve as a
jet in the curve parameter, and a containment residual.  Implicit
surfaces evaluate their gradient in jet arithmetic; a cone over a base
curve needs the curve parameter to be the base-curve parameter.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .curves import AnalyticCurve, parse_curve
from .errors import SpecError
from .jets import Jet, cross, matvec


class Surface:
    name = "surface"

    def normal(self, t, p):
        """Normal along the curve: ``t`` parameter jet, ``p`` position jet."""
        raise NotImplementedError

    def residual(self, t, p):
        """Containment residual per sample (t, p plain arrays)."""
        raise NotImplementedError

    def mapped(self, A, b=None):
        return MappedSurface(self, A, b)


class ImplicitPoly(Surface):
    """Zero set of sum c x^i y^j z^k over ``terms = [(i, j, k, c), ...]``."""

    def __init__(self, terms, name="implicit_poly"):
        self.terms = [(int(i), int(j), int(k), float(c)) for i, j, k, c in terms]
        self.name = name

    def _value(self, x, y, z):
        out = 0.0
        for i, j, k, c in self.terms:
            out = out + c * x ** i * y ** j * z ** k
        return out

    def _gradient_jet(self, p):
        x, y, z = p[..., 0], p[..., 1], p[..., 2]
        comps = [None, None, None]
        for i, j, k, c in self.terms:
            for axis, (e, var) in enumerate(((i, x), (j, y), (k, z))):
                if e == 0:
                    continue
                exps = [i, j, k]
                exps[axis] -= 1
                term = _monomial(x, y, z, exps) * (c * e)
                comps[axis] = term if comps[axis] is None else comps[axis] + term
        zero = x * 0.0
        return Jet.stack([zero if g is None else g for g in comps])

    def normal(self, t, p):
        return self._gradient_jet(p)

    def residual(self, t, p):
        p = np.asarray(p, float)
        val = self._value(p[:, 0], p[:, 1], p[:, 2])
        grad = self._gradient_jet(Jet(p[None], 1)).value
        return np.abs(val) / np.maximum(np.linalg.norm(grad, axis=-1), 1e-300)


def _monomial(x, y, z, exps):
    out = None
    for var, e in zip((x, y, z), exps):
        if e == 0:
            continue
        f = var ** e if e > 1 else var
        out = f if out is None else out * f
    if out is None:
        return x * 0.0 + 1.0
    return out


def sphere(r=1.0, center=(0.0, 0.0, 0.0)):
    cx, cy, cz = (float(v) for v in center)
    terms = [(2, 0, 0, 1.0), (0, 2, 0, 1.0), (0, 0, 2, 1.0),
             (1, 0, 0, -2 * cx), (0, 1, 0, -2 * cy), (0, 0, 1, -2 * cz),
             (0, 0, 0, cx * cx + cy * cy + cz * cz - r * r)]
    s = ImplicitPoly([t for t in terms if t[3] != 0.0], f"sphere({r})")
    s.center = np.array(center, float)
    return s


def ellipsoid(a, b, c):
    s = ImplicitPoly([(2, 0, 0, 1 / a ** 2), (0, 2, 0, 1 / b ** 2), (0, 0, 2, 1 / c ** 2),
                      (0, 0, 0, -1.0)], f"ellipsoid({a},{b},{c})")
    s.center = np.zeros(3)
    return s


class Cone(Surface):
    """Cone with the given apex over a base curve B; points A + v (B(theta) - A).

    Curves on the cone must be parametrized by the base-curve parameter theta.
    """

    def __init__(self, apex, base: AnalyticCurve):
        self.apex = np.asarray(apex, float)
        if base.dim != 3:
            raise SpecError("cone base curve must be a curve in 3-space")
        self.base = base
        self.name = "cone"

    def normal(self, t, p):
        B = self.base(t)
        return cross(B.deriv(), B - self.apex)

    def residual(self, t, p):
        B = self.base.jets(t, 0)[0] - self.apex
        rel = np.asarray(p, float) - self.apex
        return np.linalg.norm(np.cross(rel, B), axis=-1) / np.linalg.norm(B, axis=-1)


class MappedSurface(Surface):
    """Image of a surface under x -> A x + b."""

    def __init__(self, base, A, b=None):
        self.base = base
        self.A = np.asarray(A, float)
        self.b = np.zeros(3) if b is None else np.asarray(b, float)
        self.Ainv = np.linalg.inv(self.A)
        self.name = f"mapped({base.name})"

    def normal(self, t, p):
        q = matvec(self.Ainv, p - self.b)
        return matvec(self.Ainv.T, self.base.normal(t, q))

    def residual(self, t, p):
        q = (np.asarray(p, float) - self.b) @ self.Ainv.T
        return self.base.residual(t, q)


@dataclass
class CurveOnSurface:
    """Bundle source ``t -> {"x": position, "n": normal}`` on [t0, t1]."""

    source: Callable
    t0: float
    t1: float
    residual: Callable
    periodic: bool = True
    name: str = "curve_on_surface"

    def containment_residual(self, samples=1024):
        t = np.linspace(self.t0, self.t1, samples + 1)
        return float(np.max(self.residual(t)))


def on_surface(curve: AnalyticCurve, surface: Surface, name=None):
    def source(t):
        p = curve(t)
        return {"x": p, "n": surface.normal(t, p)}

    def residual(t):
        t = np.atleast_1d(np.asarray(t, float))
        return surface.residual(t, curve.jets(t, 0)[0])
    return CurveOnSurface(source, curve.t0, curve.t1, residual, curve.periodic,
                          name or f"{curve.name} on {surface.name}")


def mapped_pair(cs_curve: AnalyticCurve, surface: Surface, A, b=None):
    """(A curve + b) on (A surface + b)."""
    return on_surface(cs_curve.mapped(A, b), surface.mapped(A, b))


def cone_section(apex, base: AnalyticCurve, height_terms, name="cone_section"):
    """Curve A + v(t)(B(t) - A) on the cone over B, v a trigonometric series."""
    from .curves import _trig_series
    apex = np.asarray(apex, float)

    def f(t):
        v = _trig_series(t, height_terms)
        return (base(t) - apex) * v.v() + apex
    return AnalyticCurve(f, base.t0, base.t1, 3, base.periodic, name)


def graph_surface(terms, name="graph"):
    """Graph z = sum c x^i y^j over ``terms = [(i, j, c), ...]`` as an implicit polynomial."""
    return ImplicitPoly([(0, 0, 1, 1.0)] + [(i, j, 0, -float(c)) for i, j, c in terms], name)


def graph_curve(base: AnalyticCurve, terms, name="graph_curve"):
    """Lift of a planar curve to the graph z = sum c x^i y^j."""
    if base.dim != 2:
        raise SpecError("graph lift needs a planar base curve")

    def f(t):
        p = base(t)
        x, y = p[..., 0], p[..., 1]
        z = x * 0.0
        for i, j, c in terms:
            z = z + _monomial(x, y, None, [int(i), int(j), 0]) * float(c)
        return Jet.stack([x, y, z])
    return AnalyticCurve(f, base.t0, base.t1, 3, base.periodic, name)


def parse_surface(spec, base_dir=None):
    if not isinstance(spec, dict) or "kind" not in spec:
        raise SpecError("surface spec must be an object with a 'kind'")
    kind = spec["kind"]
    try:
        if kind == "sphere":
            return sphere(float(spec.get("r", 1.0)), tuple(spec.get("center", (0, 0, 0))))
        if kind == "ellipsoid":
            return ellipsoid(float(spec["a"]), float(spec["b"]), float(spec["c"]))
        if kind == "cone":
            base = parse_curve(spec["base_curve"], base_dir)
            if not isinstance(base, AnalyticCurve):
                raise SpecError("cone base curve must be analytic")
            return Cone(spec.get("apex", [0, 0, 0]), base)
        if kind == "graph":
            return graph_surface([tuple(t) for t in spec["terms"]])
        if kind == "implicit_poly":
            terms = spec["coeffs"]
            if not terms or any(len(t) != 4 for t in terms):
                raise SpecError("implicit_poly coeffs must be [[i, j, k, c], ...]")
            return ImplicitPoly(terms)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"bad {kind} surface spec: {exc}") from None
    raise SpecError(f"unknown surface kind {kind!r}")


def support_curve(c, O):
    """phi = (G', [G - O, G']) for a planar curve G in affine arc-length.

    It lies on the cone over itself with apex at the origin, and its
    parameter already makes phi''' tangent to that cone.
    """
    O = np.asarray(O, float)

    def source(t):
        d = c.at(t.value, min(c.jets.order, t.order + 1))
        G = Jet.from_derivatives(d)
        G1 = G.deriv()
        z = (G - O)[..., 0] * G1[..., 1] - (G - O)[..., 1] * G1[..., 0]
        x = Jet.stack([G1[..., 0], G1[..., 1], z])
        return {"x": x, "n": cross(x.deriv(), x)}

    def residual(t):
        return np.zeros(np.atleast_1d(t).shape)
    return CurveOnSurface(source, float(c.grid[0]), float(c.grid[-1]), residual,
                          c.closed, "support_curve")



def radial_curve(surface: ImplicitPoly, direction: AnalyticCurve, r0=1.0, name="radial_curve"):
    """Curve r(t) d(t) on a surface star-shaped about the origin: F(r d) = 0.

    r is found by Newton's method on values, then refined in jet
    arithmetic (each step doubles the number of correct coefficients).
    """
    if direction.dim != 3:
        raise SpecError("radial curve needs a direction curve in 3-space")

    def newton_step(d, r):
        p = d * r.v()
        g = surface._value(p[..., 0], p[..., 1], p[..., 2])
        dg = Jet((surface._gradient_jet(p) * d).c.sum(axis=-1), 1)
        return g / dg

    def f(t):
        d = direction(t)
        d0 = Jet(d.value[None], 1)
        r = Jet.const(np.full(d.batch_shape[:-1], float(r0)), 0)
        for _ in range(100):
            step = newton_step(d0, r)
            r = r - step
            if np.max(np.abs(step.value)) < 1e-15 * max(1.0, np.max(np.abs(r.value))):
                break
        rj = Jet.const(r.value, d.order)
        for _ in range(int(np.ceil(np.log2(d.order + 1))) + 2):
            rj = rj - newton_step(d, rj)
        return d * rj.v()
    return AnalyticCurve(f, direction.t0, direction.t1, 3, direction.periodic, name)
