"""Analytic curve sources.

Each curve is a function of a parameter :class:`~affine_focal.jets.Jet`
returning a vector jet, so any number of derivatives is available.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import SpecError
from .jets import Jet
from .numkit import JetCurve, derive_jets, read_curve_csv

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class AnalyticCurve:
    func: Callable
    t0: float
    t1: float
    dim: int
    periodic: bool = False
    name: str = "curve"

    def __call__(self, t):
        return self.func(t)

    def jets(self, t, order):
        """Derivative values (order+1, len(t), dim) at parameters ``t``."""
        t = np.atleast_1d(np.asarray(t, float))
        return self.func(Jet.variable(t, order)).derivatives()

    def jet_curve(self, samples=256, order=4):
        grid = np.linspace(self.t0, self.t1, samples + 1)
        return JetCurve(grid, self.jets(grid, order), source="analytic",
                        evaluator=self.jets, closed=self.periodic,
                        meta={"name": self.name})

    def mapped(self, A, b=None, name=None):
        """Image of the curve under x -> A x + b."""
        A = np.asarray(A, float)
        b = np.zeros(self.dim) if b is None else np.asarray(b, float)

        def f(t):
            p = self.func(t)
            return Jet(np.einsum("ij,...j->...i", A, p.c), 1) + b
        return AnalyticCurve(f, self.t0, self.t1, self.dim, self.periodic, name or self.name)


def _trig_series(t, terms, linear=0.0, const=0.0):
    """sum of a cos(k t) + b sin(k t) over (k, a, b) terms, plus linear*t + const."""
    out = t * linear + const
    for k, a, b in terms:
        if k == 0:
            out = out + a
            continue
        kt = t * float(k)
        if a:
            out = out + kt.cos() * a
        if b:
            out = out + kt.sin() * b
    return out


def _poly(t, coeffs):
    out = Jet.const(np.full(t.batch_shape, float(coeffs[-1])), t.order)
    for c in reversed(coeffs[:-1]):
        out = out * t + float(c)
    return out


def ellipse(a=1.0, b=1.0, center=(0.0, 0.0)):
    def f(t):
        return Jet.stack([t.cos() * a + center[0], t.sin() * b + center[1]])
    return AnalyticCurve(f, 0.0, TWO_PI, 2, True, f"ellipse({a},{b})")


def circle(r=1.0):
    return ellipse(r, r)


def fourier_oval(cos_coeffs, sin_coeffs=()):
    """Polar curve r(t) = sum c_k cos(k t) + s_k sin(k t)."""
    cos_coeffs = list(cos_coeffs)
    sin_coeffs = list(sin_coeffs)
    n = max(len(cos_coeffs), len(sin_coeffs))
    terms = [(k, cos_coeffs[k] if k < len(cos_coeffs) else 0.0,
              sin_coeffs[k] if k < len(sin_coeffs) else 0.0) for k in range(n)]

    def f(t):
        r = _trig_series(t, terms)
        return Jet.stack([r * t.cos(), r * t.sin()])
    return AnalyticCurve(f, 0.0, TWO_PI, 2, True, f"fourier_oval{tuple(cos_coeffs)}")


def parametric_poly(coeff_lists, t0=-1.0, t1=1.0):
    def f(t):
        return Jet.stack([_poly(t, list(c)) for c in coeff_lists])
    return AnalyticCurve(f, t0, t1, len(coeff_lists), False, "parametric_poly")


def trig_curve(components, t0=0.0, t1=TWO_PI, periodic=None):
    """Each component: {"terms": [[k, a, b], ...], "linear": c, "const": c0}."""
    def f(t):
        return Jet.stack([_trig_series(t, comp.get("terms", []), comp.get("linear", 0.0),
                                       comp.get("const", 0.0)) for comp in components])
    if periodic is None:
        periodic = all(not comp.get("linear", 0.0) for comp in components) \
            and np.isclose(t1 - t0, TWO_PI)
    return AnalyticCurve(f, t0, t1, len(components), periodic, "trig")


def helix(radius=1.0, pitch=1.0, wobble=0.0, t0=0.0, t1=TWO_PI):
    """(r cos t, r sin t, pitch t + wobble sin 2t)."""
    def f(t):
        z = t * pitch
        if wobble:
            z = z + (t * 2.0).sin() * wobble
        return Jet.stack([t.cos() * radius, t.sin() * radius, z])
    return AnalyticCurve(f, t0, t1, 3, False, "helix")


def spherical_curve(z_terms, radius=1.0):
    """Curve on the sphere of given radius with height z(t) a trigonometric series."""
    def f(t):
        z = _trig_series(t, z_terms)
        rho = (z * z * -1.0 + radius ** 2).sqrt()
        return Jet.stack([rho * t.cos(), rho * t.sin(), z])
    return AnalyticCurve(f, 0.0, TWO_PI, 3, True, "spherical")


def latitude(height, radius=1.0):
    return spherical_curve([(0, height, 0.0)], radius)


def ellipsoidal_curve(a, b, c, lat_terms):
    """(a cos v cos t, b cos v sin t, c sin v) with latitude v(t) a trigonometric series."""
    def f(t):
        v = _trig_series(t, lat_terms)
        cv = v.cos()
        return Jet.stack([cv * t.cos() * a, cv * t.sin() * b, v.sin() * c])
    return AnalyticCurve(f, 0.0, TWO_PI, 3, True, "ellipsoidal")


def table_source(curve: JetCurve):
    """Adapter giving a sampled JetCurve the analytic-source interface.

    Derivatives beyond the stored order are zero-padded, so results that
    need them are only as reliable as the stored jets.
    """
    def f(t):
        d = curve.jets_at(t.value, min(curve.order, t.order))
        jet = Jet.from_derivatives(d)
        return jet.pad(t.order) if jet.order < t.order else jet
    return f


def sampled_curve(grid, samples, periodic=None, order=4):
    grid = np.asarray(grid, float)
    samples = np.asarray(samples, float)
    if periodic is None:
        periodic = bool(np.max(np.abs(samples[0] - samples[-1])) < 1e-8)
    return derive_jets(samples, grid, order, periodic=periodic)


def parse_curve(spec, base_dir=None):
    """Curve from its JSON description; returns AnalyticCurve or JetCurve (csv)."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise SpecError("curve spec must be an object with a 'kind'")
    kind = spec["kind"]
    try:
        if kind == "ellipse":
            return ellipse(float(spec["a"]), float(spec["b"]), tuple(spec.get("center", (0.0, 0.0))))
        if kind == "circle":
            return circle(float(spec.get("r", 1.0)))
        if kind == "fourier_oval":
            return fourier_oval([float(c) for c in spec["radial_coeffs"]],
                                [float(c) for c in spec.get("sin_coeffs", [])])
        if kind == "parametric_poly":
            keys = [k for k in ("x", "y", "z") if k in spec]
            return parametric_poly([[float(c) for c in spec[k]] for k in keys],
                                   float(spec.get("t0", -1.0)), float(spec.get("t1", 1.0)))
        if kind == "trig":
            return trig_curve(spec["components"], float(spec.get("t0", 0.0)),
                              float(spec.get("t1", TWO_PI)))
        if kind == "helix":
            return helix(float(spec.get("r", 1.0)), float(spec.get("pitch", 1.0)),
                         float(spec.get("wobble", 0.0)),
                         float(spec.get("t0", 0.0)), float(spec.get("t1", TWO_PI)))
        if kind == "latitude":
            return latitude(float(spec["z"]), float(spec.get("r", 1.0)))
        if kind == "spherical":
            return spherical_curve([tuple(map(float, t)) for t in spec["z_terms"]],
                                   float(spec.get("r", 1.0)))
        if kind == "ellipsoidal":
            return ellipsoidal_curve(float(spec["a"]), float(spec["b"]), float(spec["c"]),
                                     [tuple(map(float, t)) for t in spec["lat_terms"]])
        if kind == "cone_section":
            from .surfaces import cone_section
            base = parse_curve(spec["base_curve"], base_dir)
            return cone_section(spec.get("apex", [0.0, 0.0, 0.0]), base,
                                [tuple(map(float, t)) for t in spec["v_terms"]])
        if kind == "graph_curve":
            from .surfaces import graph_curve
            base = parse_curve(spec["base_curve"], base_dir)
            return graph_curve(base, [tuple(t) for t in spec["terms"]])
        if kind == "radial":
            from .surfaces import ImplicitPoly, parse_surface, radial_curve
            surf = parse_surface(spec["surface"], base_dir)
            if not isinstance(surf, ImplicitPoly):
                raise SpecError("radial curve needs an implicit surface")
            return radial_curve(surf, parse_curve(spec["direction"], base_dir),
                                float(spec.get("r0", 1.0)))
        if kind == "csv":
            import os
            path = spec["path"]
            if base_dir and not os.path.isabs(path):
                path = os.path.join(base_dir, path)
            grid, samples = read_curve_csv(path)
            return sampled_curve(grid, samples)
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"bad {kind} curve spec: {exc}") from None
    raise SpecError(f"unknown curve kind {kind!r}")
