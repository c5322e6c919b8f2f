"""Command-line front end.

Exit codes: 0 success, 2 malformed or unsupported input, 3 numerical
failure (the failing invariant is named on stderr).
"""

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import io
from .errors import AffineFocalError, SpecError
from .fixtures import FIXTURES, fixture_names
from .numkit import ToleranceConfig

MIN_DENSITY = 16
PATCH_KINDS = ("sphere", "ellipsoid", "paraboloid", "graph")


# -- spec handling ----------------------------------------------------------------

def load_spec(path):
    """Parse a JSON spec file; malformed JSON is reported with line and column."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecError(f"{path}: cannot read spec ({exc.strerror})") from None
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None
    if not isinstance(spec, dict):
        raise SpecError(f"{path}: spec must be a JSON object")
    return spec


def _density(spec, key, default):
    v = spec.get(key, default)
    if not isinstance(v, int) or isinstance(v, bool) or v < MIN_DENSITY:
        raise SpecError(f"{key} must be an integer >= {MIN_DENSITY}")
    return v


def _vector(spec, key, dim, default=None):
    v = spec.get(key, default)
    if v is None:
        return None
    try:
        arr = np.asarray(v, float)
    except (TypeError, ValueError):
        raise SpecError(f"{key} must be a list of numbers") from None
    if arr.shape != (dim,):
        raise SpecError(f"{key} must have {dim} components")
    return arr


def _curve(spec, key, base_dir):
    from .curves import parse_curve
    if key not in spec:
        raise SpecError(f"spec needs a '{key}' entry")
    return parse_curve(spec[key], base_dir)


def _patch(spec):
    from .blaschke import ellipsoid_patch, graph_patch, paraboloid_patch, sphere_patch
    kind = spec["kind"]
    try:
        if kind == "sphere":
            return sphere_patch(float(spec.get("r", 1.0)), tuple(spec.get("center", (0, 0, 0))),
                                float(spec.get("v_max", 1.2)))
        if kind == "ellipsoid":
            return ellipsoid_patch(float(spec["a"]), float(spec["b"]), float(spec["c"]),
                                   float(spec.get("v_max", 1.2)))
        if kind == "paraboloid":
            return paraboloid_patch(float(spec.get("half_width", 1.0)))
        return graph_patch([tuple(t) for t in spec["terms"]], float(spec.get("half_width", 1.0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"bad {kind} patch spec: {exc}") from None


def _hypersurface(fspec, base_dir):
    """Planar curve (n = 1) or surface patch (n = 2) from an 'f' spec."""
    if not isinstance(fspec, dict) or "kind" not in fspec:
        raise SpecError("'f' must be an object with a 'kind'")
    if fspec["kind"] in PATCH_KINDS:
        return _patch(fspec), 2
    from .curves import parse_curve
    c = parse_curve(fspec, base_dir)
    if getattr(c, "dim", 2) != 2:
        raise SpecError("'f' curve must be planar")
    return c, 1


# -- commands ----------------------------------------------------------------------

def cmd_planar(spec, cfg, args, base_dir):
    from .affine_curves import (affine_evolute, count_vertices, reparam_affine_planar,
                                support_function)
    raw = _curve(spec, "curve", base_dir)
    samples = _density(spec, "samples", 256)
    c = reparam_affine_planar(raw, convex_check=bool(spec.get("convex_check", True)),
                              cfg=cfg, samples=samples)
    out = args.out
    io.write_csv(os.path.join(out, "invariants.csv"), ["u", "rho", "rho_prime"],
                 [c.grid, c.rho, c.rho_prime])
    ev = affine_evolute(c, cfg)
    io.write_csv(os.path.join(out, "evolute.csv"), ["u", "Ex", "Ey"],
                 [ev.u, ev.points[:, 0], ev.points[:, 1]])
    report = {"reflected": c.reflected, "closed": c.closed, "length": c.length,
              "evolute_omitted": ev.omitted}
    if c.closed:
        vr = count_vertices(c, cfg=cfg)
        report.update({"vertex_count": vr.count, "vertices": [z.u for z in vr.zeros],
                       "degenerate": vr.degenerate})
    O = _vector(spec, "O", 2)
    if O is not None:
        sup = support_function(c, O)
        io.write_csv(os.path.join(out, "support.csv"), ["u", "z", "dz", "ddz"],
                     [c.grid, sup.z, sup.dz, sup.ddz])
        report["support_residual"] = sup.residual
    io.write_json(os.path.join(out, "vertices.json"), report)
    return report


def cmd_spatial(spec, cfg, args, base_dir):
    from .affine_curves import (cylindricity_test, lift_with_area, projective_density,
                                reparam_affine_planar, spatial_invariants)
    samples = _density(spec, "samples", 256)
    if "lift" in spec:
        lift = spec["lift"]
        if not isinstance(lift, dict):
            raise SpecError("'lift' must be an object")
        base = reparam_affine_planar(_curve(lift, "curve", base_dir), cfg=cfg, samples=samples)
        raw = lift_with_area(base, _vector(lift, "O", 2, [0.0, 0.0]))
    else:
        raw = _curve(spec, "curve", base_dir)
    c = spatial_invariants(raw, cfg, samples)
    io.write_csv(os.path.join(args.out, "invariants.csv"), ["u", "rho", "rho_prime", "tau"],
                 [c.grid, c.rho, c.rho_prime, c.tau])
    cyl = cylindricity_test(c, cfg)
    pd = projective_density(c, cfg)
    vol, ode = c.residuals()
    report = {"cylindrical": cyl.cylindrical,
              "cylindricity_residual": float(np.max(np.abs(cyl.residual))),
              "projective_density_zeros": [z.u for z in pd.zeros],
              "projective_density_identically_zero": pd.identically_zero,
              "reflected": c.reflected, "volume_residual": vol, "structure_residual": ode}
    io.write_json(os.path.join(args.out, "spatial.json"), report)
    return report


def _curve_on_surface(spec, cfg, base_dir):
    from .affine_curves import reparam_affine_planar
    from .surfaces import on_surface, parse_surface, support_curve
    if "support_of" in spec:
        base = reparam_affine_planar(_curve(spec, "support_of", base_dir), cfg=cfg,
                                     samples=_density(spec, "samples", 256))
        return support_curve(base, _vector(spec, "O", 2, [0.0, 0.0]))
    curve = _curve(spec, "curve", base_dir)
    if "surface" not in spec:
        raise SpecError("spec needs a 'surface' entry")
    surface = parse_surface(spec["surface"], base_dir)
    if getattr(curve, "dim", 3) != 3 or not hasattr(curve, "func"):
        raise SpecError("darboux curve must be an analytic curve in 3-space")
    return on_surface(curve, surface)


def cmd_darboux(spec, cfg, args, base_dir):
    from .darboux3 import (constant_Q_test, darboux_frame, flattening_points, focal_sheet,
                           visual_contour_test)
    samples = _density(spec, "samples", 256)
    n_s = _density(spec, "line_samples", 33)
    s_range = spec.get("s_range", [-1.0, 1.0])
    cs = _curve_on_surface(spec, cfg, base_dir)
    f = darboux_frame(cs, cfg, samples, gauge=args.gauge, lambda0=args.lambda0)
    sh = focal_sheet(f, tuple(s_range), n_s, cfg)
    out = args.out
    io.write_csv(os.path.join(out, "frame.csv"), ["u", "sigma", "rho", "tau", "lambda", "mu"],
                 [f.grid, f.sigma, f.rho, f.tau, f.lam, f.mu])
    io.write_obj(os.path.join(out, "focal.obj"), sh.points, sh.degenerate)
    U, S = sh.a.shape
    samples_out = [{"u": float(sh.u[i]), "s": float(sh.s[k]), "a": float(sh.a[i, k]),
                    "b": float(sh.b[i, k]), "label": sh.labels[i, k]}
                   for i in range(U) for k in range(S)]
    vc, cq = visual_contour_test(f, cfg), constant_Q_test(f, cfg)
    fl = flattening_points(f, cfg)
    labels = {
        "samples": samples_out,
        "edge": [{"u": float(sh.u[i]), "a": float(sh.edge_ab[i, 0]), "b": float(sh.edge_ab[i, 1]),
                  "label": sh.edge_labels[i]} for i in range(U)],
        "swallowtails": [{"u": u, "point": p, "a": ab[0], "b": ab[1]} for u, p, ab in sh.swallowtails],
        "degenerate": sh.degenerate,
    }
    io.write_json(os.path.join(out, "labels.json"), labels)
    counts = {}
    for lab in list(sh.labels.ravel()) + list(sh.edge_labels):
        counts[lab] = counts.get(lab, 0) + 1
    report = {"residuals": f.residuals(), "label_counts": counts,
              "swallowtail_count": len(sh.swallowtails), "degenerate_sheet": sh.degenerate,
              "O": vc.point, "Q": cq.point, "sigma_spread": vc.spread, "mu_spread": cq.spread,
              "flattening_points": fl.count, "tau_identically_zero": fl.identically_zero,
              "gauge": args.gauge, "lambda0": args.lambda0}
    io.write_json(os.path.join(out, "darboux.json"), report)
    return report


def _umbilic_pieces(spec, cfg, base_dir):
    from .umbilic import construct_umbilic
    if "f" not in spec:
        raise SpecError("spec needs an 'f' entry")
    f, n = _hypersurface(spec["f"], base_dir)
    O = _vector(spec, "O", n + 1, [0.0] * (n + 1))
    samples = _density(spec, "samples", 256 if n == 1 else 32)
    return construct_umbilic(f, O, samples, cfg), n


def _grid_columns(grid, n):
    if n == 1:
        return ["u"], [grid[0]]
    U, V = np.meshgrid(grid[0], grid[1], indexing="ij")
    return ["u", "v"], [U, V]


def cmd_umbilic(spec, cfg, args, base_dir):
    from .umbilic import inverse_construction, umbilic_report
    m, n = _umbilic_pieces(spec, cfg, base_dir)
    names, cols = _grid_columns(m.grid, n)
    phi = m.phi
    io.write_csv(os.path.join(args.out, "phi.csv"),
                 names + [f"phi_{i}" for i in range(n + 2)],
                 cols + [phi[..., i] for i in range(n + 2)])
    b = m.source
    io.write_csv(os.path.join(args.out, "apparatus.csv"),
                 names + [f"nu_{i}" for i in range(n + 1)] + ["H"],
                 cols + [b.nu[..., i] for i in range(n + 1)] + [b.H])
    report = umbilic_report(m, cfg)
    if spec.get("round_trip"):
        inv = inverse_construction(m, m.O_used, cfg)
        report["round_trip_residual"] = float(np.max(np.abs(inv.f - b.f)))
    io.write_json(os.path.join(args.out, "umbilic.json"), report)
    return report


def _phi_from_csv(spec, base_dir):
    from .jets import Jet
    from .numkit import derive_jets, read_curve_csv
    path = spec["path"]
    if base_dir and not os.path.isabs(path):
        path = os.path.join(base_dir, path)
    grid, samples = read_curve_csv(path)
    if samples.shape[1] != 3:
        raise SpecError("phi CSV for n = 1 needs columns u,x0,x1,x2")
    periodic = bool(np.max(np.abs(samples[0] - samples[-1])) < 1e-8)
    jc = derive_jets(samples, grid, 4, periodic=periodic)
    return Jet.from_derivatives(jc.jets), (grid,), 1


def cmd_umbilic_inverse(spec, cfg, args, base_dir):
    from .umbilic import inverse_construction
    if "phi" not in spec or not isinstance(spec["phi"], dict):
        raise SpecError("spec needs a 'phi' object")
    pspec = spec["phi"]
    kind = pspec.get("kind")
    if kind == "umbilic_of":
        m, n = _umbilic_pieces(pspec, cfg, base_dir)
        phi, grid = m.jets, m.grid
    elif kind == "csv":
        phi, grid, n = _phi_from_csv(pspec, base_dir)
    else:
        raise SpecError(f"unknown phi kind {kind!r}")
    O = _vector(spec, "O", n + 1, [0.0] * (n + 1))
    inv = inverse_construction(phi, O, cfg)
    names, cols = _grid_columns(grid, n)
    io.write_csv(os.path.join(args.out, "f.csv"), names + [f"f_{i}" for i in range(n + 1)],
                 cols + [inv.f[..., i] for i in range(n + 1)])
    report = {"scale_residual": inv.scale_residual, "frame_det_residual": inv.frame_det_residual}
    if kind == "umbilic_of":
        report["recovery_residual"] = float(np.max(np.abs(inv.f - m.source.f)))
    io.write_json(os.path.join(args.out, "inverse.json"), report)
    return report


def _frame_data(spec, cfg, base_dir):
    from .affine_curves import reparam_affine_planar
    from .focal_n import parse_frame_data, product_curves_fixture
    if spec.get("fixture") == "product":
        samples = _density(spec, "samples", 64)
        stride = int(spec.get("stride", 1))
        a = reparam_affine_planar(_curve(spec, "alpha", base_dir), cfg=cfg, samples=samples)
        b = reparam_affine_planar(_curve(spec, "beta", base_dir), cfg=cfg, samples=samples)
        return product_curves_fixture(a, b, stride, stride).frame_data
    if "fixture" in spec:
        raise SpecError(f"unknown frame-data fixture {spec['fixture']!r}")
    return parse_frame_data(spec)


def cmd_focal(spec, cfg, args, base_dir):
    from .focal_n import bifurcation_polynomial, locus_summary, sample_locus
    fd = _frame_data(spec, cfg, base_dir)
    extent = float(spec.get("extent", 4.0))
    count = _density(spec, "locus_samples", 16)
    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as pool:
        loci = list(pool.map(lambda k: bifurcation_polynomial(fd, k), range(len(fd))))
    monos = sorted({m for loc in loci for m in loc.coeffs}, key=lambda m: (m[0] + m[1], m))
    header = ["sample"] + [f"coeff_{i}{j}" for i, j in monos]
    cols = [np.arange(len(fd))] + [[float(loc.coeffs.get(m, 0)) for loc in loci] for m in monos]
    io.write_csv(os.path.join(args.out, "q_coeffs.csv"), header, cols)
    rows = [(k, p) for k, loc in enumerate(loci) for p in sample_locus(loc, extent, count)]
    io.write_csv(os.path.join(args.out, "locus.csv"), ["sample", "a", "b"],
                 [[k for k, _ in rows], [p[0] for _, p in rows], [p[1] for _, p in rows]])
    per = []
    for k, loc in enumerate(loci):
        s = locus_summary(loc)
        s["sample"] = k
        s["coefficients"] = {f"{i},{j}": c for (i, j), c in sorted(loc.coeffs.items())}
        s["signed_form"] = str(loc.signed_poly.as_expr())
        per.append(s)
    max_deg = max(loc.degree for loc in loci)
    report = {"n": fd.n, "samples": per, "max_degree": max_deg, "degree_le_n": max_deg <= fd.n}
    io.write_json(os.path.join(args.out, "focal.json"), report)
    return {"n": fd.n, "max_degree": max_deg, "degree_le_n": max_deg <= fd.n,
            "samples": len(fd), "first": per[0]}


COMMANDS = {
    "planar": cmd_planar,
    "spatial": cmd_spatial,
    "darboux": cmd_darboux,
    "umbilic": cmd_umbilic,
    "umbilic-inverse": cmd_umbilic_inverse,
    "focal": cmd_focal,
}


# -- argument parsing ---------------------------------------------------------------

def _add_globals(p, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--tol-det", type=float, default=d(1e-8))
    p.add_argument("--tol-zero", type=float, default=d(1e-6))
    p.add_argument("--tol-residual", type=float, default=d(1e-6))
    p.add_argument("--refine-depth", type=int, default=d(60))
    p.add_argument("--gauge", type=float, default=d(1.0), help="t'(u0) gauge constant a")
    p.add_argument("--lambda0", type=float, default=d(0.0), help="initial value of lambda")
    p.add_argument("--threads", type=int, default=d(1))
    p.add_argument("--out", default=d("."), help="output directory")


def build_parser():
    parser = argparse.ArgumentParser(prog="affine-focal",
                                     description="Equi-affine invariants and affine focal sets.")
    _add_globals(parser, False)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} pipeline on a JSON spec")
        p.add_argument("spec", help="JSON spec file")
        _add_globals(p, True)
    fx = sub.add_parser("fixtures", help="built-in fixture specs")
    fx.add_argument("action", choices=["list", "show"])
    fx.add_argument("name", nargs="?")
    _add_globals(fx, True)
    return parser


def _fixtures(args):
    if args.action == "list":
        for name in fixture_names():
            fx = FIXTURES[name]
            print(f"{name}\t{fx['command']}\t{fx['description']}")
        return 0
    if args.name not in FIXTURES:
        raise SpecError(f"unknown fixture {args.name!r}")
    print(io.dumps(FIXTURES[args.name]["spec"]))
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = ToleranceConfig(args.tol_det, args.tol_zero, args.tol_residual, args.refine_depth)
        if args.threads < 1:
            raise SpecError("--threads must be >= 1")
        if args.command == "fixtures":
            return _fixtures(args)
        spec = load_spec(args.spec)
        os.makedirs(args.out, exist_ok=True)
        if not os.access(args.out, os.W_OK):
            raise SpecError(f"output directory {args.out} is not writable")
        report = COMMANDS[args.command](spec, cfg, args, os.path.dirname(os.path.abspath(args.spec)))
        print(io.dumps(report))
        return 0
    except AffineFocalError as exc:
        print(f"affine-focal: numerical failure [{exc.invariant}]: {exc}", file=sys.stderr)
        return 3
    except (SpecError, ValueError) as exc:
        print(f"affine-focal: spec error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"affine-focal: spec error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
