"""Deterministic writers: CSV and JSON with round-trip floats, OBJ meshes."""

import json
import math
from fractions import Fraction

import numpy as np

FLOAT_FMT = "%.17g"


def fmt(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    return FLOAT_FMT % x


def write_csv(path, header, columns):
    """Columns of equal length; every float printed with 17 significant digits."""
    cols = [np.asarray(c).ravel() for c in columns]
    n = cols[0].size if cols else 0
    if any(c.size != n for c in cols):
        raise ValueError("CSV columns differ in length")
    lines = [",".join(header)]
    for i in range(n):
        lines.append(",".join(_cell(c[i]) for c in cols))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _cell(v):
    if isinstance(v, (str, np.str_)):
        return str(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return fmt(v)


def to_jsonable(obj):
    """Plain JSON structure; NaN/inf become null, rationals become "p/q" strings."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if obj is None or isinstance(obj, str):
        return obj
    try:
        import sympy as sp
        if isinstance(obj, sp.Rational):
            return str(obj)
        if isinstance(obj, sp.Basic):
            return str(obj)
    except ImportError:  # pragma: no cover
        pass
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj):
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True, allow_nan=False)


def write_json(path, obj):
    with open(path, "w") as fh:
        fh.write(dumps(obj) + "\n")


def write_obj(path, points, degenerate=False):
    """Mesh of a (U, S, 3) grid, vertices row-major.

    Regular sheets are triangulated cell by cell; degenerate (line)
    sheets get one polyline record per row.
    """
    pts = np.asarray(points, float)
    U, S = pts.shape[:2]
    lines = [f"v {fmt(p[0])} {fmt(p[1])} {fmt(p[2])}" for p in pts.reshape(-1, 3)]

    def vid(i, k):
        return i * S + k + 1
    if degenerate:
        for i in range(U):
            lines.append("l " + " ".join(str(vid(i, k)) for k in range(S)))
    else:
        for i in range(U - 1):
            for k in range(S - 1):
                a, b, c, d = vid(i, k), vid(i, k + 1), vid(i + 1, k + 1), vid(i + 1, k)
                lines.append(f"f {a} {b} {c}")
                lines.append(f"f {a} {c} {d}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_obj_vertices(path):
    out = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("v "):
                out.append([float(v) for v in line.split()[1:4]])
    return np.array(out)
