"""Compiled vs numpy kernels, plus one end-to-end pipeline under each backend.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from affine_focal import _kernels_py

try:
    from affine_focal import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def cases(rng):
    order, batch = 12, 2048
    a1, b1 = rng.standard_normal((2, order + 1, batch))
    m = 9
    a2, b2 = rng.standard_normal((2, m, m, 33 * 33))
    vals = rng.standard_normal((4096, 3))
    offs = np.arange(-4, 5, dtype=np.int64)
    w = rng.standard_normal(9)
    fn, fm = rng.standard_normal(4097), rng.standard_normal(4096)
    return {
        "cauchy1 (order 12, 2048 jets)": lambda k: k.cauchy1(a1, b1),
        "cauchy2 (order 8, 33x33 grid)": lambda k: k.cauchy2(a2, b2),
        "stencil (9 points, 4096x3)": lambda k: k.stencil_apply(vals, offs, w, True),
        "rk4_tabulated (4096 steps)": lambda k: k.rk4_tabulated(fn, fm, 1e-3, 0.0),
    }


PIPELINE = ("import time; from affine_focal import darboux_frame, on_surface, BACKEND;"
            "from affine_focal.curves import latitude; from affine_focal.surfaces import sphere;"
            "t = time.perf_counter(); darboux_frame(on_surface(latitude(0.6), sphere()));"
            "print(BACKEND, time.perf_counter() - t)")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':34s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speed-up':>9s}")
    for name, fn in cases(rng).items():
        tp = min(timeit.repeat(lambda: fn(_kernels_py), number=1, repeat=args.repeat)) * 1e3
        if _ckernels is None:
            print(f"{name:34s} {tp:12.3f} {'n/a':>12s}")
            continue
        np.testing.assert_allclose(fn(_ckernels), fn(_kernels_py), rtol=1e-12, atol=1e-12)
        tc = min(timeit.repeat(lambda: fn(_ckernels), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:34s} {tp:12.3f} {tc:12.3f} {tp / tc:8.1f}x")
    print("\nend-to-end Darboux frame (latitude on sphere, 256 samples):")
    for pure in ("", "1"):
        env = dict(os.environ, AFFINE_FOCAL_PURE=pure)
        out = subprocess.run([sys.executable, "-c", PIPELINE], env=env,
                             capture_output=True, text=True, check=True).stdout.split()
        print(f"  {out[0]:8s} {float(out[1]) * 1e3:9.1f} ms")


if __name__ == "__main__":
    main()
