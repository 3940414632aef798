#!/usr/bin/env python3
"""Benchmark the jitted kernels against the pure-numpy fallbacks.

Runs each kernel on both paths at several sizes and prints per-call times
plus the speedup. The jitted path is compiled (and cached) before timing.

    python benchmarks/bench_kernels.py [--sizes 50,200,800] [--repeat 20]

Set QHM_PURE_NUMPY=1 before launching to confirm the package itself falls
back cleanly; this script imports both implementations explicitly, so it
reports the comparison regardless of which path the package selected.
"""

import argparse
import time

import numpy as np

from qhm import _kernels, random_metric
from qhm.msolver import ascent_step_default
from qhm.spaces import validate_metric


def timeit(fn, args, repeat):
    fn(*args)  # warm (jit compile / cache touch)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def fmt(seconds):
    if seconds < 1e-3:
        return f"{seconds * 1e6:8.1f} us"
    if seconds < 1.0:
        return f"{seconds * 1e3:8.2f} ms"
    return f"{seconds:8.2f} s "


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="50,200,800")
    parser.add_argument("--repeat", type=int, default=20)
    parser.add_argument("--ascent-iters", type=int, default=200_000)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if not _kernels.HAS_NUMBA:
        print("numba path unavailable (QHM_PURE_NUMPY set or numba missing); "
              "nothing to compare")
        return

    rng = np.random.default_rng(0)
    print(f"{'kernel':<22}{'n':>6}{'numpy':>14}{'numba':>14}{'speedup':>10}")
    for n in sizes:
        dist = random_metric(n, 0).dist
        w1 = rng.standard_normal(n)
        w2 = rng.standard_normal(n)
        pairs = [
            ("energy_bilinear", _kernels.energy_bilinear_np,
             _kernels.energy_bilinear_nb, (dist, w1, w2)),
            ("potential", _kernels.potential_np, _kernels.potential_nb,
             (dist, w1)),
            ("triangle_check", _kernels.worst_triangle_deficit_np,
             _kernels.worst_triangle_deficit_nb, (dist,)),
        ]
        for name, np_fn, nb_fn, fn_args in pairs:
            t_np = timeit(np_fn, fn_args, args.repeat)
            t_nb = timeit(nb_fn, fn_args, args.repeat)
            print(f"{name:<22}{n:>6}{fmt(t_np):>14}{fmt(t_nb):>14}"
                  f"{t_np / t_nb:>9.1f}x")

    # the ascent loop dominates oracle runtime; bench on a small space where
    # per-iteration overhead (not BLAS) is what matters
    space = validate_metric(random_metric(8, 1).dist)
    step = ascent_step_default(space)
    w0 = np.full(space.n, 1.0 / space.n)
    fn_args = (space.dist, w0, args.ascent_iters, step, 1e12, 0.0, 10_000)
    t_np = timeit(_kernels.ascent_np, fn_args, max(1, args.repeat // 10))
    t_nb = timeit(_kernels.ascent_nb, fn_args, max(1, args.repeat // 10))
    print(f"{'ascent (n=8)':<22}{args.ascent_iters:>6}{fmt(t_np):>14}"
          f"{fmt(t_nb):>14}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
