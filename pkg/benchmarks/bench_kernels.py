#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [n]

The backend is switched per call via LEGGETTSIM_DISABLE_NUMBA, so one
process measures both paths. The first jitted call is discarded as
compilation warm-up.
"""

import os
import sys
import time

import numpy as np

from leggettsim import kernels, sphere


def timeit(fn, repeats=7):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 2_000_000
    rng = sphere.make_rng(0, 0)
    pa = rng.random(n)
    pb = rng.random(n)
    u1 = rng.random(n)
    u2 = rng.random(n)
    alpha = rng.uniform(-1, 1, n)
    beta = rng.uniform(-1, 1, n)

    cases = {
        "draw_outcomes[independent]": lambda: kernels.draw_outcomes(pa, pb, u1, u2, 0),
        "draw_outcomes[comonotone]": lambda: kernels.draw_outcomes(pa, pb, u1, u2, 1),
        "abs_sum_diff": lambda: kernels.abs_sum_diff(alpha, beta),
    }

    print(f"n = {n}, numba available = {kernels._HAVE_NUMBA}")
    print(f"{'kernel':<30} {'numpy (ms)':>12} {'numba (ms)':>12} {'speedup':>9}")
    for name, fn in cases.items():
        os.environ["LEGGETTSIM_DISABLE_NUMBA"] = "1"
        t_numpy = timeit(fn)
        os.environ["LEGGETTSIM_DISABLE_NUMBA"] = "0"
        if kernels._HAVE_NUMBA:
            fn()  # warm-up / compile
            t_numba = timeit(fn)
            print(f"{name:<30} {t_numpy * 1e3:>12.2f} {t_numba * 1e3:>12.2f} {t_numpy / t_numba:>8.2f}x")
        else:
            print(f"{name:<30} {t_numpy * 1e3:>12.2f} {'-':>12} {'-':>9}")
    os.environ.pop("LEGGETTSIM_DISABLE_NUMBA", None)


if __name__ == "__main__":
    main()
