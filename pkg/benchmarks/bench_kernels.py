"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the two hot kernels (point-to-cell assignment and max pairwise
diameter) on a few representative sizes and prints a speedup table.

Run from the repository root:

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from sphereot import _kernels
from sphereot.geometry import sample_uniform


def _time(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_assign(n, npts, L):
    pts = sample_uniform(n, npts, 1).points
    sites = sample_uniform(n, L, 2).points
    lam = np.zeros(L)
    compiled = _time(lambda: _kernels.assign_points(pts, sites, lam, 2.0, True))
    pure = _time(lambda: _kernels.assign_points(pts, sites, lam, 2.0, True,
                                                force_pure=True))
    return compiled, pure


def bench_diameter(n, npts):
    pts = sample_uniform(n, npts, 3).points
    compiled = _time(lambda: _kernels.pair_diameter(pts))
    pure = _time(lambda: _kernels.pair_diameter(pts, force_pure=True))
    return compiled, pure


def main():
    print(f"active backend: {_kernels.backend_name()}")
    print(f"{'kernel':<34}{'compiled':>12}{'numpy':>12}{'speedup':>10}")
    for n, npts, L in [(3, 50_000, 16), (3, 200_000, 64), (4, 100_000, 128)]:
        c, p = bench_assign(n, npts, L)
        print(f"{f'assign n={n} N={npts} L={L}':<34}"
              f"{c * 1e3:>10.2f}ms{p * 1e3:>10.2f}ms{p / c:>9.1f}x")
    for n, npts in [(3, 2_000), (3, 8_000)]:
        c, p = bench_diameter(n, npts)
        print(f"{f'diameter n={n} N={npts}':<34}"
              f"{c * 1e3:>10.2f}ms{p * 1e3:>10.2f}ms{p / c:>9.1f}x")


if __name__ == "__main__":
    main()
