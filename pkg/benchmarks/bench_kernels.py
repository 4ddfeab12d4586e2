"""Benchmark the compiled kernels against the pure-numpy fallback.

Usage: python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from reluflow.kernels import _pyloops
from reluflow.model_core import benchmark_dataset

try:
    from reluflow.kernels import _fastloops
except ImportError:
    _fastloops = None


def timeit(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ds = benchmark_dataset(5.0)
    cases = {
        "gd_single (1e5 iters)": lambda m: m.gd_single(
            ds.X, ds.y, np.zeros(3), 0.0, 1.0, 1e-5, 100_000, 0.0, 10_000
        ),
        "gd_hidden (eps=1e-5, lr=1e-5)": lambda m: m.gd_hidden(
            ds.X, ds.y, np.zeros(3), 1e-5, 1e-5, 20_000_000, 1e-15, 10_000
        ),
        "rk4_single (t_max=5, step=1e-4)": lambda m: m.rk4_single(
            ds.X, ds.y, np.zeros(3), 0.0, 1.0, 1e-4, 5.0, 1e-300, 1e-300, 1e-10, 1000
        ),
        "rk4_hidden (t_max=5, step=1e-4)": lambda m: m.rk4_hidden(
            ds.X, ds.y, np.zeros(3), 1e-2, 1e-4, 5.0, 1e-300, 1e-300, 1000
        ),
    }
    print(f"{'kernel':36s} {'python':>10s} {'cython':>10s} {'speedup':>9s}")
    for name, fn in cases.items():
        t_py = timeit(lambda: fn(_pyloops))
        if _fastloops is None:
            print(f"{name:36s} {t_py:9.3f}s {'n/a':>10s} {'n/a':>9s}")
            continue
        t_cy = timeit(lambda: fn(_fastloops))
        print(f"{name:36s} {t_py:9.3f}s {t_cy:9.3f}s {t_py / t_cy:8.1f}x")


if __name__ == "__main__":
    main()
