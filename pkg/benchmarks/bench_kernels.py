#!/usr/bin/env python3
"""Benchmark the compiled kernel extension against the NumPy/pure-Python
fallback on realistic workloads.

Usage: python benchmarks/bench_kernels.py [--repeats N] [--size PX]
"""

import argparse
import time

import numpy as np

from minutia._kernels import py_kernels

try:
    from minutia._kernels import _speedups
except ImportError:
    _speedups = None


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def make_inputs(size):
    rng = np.random.default_rng(0)
    r = np.arange(size)[:, None]
    c = np.arange(size)[None, :]
    ridges = (127.5 + 100 * np.sin(2 * np.pi * (0.35 * c - 0.94 * r) / 10.0)).astype(np.uint8)
    binary = (ridges < 128).astype(np.uint8)
    skel = py_kernels.thin_baseline(binary)
    cn = py_kernels.crossing_number_map(skel)
    term = ((cn == 1) & (skel == 1)).astype(np.uint8)
    gray = rng.integers(0, 256, size=(size, size), dtype=np.uint8)
    return ridges, binary, skel, term, gray


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--size", type=int, default=320)
    args = parser.parse_args()

    ridges, binary, skel, term, gray = make_inputs(args.size)

    def col_scan(mod):
        out = np.zeros_like(ridges)
        for c0 in range(0, args.size, 8):
            mod.mark_col_minima(ridges, out, 0, args.size, c0, c0 + 8)

    cases = {
        "thin_baseline": lambda mod: mod.thin_baseline(binary),
        "crossing_number_map": lambda mod: mod.crossing_number_map(skel),
        "mark_col_minima (full scan)": col_scan,
        "repair_dangling": lambda mod: mod.repair_dangling(skel.copy(), ridges),
        "remove_short_ridges": lambda mod: mod.remove_short_ridges(skel.copy(), term, 22),
        "trimmed_mean_filter 3x3": lambda mod: mod.trimmed_mean_filter(gray, 3, 2),
    }

    print(f"input size {args.size}x{args.size}, best of {args.repeats} runs")
    header = f"{'kernel':32s} {'python (s)':>12s} {'compiled (s)':>13s} {'speedup':>9s}"
    print(header)
    print("-" * len(header))
    for name, case in cases.items():
        t_py = timeit(lambda: case(py_kernels), args.repeats)
        if _speedups is not None:
            t_c = timeit(lambda: case(_speedups), args.repeats)
            print(f"{name:32s} {t_py:12.4f} {t_c:13.4f} {t_py / t_c:8.1f}x")
        else:
            print(f"{name:32s} {t_py:12.4f} {'n/a':>13s} {'n/a':>9s}")
    if _speedups is None:
        print("\ncompiled extension not built; only the fallback was timed")


if __name__ == "__main__":
    main()
