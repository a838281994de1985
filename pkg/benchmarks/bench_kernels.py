#!/usr/bin/env python3
"""Throughput comparison of the numba and pure-numpy kernel paths.

Usage: python benchmarks/bench_kernels.py [--sizes 10000,100000,1000000]

Times each batch kernel (forward-kinematics poses, bending-plane
projection, noise perturbation) on both implementations and prints a
table of per-call wall times and the speedup. JIT compilation happens in
a warm-up call and is excluded.
"""

import argparse
import time

import numpy as np

from tendonarm.kernels import (
    fk_pose_batch_numpy,
    perturb_rotations_numpy,
    project_batch_numpy,
)

try:
    from tendonarm.kernels import _build_numba
    NUMBA_FUNCS = _build_numba()
except ImportError:
    NUMBA_FUNCS = None


def best_of(fun, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fun(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench(size, rng):
    theta = rng.uniform(0.0, 3.1, size)
    delta = rng.uniform(-np.pi, np.pi, size)
    rotations, _ = fk_pose_batch_numpy(theta, delta, 0.222)
    noise = rng.normal(0.0, 0.01, (size, 3))
    base = rotations[0]

    cases = [
        ("fk_pose_batch", fk_pose_batch_numpy, (theta, delta, 0.222)),
        ("project_batch", project_batch_numpy, (rotations,)),
        ("perturb_rotations", perturb_rotations_numpy, (base, noise)),
    ]
    rows = []
    for index, (name, numpy_fun, args) in enumerate(cases):
        t_numpy = best_of(numpy_fun, *args)
        if NUMBA_FUNCS is not None:
            numba_fun = NUMBA_FUNCS[index]
            numba_fun(*args)  # warm-up / JIT
            t_numba = best_of(numba_fun, *args)
        else:
            t_numba = float("nan")
        rows.append((name, size, t_numpy, t_numba))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="10000,100000,1000000",
                        help="comma-separated batch sizes")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if NUMBA_FUNCS is None:
        print("numba unavailable: reporting numpy path only")
    rng = np.random.default_rng(0)
    header = f"{'kernel':<20}{'n':>10}{'numpy [ms]':>14}{'numba [ms]':>14}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for size in sizes:
        for name, n, t_np, t_nb in bench(size, rng):
            speedup = t_np / t_nb if t_nb == t_nb and t_nb > 0 else float("nan")
            print(f"{name:<20}{n:>10}{t_np * 1e3:>14.3f}{t_nb * 1e3:>14.3f}{speedup:>10.2f}")


if __name__ == "__main__":
    main()
