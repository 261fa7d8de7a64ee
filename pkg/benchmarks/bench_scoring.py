"""Benchmark the pairwise cosine-distance kernel: numba vs numpy.

Workload mirrors a real ranking run: 13 activities, vectors of length
2*s*500 for subset sizes s = 1..5, accumulated over all 31 subsets.

    python3 benchmarks/bench_scoring.py [--repeats 200]
"""

import argparse
import time

import numpy as np

from sensorplace._kernels import (
    pairwise_cosine_distance_sum_numba,
    pairwise_cosine_distance_sum_numpy,
)


def _time(fn, mats, repeats):
    fn(mats[0])  # warm-up (JIT compile / cache touch)
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        for mat in mats:
            fn(mat)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=200)
    parser.add_argument("--activities", type=int, default=13)
    parser.add_argument("--length", type=int, default=500)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    # one matrix per subset size, weighted by how many subsets have it
    counts = {1: 5, 2: 10, 3: 10, 4: 5, 5: 1}
    mats = []
    for size, count in counts.items():
        mat = np.ascontiguousarray(
            rng.normal(size=(args.activities, 2 * size * args.length)) + 1.0
        )
        mats.extend([mat] * count)

    backends = [("numpy", pairwise_cosine_distance_sum_numpy)]
    if pairwise_cosine_distance_sum_numba is not None:
        backends.append(("numba", pairwise_cosine_distance_sum_numba))
    else:
        print("numba unavailable; timing numpy only")

    print(f"workload: {len(mats)} subset scores, {args.activities} activities, "
          f"L={args.length}, best of {args.repeats}")
    results = {}
    for name, fn in backends:
        best = _time(fn, mats, args.repeats)
        results[name] = best
        print(f"  {name:<6} {best * 1e3:8.3f} ms per full ranking pass")
    if len(results) == 2:
        print(f"  speedup: {results['numpy'] / results['numba']:.2f}x")


if __name__ == "__main__":
    main()
