#!/usr/bin/env python3
"""Latency experiment: exact flat-scan similarity queries at corpus scale.

Builds a synthetic corpus (default 59,232 x 256, the shipped dataset's
shape) and reports per-query latency percentiles for k=25 searches, plus
kd-tree latency over a 2-D projection of the same size.

Usage:
    python scripts/benchmark_knn.py [--size 59232] [--dims 256] [--queries 50]
"""

import argparse
import time

import numpy as np

from litscout.projection import PlanarCoordinates
from litscout.simindex import build_flat_index, build_planar_index


def percentiles(samples: list[float]) -> str:
    arr = np.array(samples) * 1000
    return (
        f"p50={np.percentile(arr, 50):.2f}ms "
        f"p90={np.percentile(arr, 90):.2f}ms "
        f"max={arr.max():.2f}ms"
    )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=59_232)
    parser.add_argument("--dims", type=int, default=256)
    parser.add_argument("--queries", type=int, default=50)
    parser.add_argument("--k", type=int, default=25)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"building flat index: {args.size} x {args.dims} ...")
    started = time.perf_counter()
    matrix = rng.random((args.size, args.dims))
    flat = build_flat_index(list(range(args.size)), matrix)
    print(f"  built in {time.perf_counter() - started:.2f}s")

    flat.knn(rng.random(args.dims), args.k)  # warmup
    samples = []
    for _ in range(args.queries):
        query = rng.random(args.dims)
        t0 = time.perf_counter()
        flat.knn(query, args.k)
        samples.append(time.perf_counter() - t0)
    print(f"flat k={args.k}: {percentiles(samples)}")

    print("building 2-d kd-tree ...")
    xy = rng.random((args.size, 2)) * 100
    started = time.perf_counter()
    planar = build_planar_index(
        PlanarCoordinates(ids=list(range(args.size)), xy=xy, provenance="external")
    )
    print(f"  built in {time.perf_counter() - started:.2f}s")
    planar.knn(rng.random(2) * 100, args.k)
    samples = []
    for _ in range(args.queries):
        query = rng.random(2) * 100
        t0 = time.perf_counter()
        planar.knn(query, args.k)
        samples.append(time.perf_counter() - t0)
    print(f"planar k={args.k}: {percentiles(samples)}")


if __name__ == "__main__":
    main()
