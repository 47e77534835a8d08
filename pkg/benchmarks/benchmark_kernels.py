#!/usr/bin/env python3
"""Benchmark the numba pairwise kernels against the pure-numpy fallback.

The same kernels are selected at import time by WINCLUST_NUMBA, so this
script imports both implementations directly and times them on identical
synthetic composite data.

Usage:
    python benchmarks/benchmark_kernels.py [--n 4000] [--pool 2000] [--reps 3]
"""

import argparse
import time

import numpy as np


def synthetic(n, rng):
    times = np.empty((n, 2))
    events = np.empty((n, 2), dtype=np.int8)
    td = rng.exponential(12.0, n)
    th = rng.exponential(9.0, n)
    tc = rng.exponential(30.0, n)
    events[:, 0] = td <= tc
    times[:, 0] = np.minimum(td, tc)
    events[:, 1] = th <= np.minimum(td, tc)
    times[:, 1] = np.where(events[:, 1] == 1, th, tc)
    kinds = np.zeros(2, dtype=np.int8)
    arms = (rng.random(n) < 0.5).astype(np.int8)
    return times, events, kinds, arms


def bench(fn, args, reps):
    fn(*args)  # warm-up (JIT compilation for the numba path)
    best = np.inf
    for _ in range(reps):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=4000, help="subjects for pair_scores")
    ap.add_argument("--pool", type=int, default=2000, help="pool size for score_vs_pool")
    ap.add_argument("--reps", type=int, default=3)
    args = ap.parse_args()

    from winclust import _kernels_np as knp

    try:
        from winclust import _kernels_jit as kjit
    except ImportError:
        kjit = None
        print("numba unavailable: benchmarking the numpy path only")

    rng = np.random.default_rng(0)
    data = synthetic(args.n, rng)
    pool = synthetic(args.pool, rng)

    rows = []
    t_np, out_np = bench(knp.pair_scores, data, args.reps)
    rows.append(("pair_scores", "numpy", args.n**2, t_np))
    if kjit is not None:
        t_jit, out_jit = bench(kjit.pair_scores, data, args.reps)
        rows.append(("pair_scores", "numba", args.n**2, t_jit))
        assert out_np[1:] == out_jit[1:] and np.array_equal(out_np[0], out_jit[0]), (
            "backends disagree"
        )

    rect = (data[0], data[1], pool[0], pool[1], data[2])
    t_np2, o_np = bench(knp.score_vs_pool, rect, args.reps)
    rows.append(("score_vs_pool", "numpy", args.n * args.pool, t_np2))
    if kjit is not None:
        t_jit2, o_jit = bench(kjit.score_vs_pool, rect, args.reps)
        rows.append(("score_vs_pool", "numba", args.n * args.pool, t_jit2))
        assert all(np.array_equal(a, b) for a, b in zip(o_np, o_jit))

    print(f"{'kernel':>14} {'backend':>8} {'comparisons':>13} {'seconds':>9} {'Mcmp/s':>9}")
    for name, backend, ncmp, sec in rows:
        print(f"{name:>14} {backend:>8} {ncmp:>13,} {sec:>9.4f} {ncmp / sec / 1e6:>9.1f}")
    if kjit is not None:
        for name in ("pair_scores", "score_vs_pool"):
            times = {b: s for nm, b, _, s in rows if nm == name}
            print(f"{name}: numba speedup x{times['numpy'] / times['numba']:.1f}")


if __name__ == "__main__":
    main()
