#!/usr/bin/env python3
"""Benchmark the compiled window kernels against the pure-Python fallback.

Run from the repo root after building the extension:

    python3 bench/bench_kernels.py
"""

import random
import time

import numpy as np

from lexichron._kernels import _py

try:
    from lexichron._kernels import _ckern
except ImportError:
    _ckern = None


def bench(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = random.Random(0)
    n = 200_000
    w = 5

    targets = np.sort(np.asarray(rng.sample(range(n * 10), n // 50), dtype=np.int64))
    probes = np.sort(np.asarray(rng.sample(range(n * 10), n // 10), dtype=np.int64))
    ids = np.asarray([rng.randrange(-1, 500) for _ in range(n)], dtype=np.int32)

    rows = []
    t_py = bench(_py.count_window_hits, targets, probes, w)
    rows.append(("count_window_hits", t_py, None))
    t_py_pairs = bench(_py.window_pair_ids, ids, w)
    rows.append(("window_pair_ids", t_py_pairs, None))

    if _ckern is not None:
        assert _ckern.count_window_hits(targets, probes, w) == _py.count_window_hits(
            targets, probes, w
        )
        a1, b1 = _ckern.window_pair_ids(ids, w)
        a2, b2 = _py.window_pair_ids(ids, w)
        assert np.array_equal(a1, a2) and np.array_equal(b1, b2)
        rows[0] = ("count_window_hits", t_py, bench(_ckern.count_window_hits, targets, probes, w))
        rows[1] = ("window_pair_ids", t_py_pairs, bench(_ckern.window_pair_ids, ids, w))

    print(f"{'kernel':<20} {'python':>12} {'compiled':>12} {'speedup':>9}")
    for name, py_t, c_t in rows:
        if c_t is None:
            print(f"{name:<20} {py_t * 1e3:>10.2f}ms {'n/a':>12} {'n/a':>9}")
        else:
            print(f"{name:<20} {py_t * 1e3:>10.2f}ms {c_t * 1e3:>10.2f}ms {py_t / c_t:>8.1f}x")


if __name__ == "__main__":
    main()
