#!/usr/bin/env python3
"""Benchmark the compiled kernel core against the pure numpy fallback.

Run from the repository root after an editable install:

    python benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import time

import numpy as np

from bohrlab import parse
from bohrlab._kernels import get_backend
from bohrlab.mgood import _reduction_rows, C1_DIGITS
from bohrlab.laurent import _positive_orthant


def timeit(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    try:
        compiled = get_backend("compiled")
    except ImportError:
        print("compiled backend not built; run pip install -e . first")
        return
    pure = get_backend("python")

    f = parse("z^2-z-1")
    recur = np.array([1.0, 1.0])
    rng = np.random.default_rng(np.random.Philox(key=1))

    cases = []

    x0 = rng.random((512, 2))
    cases.append(("orbit_coords  K=512 N=10^4",
                  lambda b: b.orbit_coords(recur, x0, 10_000)))

    w = (1.0 - 2.0 * rng.integers(0, 2, size=10_000)).astype(complex)
    cases.append(("character_sums K=512 N=10^4 m=4",
                  lambda b: b.character_sums(recur, x0, w, 4)))

    a = np.where(rng.random(13) < 0.5, 1.0, -1.0).astype(complex)
    starts = rng.random((16, 2))
    props = rng.random((2_000, 16, 2))
    accus = rng.random((2_000, 16))
    cases.append(("metropolis     16 chains x 2000 steps (T=12)",
                  lambda b: b.metropolis_chains(recur, a, 4, starts, props, accus, 0.1)))

    g, _ = _positive_orthant(f)
    rows_map, _ = _reduction_rows(g, [4 * j for j in range(9)])
    rows = np.array([rows_map[4 * j] for j in range(9)], dtype=np.int64)
    digits = np.array(C1_DIGITS, dtype=np.int64)
    cases.append(("c1_dense_scan  5^9 patterns (no hit)",
                  lambda b: b.c1_dense_scan(rows, digits)))

    print(f"{'kernel':<44} {'compiled':>10} {'python':>10} {'speedup':>8}")
    for name, fn in cases:
        tc, rc = timeit(lambda: fn(compiled), args.repeat)
        tp, rp = timeit(lambda: fn(pure), args.repeat)
        if isinstance(rc, tuple):
            agree = all(np.allclose(a, b, atol=1e-9) for a, b in zip(rc, rp))
        else:
            agree = np.allclose(rc, rp, atol=1e-9)
        flag = "" if agree else "  RESULTS DISAGREE"
        print(f"{name:<44} {tc*1e3:>8.1f}ms {tp*1e3:>8.1f}ms {tp/tc:>7.1f}x{flag}")


if __name__ == "__main__":
    main()
