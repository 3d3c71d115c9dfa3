"""Benchmark the confusion-accumulation kernels (Cython vs NumPy).

Run: python3 benchmarks/bench_accum.py [--pixels N] [--repeats R]
"""

import argparse
import time

import numpy as np

from promptseg.metrics import _accum_np, default_threshold_grid

try:
    from promptseg.metrics import _accum_cy
except ImportError:
    _accum_cy = None


def bench(fn, probs, gt, thresholds, repeats):
    fn(probs, gt, thresholds)  # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn(probs, gt, thresholds)
    return (time.perf_counter() - t0) / repeats


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--pixels", type=int, default=352 * 352)
    parser.add_argument("--repeats", type=int, default=20)
    parser.add_argument("--grid", type=int, default=256)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    probs = rng.random(args.pixels)
    gt = (rng.random(args.pixels) < 0.3).astype(np.uint8)
    thresholds = default_threshold_grid(args.grid)

    t_np = bench(_accum_np.bin_counts, probs, gt.astype(bool), thresholds, args.repeats)
    print(f"numpy : {t_np * 1e3:8.3f} ms/image  ({args.pixels} px, {args.grid} thresholds)")
    if _accum_cy is None:
        print("cython: extension not built (pip install -e . with a C compiler)")
        return
    t_cy = bench(_accum_cy.bin_counts, probs, gt, thresholds, args.repeats)
    print(f"cython: {t_cy * 1e3:8.3f} ms/image  (x{t_np / t_cy:.2f} vs numpy)")

    want = _accum_np.bin_counts(probs, gt.astype(bool), thresholds)
    got = _accum_cy.bin_counts(probs, gt, thresholds)
    assert np.array_equal(want[0], got[0]) and np.array_equal(want[1], got[1])
    print("kernels agree exactly")


if __name__ == "__main__":
    main()
