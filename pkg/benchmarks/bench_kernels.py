#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy fallbacks.

Usage: python3 benchmarks/bench_kernels.py [--quick]

The numpy path is what you get with SAMTRACK_NO_NUMBA=1; this table shows
what that flag costs on realistic frame sizes.
"""
import argparse
import time

import numpy as np

from samtrack.kernels import numpy_impl

try:
    from samtrack.kernels import numba_impl
except ImportError:
    numba_impl = None


def timeit(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def blob_mask(rng, h, w, blobs=40):
    m = np.zeros((h, w), dtype=np.uint8)
    for _ in range(blobs):
        y, x = rng.randint(0, h - 24), rng.randint(0, w - 24)
        bh, bw = rng.randint(4, 24), rng.randint(4, 24)
        m[y:y + bh, x:x + bw] = 1
    return m


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="smaller inputs, fewer repeats")
    args = parser.parse_args()

    rng = np.random.RandomState(42)
    h, w = (240, 427) if args.quick else (480, 854)
    repeats = 3 if args.quick else 5

    mask = blob_mask(rng, h, w)
    flat = mask.ravel()
    prev = (rng.randint(0, 255, size=(h, w))).astype(np.uint8)
    cur = np.roll(prev, (3, 5), axis=(0, 1))
    template = np.zeros((h, w), dtype=np.uint8)
    template[h // 2:h // 2 + 16, w // 2:w // 2 + 12] = 1

    cases = [
        ("label_components_4", (mask,), {}),
        ("dilate_disc", (mask, 8), {}),
        ("rle_encode_bits", (flat,), {}),
        ("best_shift", (prev, cur, template, 16, 2), {}),
    ]

    if numba_impl is not None:
        for name, a, _ in cases:  # trigger JIT outside the timed region
            getattr(numba_impl, name)(*a)

    print(f"frame {w}x{h}, best of {repeats} runs")
    print(f"{'kernel':<20} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for name, a, _ in cases:
        t_np = timeit(getattr(numpy_impl, name), *a, repeats=repeats)
        if numba_impl is None:
            print(f"{name:<20} {t_np * 1e3:>10.2f}ms {'n/a':>12} {'n/a':>9}")
            continue
        t_nb = timeit(getattr(numba_impl, name), *a, repeats=repeats)
        print(f"{name:<20} {t_np * 1e3:>10.2f}ms {t_nb * 1e3:>10.2f}ms {t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
