"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Both backends produce identical output; only the speed differs.
"""
import argparse
import math
import time

from frilab import _pykernels as pure
from frilab._backend import COMPILED, kernels
from frilab.fri import edgewise_params, sitewise_params
from frilab.randomness import SeedSpec


def timed(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def cases():
    key = SeedSpec(1).key
    return {
        "sitewise 8^3 pad 4 (u=1, T=1)": lambda k: k.sample_fri(
            pure.MODE_SITEWISE, 3, (0, 0, 0), 8, 4, sitewise_params(3, 1.0, 1.0), key, False, False),
        "edgewise 8^3 pad 4 (u=1, T=1)": lambda k: k.sample_fri(
            pure.MODE_EDGEWISE, 3, (0, 0, 0), 8, 4, edgewise_params(3, 1.0, 1.0), key, False, False),
        "bernoulli 16^3": lambda k: k.sample_fri(
            pure.MODE_BERNOULLI, 3, (0, 0, 0), 16, 0, (0.25,), key, False, False),
        "10^4 killed walks (T=4)": lambda k: k.walk_batch(3, 0.8, key, 10000),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not COMPILED:
        print("compiled extension not available; nothing to compare")
        return
    print(f"{'kernel':34s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s}")
    for name, fn in cases().items():
        tp = timed(lambda: fn(pure), args.repeat)
        tc = timed(lambda: fn(kernels), args.repeat)
        print(f"{name:34s} {tp:10.4f} {tc:10.4f} {tp / tc:8.1f}")


if __name__ == "__main__":
    main()
