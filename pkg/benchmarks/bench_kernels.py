"""Timing comparison of the jit-compiled and pure-numpy kernel backends.

Run as:  python3 benchmarks/bench_kernels.py [--trials 10000] [--n 64]
Both backends see identical pre-sampled randomness, so the check that
they agree bit-for-bit is included here too.
"""

import argparse
import time

import numpy as np

from bqsim import _kernels
from bqsim.rng import stream_rng


def sample(trials, n, ell, seed=0):
    rng = stream_rng(seed, 0)
    return (rng.integers(0, 2, (trials, n), dtype=np.uint8),
            rng.integers(0, 2, (trials, n), dtype=np.uint8),
            rng.integers(0, 2, trials, dtype=np.uint8),
            rng.integers(0, 2, (trials, n), dtype=np.uint8),
            rng.integers(0, 2, (trials, ell, n), dtype=np.uint8),
            rng.integers(0, 2, (trials, ell, n), dtype=np.uint8))


def bench(fn, args, repeats=5):
    fn(*args)                     # warm-up (jit compile, cache touch)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=10000)
    ap.add_argument("--n", type=int, default=64)
    ap.add_argument("--ell", type=int, default=4)
    args = ap.parse_args()

    data = sample(args.trials, args.n, args.ell)
    backends = [("numpy", _kernels._honest_ot_numpy)]
    try:
        from numba import njit
        backends.append(("numba", njit(cache=True)(_kernels._honest_ot_loop)))
    except ImportError:
        print("numba unavailable, timing numpy only")

    results = {}
    for name, fn in backends:
        results[name] = (bench(fn, data), fn(*data))
    print(f"honest OT batch, trials={args.trials} n={args.n} ell={args.ell}")
    for name, (t, _) in results.items():
        print(f"  {name:6s} {t * 1e3:8.2f} ms   "
              f"{args.trials / t:10.0f} trials/s")
    if len(results) == 2:
        a, b = (results[k][1] for k in ("numpy", "numba"))
        agree = all(np.array_equal(x, y) for x, y in zip(a, b))
        print(f"  backends agree bit-for-bit: {agree}")
        if not agree:
            raise SystemExit(1)

    m = stream_rng(1, 0).integers(0, 2, (args.trials, args.ell, args.n),
                                  dtype=np.uint8)
    xs = stream_rng(1, 1).integers(0, 2, (args.trials, args.n), dtype=np.uint8)
    print(f"GF(2) matvec batch, trials={args.trials}")
    gf = [("numpy", _kernels._gf2_matvec_numpy)]
    if len(backends) == 2:
        from numba import njit
        gf.append(("numba", njit(cache=True)(_kernels._gf2_matvec_loop)))
    outs = {}
    for name, fn in gf:
        t = bench(fn, (m, xs))
        outs[name] = fn(m, xs)
        print(f"  {name:6s} {t * 1e3:8.2f} ms")
    if len(outs) == 2 and not np.array_equal(outs["numpy"], outs["numba"]):
        raise SystemExit(1)


if __name__ == "__main__":
    main()
