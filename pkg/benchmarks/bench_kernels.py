"""Benchmark the two row-reduction backends on random mod-p matrices.

The numba kernel is selected by default; MCMREP_NO_NUMBA=1 selects the pure
numpy path.  This script imports both implementations directly so a single
run compares them side by side.

Usage: python benchmarks/bench_kernels.py [--sizes 200,400,800] [--repeat 3]
"""

import argparse
import time

import numpy as np

from mcmrep import _kernels
from mcmrep.linalg import DEFAULT_PRIME


def bench(fn, a, p, repeat):
    best = float("inf")
    for _ in range(repeat):
        work = a.copy()
        t0 = time.perf_counter()
        fn(work, p)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="100,200,400,800")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    p = DEFAULT_PRIME
    rng = np.random.default_rng(args.seed)
    sizes = [int(s) for s in args.sizes.split(",")]

    numba_fn = None
    if _kernels.BACKEND == "numba":
        numba_fn = _kernels.rref_mod
        # trigger compilation outside the timed region
        warm = rng.integers(0, p, size=(8, 8), dtype=np.int64)
        numba_fn(warm, p)
    else:
        print("numba backend unavailable or disabled (MCMREP_NO_NUMBA); "
              "benchmarking the numpy path only")

    print(f"{'size':>6} {'numpy (s)':>12} {'numba (s)':>12} {'speedup':>9}")
    for n in sizes:
        a = rng.integers(0, p, size=(n, n), dtype=np.int64)
        t_np = bench(_kernels.rref_mod_numpy, a, p, args.repeat)
        if numba_fn is not None:
            t_nb = bench(numba_fn, a, p, args.repeat)
            print(f"{n:>6} {t_np:>12.4f} {t_nb:>12.4f} {t_np / t_nb:>8.1f}x")
        else:
            print(f"{n:>6} {t_np:>12.4f} {'-':>12} {'-':>9}")


if __name__ == "__main__":
    main()
