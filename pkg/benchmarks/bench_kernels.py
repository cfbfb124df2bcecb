"""Time the numba and numpy flavours of each hot kernel.

Usage::

    python benchmarks/bench_kernels.py --n 472 --repeat 20

The numba timings exclude the first (compiling) call.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ipseries import kernels
from ipseries._accel import HAVE_NUMBA


def _inputs(n: int, rng: np.random.Generator) -> dict[str, tuple]:
    y = np.cumsum(rng.normal(size=n))
    e = rng.normal(size=n)
    resp = 0.6 ** np.arange(n)
    min_len = max(2, int(0.15 * n))
    max_breaks = n // min_len - 1
    rss = kernels._segment_rss_np(y, min_len)
    return {
        "airline_residuals": (e, 0.4, 0.6),
        "outlier_scan": (e, resp, 13),
        "segment_rss": (y, min_len),
        "partition_dp": (rss, min_len, max_breaks),
    }


def _best_of(fn, args, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[472, 2000])
    ap.add_argument("--repeat", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if not HAVE_NUMBA:
        print("numba is not installed; only the numpy flavour would run")
        return 1
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<20}{'n':>6}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for n in args.n:
        for name, fn_args in _inputs(n, rng).items():
            nb, npy = kernels.IMPLEMENTATIONS[name]
            nb(*fn_args)  # compile
            t_nb = _best_of(nb, fn_args, args.repeat)
            t_np = _best_of(npy, fn_args, args.repeat)
            print(f"{name:<20}{n:>6}{t_nb * 1e3:>12.3f}{t_np * 1e3:>12.3f}{t_np / t_nb:>10.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
