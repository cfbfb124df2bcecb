"""Simulate critical values of the sup-MOSUM functional.

Prints a Python literal for ``ipseries.tables``. The limiting process of
OLS-MOSUM is the increment process of a Brownian bridge, Rec-MOSUM that of a
standard Brownian motion; the statistic is ``sup_t |B(t + h) - B(t)|``.

Usage: python scripts/mosum_tables.py [--reps 40000] [--steps 4000] [--seed 20201]
"""

from __future__ import annotations

import argparse

import numpy as np

BANDWIDTHS = np.round(np.arange(1, 11) * 0.05, 2)
LEVELS = (0.2, 0.15, 0.1, 0.05, 0.025, 0.01)


def simulate(reps: int, steps: int, seed: int, chunk: int = 500) -> dict[str, np.ndarray]:
    rng = np.random.default_rng(seed)
    grid = np.arange(steps + 1) / steps
    stats = {"bridge": [], "motion": []}
    done = 0
    while done < reps:
        m = min(chunk, reps - done)
        inc = rng.standard_normal((m, steps)) / np.sqrt(steps)
        w = np.concatenate([np.zeros((m, 1)), np.cumsum(inc, axis=1)], axis=1)
        paths = {"motion": w, "bridge": w - grid * w[:, -1:]}
        for name, b in paths.items():
            row = []
            for h in BANDWIDTHS:
                k = int(round(h * steps))
                row.append(np.abs(b[:, k:] - b[:, : steps + 1 - k]).max(axis=1))
            stats[name].append(np.column_stack(row))
        done += m
    return {k: np.concatenate(v) for k, v in stats.items()}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", type=int, default=40000)
    parser.add_argument("--steps", type=int, default=4000)
    parser.add_argument("--seed", type=int, default=20201)
    args = parser.parse_args()
    sims = simulate(args.reps, args.steps, args.seed)
    for name, s in sims.items():
        print(f"# {name}: rows h={list(BANDWIDTHS)}, columns alpha={list(LEVELS)}")
        q = np.quantile(s, [1 - a for a in LEVELS], axis=0).T
        print("[")
        for h, row in zip(BANDWIDTHS, q):
            print("    (" + ", ".join(f"{v:.4f}" for v in row) + f"),  # h={h:.2f}")
        print("]")


if __name__ == "__main__":
    main()
