"""Lipschitz constant of the running-minimum retraction versus dimension.

For each ``p`` and dimension ``N`` this prints three numbers:
  * the ratio at the flat-block pair ``x = c(1, ..., 1)``, ``y`` = ``x`` with
    its first entry lowered, which equals ``N^{1/p}`` exactly;
  * the worst ratio found by random sampling (ball points and close pairs);
  * the claimed constant 2.

    python3 scripts/runmin_constant.py [--pairs 20000] [--seed 0]
"""
import argparse

import numpy as np

from fpfree.core_seq import lp_norm
from fpfree.sampling import ball_point, close_pair, log_uniform


def runmin(v):
    return np.minimum.accumulate(np.abs(v))


def ratio(x, y, p):
    return lp_norm(runmin(x) - runmin(y), p) / lp_norm(x - y, p)


def flat_block(N, p):
    c = N ** (-1 / p)
    x = np.full(N, c)
    y = x.copy()
    y[0] = 0.0
    return x, y


def sampled(N, p, pairs, rng):
    worst = 0.0
    for _ in range(pairs):
        x = ball_point(rng, N, p)
        y = ball_point(rng, N, p) if rng.random() < 0.5 else close_pair(rng, x, log_uniform(rng, 1e-8, 1))
        if np.any(x != y):
            worst = max(worst, ratio(x, y, p))
    return worst


def main():
    ap = argparse.ArgumentParser(description="running-min Lipschitz constant sweep")
    ap.add_argument("--pairs", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"{'p':>4} {'N':>5} {'flat block':>11} {'N^(1/p)':>9} {'sampled':>9} {'claim':>6}")
    for p in (1.0, 1.5, 2.0, 3.0):
        for N in (2, 4, 16, 64, 256):
            x, y = flat_block(N, p)
            print(f"{p:4g} {N:5d} {ratio(x, y, p):11.4f} {N ** (1 / p):9.4f} "
                  f"{sampled(N, p, args.pairs // 5, rng):9.4f} {2:6d}")


if __name__ == "__main__":
    main()
