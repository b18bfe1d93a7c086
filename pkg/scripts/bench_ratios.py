"""Worst observed ratio per algorithm over seeded random families.

    python3 scripts/bench_ratios.py --trials 200 --jobs 4
"""
import argparse
from collections import defaultdict
from fractions import Fraction

from graphmms.cli import _guarantee, bench_rows
from graphmms.random_instances import RandomConfig

SUITES = [
    ("additive", 4, 8, ("cut-choose", "greedy")),
    ("additive", 6, 12, ("cut-choose", "greedy")),
    ("xos", 2, 8, ("xos-2", "xos-half2")),
    ("xos", 3, 9, ("xos-3", "xos-half2", "xos-23")),
    ("xos", 4, 12, ("xos-23", "xos-half2")),
    ("xos", 5, 14, ("xos-23",)),
    ("subadditive", 3, 7, ("sub-half", "sub-pmms")),
    ("subadditive", 5, 10, ("sub-half", "sub-pmms")),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    print(f"{'family':<12} {'n':>2} {'m':>3}  {'algorithm':<10} {'target':>7} "
          f"{'min mms':>8} {'min pmms':>9}  failures")
    for family, n, m, algos in SUITES:
        cfg = RandomConfig(n=n, m=m, max_degree=10)
        rows, failures = bench_rows(family, cfg, args.trials, args.seed, algos, jobs=args.jobs)
        worst = defaultdict(lambda: [Fraction(10 ** 9), Fraction(10 ** 9)])
        for row in rows:
            w = worst[row[2]]
            w[0] = min(w[0], Fraction(row[9]))
            w[1] = min(w[1], Fraction(row[10]))
        for a in algos:
            g = _guarantee(a, n, None)
            bad = sum(1 for f in failures if f" {a}:" in f)
            print(f"{family:<12} {n:>2} {m:>3}  {a:<10} {str(g.alpha):>7} "
                  f"{str(worst[a][0]):>8} {str(worst[a][1]):>9}  {bad}")


if __name__ == "__main__":
    main()
