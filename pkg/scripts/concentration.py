"""Empirical tail of the test count against the McDiarmid bound.

    python scripts/concentration.py --p 0.1 --delta 0.05 --trials 1000 --n 1000 10000 100000
"""

import argparse
import csv
import sys

from gbsplit.sim import concentration_experiment
from gbsplit.theory import small_error_optimal_m


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--p", type=float, default=0.1)
    ap.add_argument("--m", type=int)
    ap.add_argument("--delta", type=float, default=0.05)
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n", type=int, nargs="+", default=[1000, 10000, 100000])
    args = ap.parse_args()

    m = args.m or small_error_optimal_m(args.p)
    rows = concentration_experiment(args.p, m, args.n, args.delta, args.trials, args.seed, capped=True)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "m", "mean_tests", "tail_freq", "mcdiarmid_bound", "capped_error_rate"])
    for r in rows:
        w.writerow([r.n, m, f"{r.mean_tests:.12g}", f"{r.tail_freq:.12g}", f"{r.bound:.12g}",
                    f"{r.error_rate:.12g}"])


if __name__ == "__main__":
    main()
