"""Exhaustive worst case over weight-k patterns versus the closed form.

Prints one CSV row per divisible (n, k, m). ``core_max`` leaves out the
individual tests at the end of a run; ``raw_max`` includes them.

    python scripts/worst_case_report.py --n-max 12
"""

import argparse
import csv
import sys

from gbsplit.verify import worst_case_table


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-max", type=int, default=12)
    ap.add_argument("--m", type=int, nargs="+", default=[1, 2, 4, 8])
    args = ap.parse_args()

    fields = ["n", "k", "m", "formula", "core_max", "raw_max"]
    w = csv.DictWriter(sys.stdout, fieldnames=fields, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    w.writerows(worst_case_table(args.n_max, args.m))


if __name__ == "__main__":
    main()
