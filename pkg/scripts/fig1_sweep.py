"""Regenerate the aspect-ratio / rate curves of both block-size rules as CSV.

    python scripts/fig1_sweep.py --out fig1.csv
"""

import argparse

from gbsplit.cli import SWEEP_HEADER, sweep_rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--step", type=float, default=0.005)
    ap.add_argument("--out", default="fig1.csv")
    args = ap.parse_args()

    rows = sweep_rows(args.step, 0.5, args.step)
    with open(args.out, "w") as fh:
        fh.write(",".join(SWEEP_HEADER) + "\n")
        for r in rows:
            fh.write(",".join(r.cells()) + "\n")
    zero = min(rows, key=lambda r: r.R_zero)
    avg = min(rows, key=lambda r: r.R_avg)
    print(f"wrote {len(rows)} rows to {args.out}")
    print(f"min zero-error rate  {zero.R_zero:.4f} at p={zero.p}")
    print(f"min small-error rate {avg.R_avg:.4f} at p={avg.p}")


if __name__ == "__main__":
    main()
