"""Command-line front end: ``sweep``, ``simulate`` and ``verify``.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.
All numbers are written with 12 significant digits.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass

from . import theory, verify
from .driver import worst_case_tests
from .errors import GroupTestingError
from .sim import InstanceSpec, capped_budget, run_trials, summarize
from .splitting import is_power_of_two

EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_IO = 3

SWEEP_HEADER = ["p", "m_zero", "A_zero", "R_zero", "m_avg", "A_avg", "R_avg"]
SIM_HEADER = ["trial", "seed", "tests", "success"]


def fmt(x) -> str:
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, int):
        return str(x)
    return f"{x:.12g}"


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class SweepRow:
    p: float
    m_zero: int
    A_zero: float
    R_zero: float
    m_avg: int
    A_avg: float
    R_avg: float

    @classmethod
    def at(cls, p: float) -> SweepRow:
        z, s = theory.zero_error_point(p), theory.small_error_point(p)
        return cls(p, z.m, z.A, z.R, s.m, s.A, s.R)

    def cells(self) -> list[str]:
        return [fmt(getattr(self, f)) for f in SWEEP_HEADER]


def p_grid(p_min: float, p_max: float, step: float) -> list[float]:
    count = int(math.floor((p_max - p_min) / step + 1e-9))
    return [round(p_min + i * step, 12) for i in range(count + 1)]


def sweep_rows(p_min: float, p_max: float, step: float) -> list[SweepRow]:
    return [SweepRow.at(p) for p in p_grid(p_min, p_max, step)]


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _emit(text: str, out_path: str) -> None:
    if out_path == "-":
        sys.stdout.write(text)
        return
    with open(out_path, "w", newline="") as fh:
        fh.write(text)


def cmd_sweep(args) -> int:
    if not (0 < args.p_min <= args.p_max < 1) or args.step <= 0:
        raise UsageError("need 0 < p-min <= p-max < 1 and step > 0")
    rows = sweep_rows(args.p_min, args.p_max, args.step)
    _emit(_csv_text(SWEEP_HEADER, [r.cells() for r in rows]), args.out)
    return 0


def _resolve_m(args, density: float) -> int:
    if args.m != "auto":
        try:
            m = int(args.m)
        except ValueError:
            raise UsageError(f"--m must be a positive integer or 'auto', got {args.m!r}") from None
        if m < 1:
            raise UsageError("--m must be >= 1")
        return m
    if not 0 < density < 1:
        raise UsageError("--m auto needs a defective density strictly between 0 and 1")
    if args.mode == "worst":
        return theory.zero_error_optimal_m(density)
    return theory.small_error_optimal_m(density)


def cmd_simulate(args) -> int:
    if args.n < 0 or args.trials < 1:
        raise UsageError("need n >= 0 and trials >= 1")
    if (args.p is None) == (args.k is None):
        raise UsageError("give exactly one of --p and --k")
    if args.mode == "worst" and args.k is None:
        raise UsageError("--mode worst needs --k")
    density = args.p if args.p is not None else (args.k / args.n if args.n else 0.0)
    m = _resolve_m(args, density)
    try:
        if args.mode == "worst":
            spec = InstanceSpec.adversarial(args.n, args.k, m, args.seed)
        elif args.p is not None:
            spec = InstanceSpec.iid(args.n, args.p, args.seed)
        else:
            spec = InstanceSpec.fixed_k(args.n, args.k, args.seed)
        budget = capped_budget(spec, m, 1 + args.delta) if args.mode == "capped" else None
    except GroupTestingError as exc:
        raise UsageError(str(exc)) from None

    outcomes = run_trials(spec, m, args.trials, budget)
    stats = summarize(outcomes, args.n, budget)
    rows = [[fmt(o.trial), fmt(o.seed), fmt(o.tests), fmt(o.success)] for o in outcomes]
    _emit(_csv_text(SIM_HEADER, rows), args.out)

    summary = [
        ("model", spec.model), ("n", args.n), ("m", m), ("mode", args.mode), ("trials", stats.trials),
        ("mean_tests_per_item", stats.mean_tests_per_item), ("stddev", stats.stddev),
        ("error_rate", stats.error_rate),
    ]
    if 0 < density < 1:
        summary.append(("theory_avg_aspect", theory.avg_aspect(density, m)))
        summary.append(("counting_bound_per_item", theory.binary_entropy(density)))
    if budget is not None:
        summary.append(("budget", budget))
    if args.mode == "worst" and is_power_of_two(m) and (args.n - args.k) % m == 0:
        summary.append(("worst_case_formula", worst_case_tests(args.n, args.k, m)))
    stream = sys.stderr if args.out == "-" else sys.stdout
    for key, value in summary:
        print(f"# {key}={fmt(value) if not isinstance(value, str) else value}", file=stream)
    return 0


def cmd_verify(args) -> int:
    ok = True
    for check in verify.run_checks(args.level):
        print(check.line(), flush=True)
        ok &= check.passed
    print("verify: all checks passed" if ok else "verify: FAILED")
    return 0 if ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gbsplit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sweep", help="aspect ratios and rates of both theorems over a p grid")
    sp.add_argument("--p-min", type=float, default=0.005)
    sp.add_argument("--p-max", type=float, default=0.5)
    sp.add_argument("--step", type=float, default=0.005)
    sp.add_argument("--out", default="-", help="output CSV path ('-' for stdout)")
    sp.set_defaults(func=cmd_sweep)

    sm = sub.add_parser("simulate", help="seeded Monte-Carlo runs, one CSV row per trial")
    sm.add_argument("--n", type=int, required=True)
    sm.add_argument("--p", type=float)
    sm.add_argument("--k", type=int)
    sm.add_argument("--m", default="auto")
    sm.add_argument("--mode", choices=["plain", "capped", "worst"], default="plain")
    sm.add_argument("--trials", type=int, default=10)
    sm.add_argument("--seed", type=int, default=0)
    sm.add_argument("--delta", type=float, default=0.05, help="capped budget slack")
    sm.add_argument("--out", default="-")
    sm.set_defaults(func=cmd_simulate)

    vp = sub.add_parser("verify", help="run the exhaustive and Monte-Carlo self-checks")
    vp.add_argument("--level", choices=["quick", "full"], default="quick")
    vp.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except OSError as exc:
        print(f"gbsplit: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
