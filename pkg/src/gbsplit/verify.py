"""Exhaustive and Monte-Carlo self-checks behind ``gbsplit verify``.

Every check returns a :class:`Check`; a failing check carries the first
counterexample it met.  The splitter under test is looked up at call time
(``splitting.binary_split`` unless one is passed), so a broken splitter
can be swapped in to confirm the checks actually bite.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import product

from . import splitting, theory
from .driver import run_gbs, worst_case_slack_bound, worst_case_tests
from .sim import InstanceSpec, monte_carlo
from .splitting import DefectivePattern, TestOracle, huffman_codewords

P_GRID = [round(0.005 * i, 12) for i in range(1, 101)]
P_GRID_COARSE = [round(0.05 * i, 12) for i in range(1, 11)]


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        extra = f" -- {self.detail}" if self.detail else ""
        return f"[{tag}] {self.name} ({self.seconds:.2f}s){extra}"


def _bits(mask: int, n: int) -> str:
    return "".join("1" if (mask >> i) & 1 else "0" for i in range(n))


def _splitter(split):
    return split if split is not None else splitting.binary_split


def pass_outcomes(m: int, split=None):
    """Yield ``(mask, tests, items_resolved)`` for one block pass on every block pattern.

    The pass is the block test followed, when positive, by a split.
    """
    split = _splitter(split)
    block = range(1, m + 1)
    for mask in range(1 << m):
        pattern = DefectivePattern.from_int(m, mask)
        oracle = TestOracle(pattern, record=False)
        if not oracle.test(block):
            yield mask, oracle.tests_used, m
            continue
        res = split(block, oracle)
        yield mask, oracle.tests_used, res.defective


def exhaustive_pass_expectation(p: float, m: int, split=None) -> tuple[float, float]:
    """Expected (tests, items resolved) per pass, summed over all ``2**m`` block patterns."""
    q = 1 - p
    e_tests = e_items = 0.0
    for mask, tests, items in pass_outcomes(m, split):
        k = bin(mask).count("1")
        w = p**k * q ** (m - k)
        e_tests += w * tests
        e_items += w * items
    return e_tests, e_items


def _test_counts(n: int, m: int, split) -> list[int]:
    return [run_gbs(DefectivePattern.from_int(n, mask), m, record=False, split=split).tests_used
            for mask in range(1 << n)]


def check_huffman(m_max: int = 64) -> Check:
    for m in range(1, m_max + 1):
        table = huffman_codewords(m)
        words = table.codewords
        a, b = table.a, table.b
        lengths = table.lengths()
        problems = []
        if any(u != v and v.startswith(u) for u in words for v in words):
            problems.append("not prefix-free")
        if sum(2.0 ** -len(w) for w in words) != 1.0:
            problems.append("Kraft sum != 1")
        if list(words) != sorted(words):
            problems.append("not lexicographic")
        if lengths != [a] * (m - 2 * b) + [a + 1] * (2 * b):
            problems.append(f"lengths {lengths}")
        if problems:
            return Check("huffman tables", False, f"m={m}: {', '.join(problems)}")
    return Check("huffman tables", True, f"m <= {m_max}")


def check_split_oracle(m_max: int = 8, split=None) -> Check:
    """Splits agree with a brute-force scan for the first defective."""
    name = "split vs brute-force first defective"
    for m in range(1, m_max + 1):
        lengths = huffman_codewords(m).lengths()
        block = range(1, m + 1)
        for mask in range(1, 1 << m):
            pattern = DefectivePattern.from_int(m, mask)
            first = (mask & -mask).bit_length()
            expected = (first, list(range(1, first)), lengths[first - 1])
            splits = [("general", splitting.binary_split_general)]
            if splitting.is_power_of_two(m):
                splits.append(("pow2", splitting.binary_split_pow2))
            if split is not None:
                splits = [("custom", split)]
            for label, fn in splits:
                oracle = TestOracle(pattern)
                res = fn(block, oracle)
                got = (res.defective, list(res.cleared_nondefectives), res.tests_used)
                if got != expected or oracle.tests_used != res.tests_used:
                    return Check(name, False, f"{label} split, m={m}, pattern={_bits(mask, m)}, "
                                              f"expected={expected}, got={got}")
                for pool, _ in oracle.transcript:
                    if not set(pool) <= set(range(1, m + 1)):
                        return Check(name, False, f"pool {list(pool)} escapes block, m={m}")
    return Check(name, True, f"m <= {m_max}, all nonempty patterns")


def check_zero_error(n_max: int, ms, split=None) -> Check:
    name = "zero-error exhaustive classification"
    split = _splitter(split)
    for m in ms:
        for n in range(0, n_max + 1):
            for mask in range(1 << n):
                pattern = DefectivePattern.from_int(n, mask)
                res = run_gbs(pattern, m, record=False, split=split)
                if not res.success:
                    got = "".join("1" if b else "0" for b in res.classification)
                    return Check(name, False, f"n={n}, m={m}, pattern={_bits(mask, n)}, got={got}")
    return Check(name, True, f"n <= {n_max}, m in {list(ms)}")


def worst_case_table(n_max: int, ms, split=None) -> list[dict]:
    """Max tests over weight-``k`` patterns for every divisible ``(n, k, m)``.

    Rows report both the raw maximum and the maximum with end-of-run
    individual tests removed (``core``), next to the formula.
    """
    split = _splitter(split)
    rows = []
    for m in ms:
        for n in range(1, n_max + 1):
            raw: dict[int, tuple[int, int]] = {}
            core: dict[int, tuple[int, int]] = {}
            for mask in range(1 << n):
                k = bin(mask).count("1")
                if (n - k) % m:
                    continue
                res = run_gbs(DefectivePattern.from_int(n, mask), m, record=False, split=split)
                raw[k] = max(raw.get(k, (-1, 0)), (res.tests_used, mask))
                core[k] = max(core.get(k, (-1, 0)), (res.core_tests, mask))
            for k in sorted(raw):
                rows.append(dict(n=n, k=k, m=m, formula=worst_case_tests(n, k, m),
                                 raw_max=raw[k][0], core_max=core[k][0],
                                 raw_pattern=_bits(raw[k][1], n), core_pattern=_bits(core[k][1], n)))
    return rows


def check_worst_case(n_max: int, ms=(1, 2, 4, 8), split=None) -> Check:
    """Block-pass maximum equals the formula; raw maximum stays within ``m - 1`` of it.

    ``k = n`` is excluded from the equality: there the last ``m - 1``
    defectives are necessarily found by individual tests.
    """
    name = "worst-case formula"
    reported = []
    for row in worst_case_table(n_max, ms, split):
        n, k, m, f = row["n"], row["k"], row["m"], row["formula"]
        if not f <= row["raw_max"] <= f + m - 1 and k < n:
            return Check(name, False, f"n={n}, k={k}, m={m}, pattern={row['raw_pattern']}, "
                                      f"expected={f}..{f + m - 1}, got={row['raw_max']}")
        if k == n:
            if row["core_max"] != f:
                reported.append(f"(n={n},k={k},m={m}: formula {f}, max {row['raw_max']})")
            continue
        if row["core_max"] != f:
            return Check(name, False, f"n={n}, k={k}, m={m}, pattern={row['core_pattern']}: "
                                      f"expected={f}, got={row['core_max']}")
    detail = f"n <= {n_max}, m in {list(ms)}"
    if reported:
        detail += f"; k=n discrepancies: {len(reported)} e.g. {reported[0]}"
    return Check(name, True, detail)


def check_slack_bound(n_max: int, ms, split=None) -> Check:
    name = "tests within worst case plus end-effect slack"
    split = _splitter(split)
    for m in ms:
        ceil_log = (m - 1).bit_length()
        for n in range(n_max + 1):
            for mask in range(1 << n):
                k = bin(mask).count("1")
                t = run_gbs(DefectivePattern.from_int(n, mask), m, record=False, split=split).tests_used
                loose = (n - k) / m + (1 + ceil_log + 1) * k + (m - 1)
                bound = min(loose, worst_case_slack_bound(n, k, m))
                if t > bound + 1e-9:
                    return Check(name, False, f"n={n}, m={m}, pattern={_bits(mask, n)}, "
                                              f"expected<={bound:g}, got={t}")
    return Check(name, True, f"n <= {n_max}, m in {list(ms)}")


def max_flip_difference(n: int, m: int, split=None) -> tuple[int, int, int]:
    """Largest ``|T(x) - T(x')|`` over patterns ``x`` and single-bit flips ``x'``.

    Returns ``(diff, mask, flipped_bit)``.
    """
    counts = _test_counts(n, m, _splitter(split))
    worst = (0, 0, 0)
    for mask in range(1 << n):
        for i in range(n):
            d = abs(counts[mask] - counts[mask ^ (1 << i)])
            if d > worst[0]:
                worst = (d, mask, i)
    return worst


def check_bounded_differences(n_max: int, m_max: int, split=None) -> Check:
    name = "bounded differences |dT| <= 2m"
    for m in range(1, m_max + 1):
        for n in range(1, n_max + 1):
            d, mask, i = max_flip_difference(n, m, split)
            if d > 2 * m:
                return Check(name, False, f"n={n}, m={m}, pattern={_bits(mask, n)}, flip item {i + 1}, "
                                          f"|dT|={d} > {2 * m}")
    return Check(name, True, f"n <= {n_max}, m <= {m_max}")


def check_pass_formulas(m_max: int = 10, ps=P_GRID_COARSE, split=None) -> Check:
    name = "per-pass F and G vs exhaustive expectation"
    for m, p in product(range(1, m_max + 1), ps):
        e_tests, e_items = exhaustive_pass_expectation(p, m, split)
        f, g = theory.pass_expected_tests(p, m), theory.pass_expected_items(p, m)
        if abs(e_tests - f) > 1e-12 or abs(e_items - g) > 1e-12:
            return Check(name, False, f"p={p}, m={m}: expected F={e_tests!r} G={e_items!r}, "
                                      f"got F={f!r} G={g!r}")
    return Check(name, True, f"m <= {m_max}, {len(ps)} values of p")


def check_rate_claims(ps=P_GRID) -> Check:
    name = "rate floors (zero-error > 0.9, small-error > 0.95) and counting bound"
    for p in ps:
        h = theory.binary_entropy(p)
        z, s = theory.zero_error_point(p), theory.small_error_point(p)
        for label, pt, floor, factor in (("zero", z, 0.9, 1.11), ("avg", s, 0.95, 1.05)):
            if not (pt.R > floor and pt.A < factor * h):
                return Check(name, False, f"{label}-error p={p}: A={pt.A!r}, R={pt.R!r}")
            if pt.A < h - 1e-12 or pt.R > 1 + 1e-12:
                return Check(name, False, f"{label}-error p={p} beats the counting bound")
        if s.A > z.A + 1e-12:
            return Check(name, False, f"p={p}: average case {s.A} above worst case {z.A}")
    return Check(name, True, f"{len(ps)} grid points")


def check_special_cases() -> Check:
    name = "m=2 special cases and thresholds"
    for p in P_GRID:
        if abs(theory.avg_aspect(p, 2) - (1 + 2 * p - p * p) / (2 - p)) > 1e-12:
            return Check(name, False, f"avg_aspect(p={p}, 2)")
        if abs(theory.zero_error_aspect(p, 2) - (0.5 + 1.5 * p)) > 1e-12:
            return Check(name, False, f"zero_error_aspect(p={p}, 2)")
    ps = theory.UNGAR_THRESHOLD
    if abs(theory.avg_aspect(ps, 2) - 1) > 1e-12 or theory.small_error_optimal_m(ps) != 1:
        return Check(name, False, "Ungar threshold")
    if abs(theory.zero_error_aspect(1 / 3, 2) - 1) > 1e-12:
        return Check(name, False, "zero-error m=2 threshold")
    return Check(name, True)


def check_convergence(p: float = 0.1, n: int = 10**6, trials: int = 20, seed: int = 0) -> Check:
    m = theory.small_error_optimal_m(p)
    stats = monte_carlo(InstanceSpec.iid(n, p, seed), m, trials)
    target = theory.avg_aspect(p, m)
    rel = abs(stats.mean_tests_per_item - target) / target
    name = f"Monte-Carlo mean T/n at p={p}, m={m}, n={n}"
    return Check(name, rel < 0.005 and stats.error_rate == 0,
                 f"mean={stats.mean_tests_per_item:.6f}, theory={target:.6f}, rel={rel:.2e}")


def _timed(fn, *args, **kwargs) -> Check:
    t0 = time.perf_counter()
    res = fn(*args, **kwargs)
    res.seconds = time.perf_counter() - t0
    return res


def run_checks(level: str = "quick", split=None) -> list[Check]:
    if level == "quick":
        n_max, ms, m_max, bd_n = 10, (1, 2, 3, 4, 5), 5, 10
    elif level == "full":
        n_max, ms, m_max, bd_n = 14, tuple(range(1, 9)), 8, 12
    else:
        raise ValueError(f"unknown level {level!r}")
    pow2 = tuple(m for m in ms if splitting.is_power_of_two(m))
    checks = [
        _timed(check_huffman, 64),
        _timed(check_split_oracle, m_max, split),
        _timed(check_zero_error, n_max, ms, split),
        _timed(check_worst_case, n_max, pow2, split),
        _timed(check_slack_bound, min(n_max, 12), ms, split),
        _timed(check_bounded_differences, bd_n, min(m_max, 5), split),
        _timed(check_pass_formulas, 10, P_GRID_COARSE, split),
        _timed(check_rate_claims),
        _timed(check_special_cases),
    ]
    if level == "full":
        checks.append(_timed(check_convergence))
    return checks
