"""The generalized binary splitting loop, plain and budget-capped.

The unresolved pool is always a suffix ``start..n`` of the label order:
a negative block clears its ``m`` items, a positive block clears
everything up to and including the first defective it contains, and the
remaining block items rejoin the front of the pool.  Statuses are
therefore discovered in increasing label order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .errors import DomainError, EndEffectsError, InvalidBlockSizeError
from .splitting import (
    BudgetExhausted,
    DefectivePattern,
    SplitResult,
    TestOracle,
    binary_split,
    is_power_of_two,
)

Splitter = Callable[..., SplitResult]


class Mode(str, Enum):
    PLAIN = "plain"
    CAPPED = "capped"


@dataclass(frozen=True)
class RunConfig:
    n: int
    m: int
    mode: Mode = Mode.PLAIN
    budget: int | None = None

    def __post_init__(self):
        if self.m < 1:
            raise InvalidBlockSizeError(f"m must be >= 1, got {self.m}")
        if self.n < 0:
            raise DomainError(f"n must be >= 0, got {self.n}")
        mode = Mode(self.mode)
        object.__setattr__(self, "mode", mode)
        if mode is Mode.PLAIN and self.budget is not None:
            raise DomainError("plain runs take no budget")
        if mode is Mode.CAPPED and (self.budget is None or self.budget < 0):
            raise DomainError("capped runs need a budget >= 0")


@dataclass(eq=False)
class RunResult:
    """Outcome of one run.

    ``tests_used`` counts every test charged to the run, including the
    individual tests at the end (``end_tests`` of them) and, for capped
    runs, the ``padding`` tests added to reach the budget exactly.
    """

    tests_used: int
    classification: np.ndarray
    success: bool
    transcript: list | None
    end_tests: int = 0
    padding: int = 0
    completed: bool = True
    resolution_order: list | None = None

    @property
    def core_tests(self) -> int:
        """Tests spent on block passes only (end-of-run individual tests excluded)."""
        return self.tests_used - self.end_tests - self.padding


def _run(pattern: DefectivePattern, m: int, oracle: TestOracle, split: Splitter, order: list | None):
    """Drive the loop; returns (classification, end_tests, completed)."""
    n = pattern.n
    found = np.zeros(n, dtype=bool)
    start = 1
    end_tests = 0
    try:
        while n - start + 1 >= m:
            block = range(start, start + m)
            if not oracle.test(block):
                if order is not None:
                    order.extend(block)
                start += m
                continue
            res = split(block, oracle)
            found[res.defective - 1] = True
            if order is not None:
                order.extend(res.cleared_nondefectives)
                order.append(res.defective)
            start = res.defective + 1
        for item in range(start, n + 1):
            if oracle.test(range(item, item + 1)):
                found[item - 1] = True
            end_tests += 1
            if order is not None:
                order.append(item)
    except BudgetExhausted:
        return found, end_tests, False
    return found, end_tests, True


def run_gbs(pattern: DefectivePattern, m: int, record: bool = True, split: Splitter = binary_split) -> RunResult:
    """Classify every item of ``pattern`` with block size ``m``.

    Blocks whose size is a power of 2 are split by halving, other sizes by
    the Huffman search.  ``split`` is exposed so verification code can
    substitute a deliberately broken splitter.
    """
    RunConfig(pattern.n, m)
    oracle = TestOracle(pattern, record=record)
    order = [] if record else None
    found, end_tests, _ = _run(pattern, m, oracle, split, order)
    return RunResult(
        tests_used=oracle.tests_used,
        classification=found,
        success=bool(np.array_equal(found, pattern.bits)),
        transcript=oracle.transcript,
        end_tests=end_tests,
        resolution_order=order,
    )


def run_gbs_capped(
    pattern: DefectivePattern, m: int, budget: int, record: bool = True, split: Splitter = binary_split
) -> RunResult:
    """Run with at most ``budget`` tests, always reporting exactly ``budget``.

    A run that finishes early is padded with arbitrary tests.  A run that
    hits the budget stops and declares every item not yet found defective
    to be nondefective; it succeeds only if that guess happens to be right.
    """
    RunConfig(pattern.n, m, Mode.CAPPED, budget)
    oracle = TestOracle(pattern, record=record, budget=budget)
    order = [] if record else None
    found, end_tests, completed = _run(pattern, m, oracle, split, order)
    return RunResult(
        tests_used=budget,
        classification=found,
        success=bool(np.array_equal(found, pattern.bits)),
        transcript=oracle.transcript,
        end_tests=end_tests,
        padding=budget - oracle.tests_used,
        completed=completed,
        resolution_order=order,
    )


def worst_case_tests(n: int, k: int, m: int) -> int:
    """Worst-case test count ``(n - k)/m + (1 + log2 m) k``, ignoring end effects."""
    if not is_power_of_two(m):
        raise DomainError(f"m must be a power of 2, got {m}")
    if not 0 <= k <= n:
        raise DomainError(f"need 0 <= k <= n, got k={k}, n={n}")
    if (n - k) % m:
        raise EndEffectsError(f"m={m} does not divide n-k={n - k}")
    return (n - k) // m + (1 + int(math.log2(m))) * k


def worst_case_slack_bound(n: int, k: int, m: int) -> float:
    """Upper bound on ``run_gbs`` tests for any pattern of weight ``k``, any ``m``.

    Each defective costs at most one block test plus the longest codeword,
    negative blocks cost ``1/m`` per nondefective, and the final individual
    tests add at most ``m - 1``.
    """
    longest = (m - 1).bit_length()
    return (n - k) / m + (1 + longest) * k + (m - 1)
