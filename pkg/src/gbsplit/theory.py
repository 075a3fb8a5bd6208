"""Closed-form rates, aspect ratios and block sizes.

Notation: ``p`` is the defective probability (or fraction), ``q = 1 - p``,
``m`` the block size, ``a = floor(log2 m)`` and ``b = m - 2**a``.  The
aspect ratio ``A`` is tests per item and the rate is ``H(p) / A`` bits
per test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, OptimalityError
from .splitting import is_power_of_two

UNGAR_THRESHOLD = (3 - math.sqrt(5)) / 2
"""Above this ``p`` individual testing is optimal on average."""

ZERO_ERROR_PAIR_THRESHOLD = 1 / 3
"""Below this ``p`` the ``m = 2`` worst case beats individual testing."""

_GRID_TOL = 1e-12


@dataclass(frozen=True)
class TheoryPoint:
    p: float
    m: int
    A: float
    R: float


def _check_open(p: float) -> None:
    if not 0 < p < 1:
        raise DomainError(f"p must lie in (0, 1), got {p}")


def _check_m(m: int) -> None:
    if int(m) != m or m < 1:
        raise DomainError(f"m must be a positive integer, got {m}")


def floor_pow2(x: float) -> float:
    """Greatest power of 2 not exceeding ``x`` (``5.7 -> 4``, ``0.7 -> 0.5``)."""
    if x <= 0:
        raise DomainError(f"floor_pow2 needs x > 0, got {x}")
    if x >= 1:
        return 1 << (int(x).bit_length() - 1)
    return 2.0 ** math.floor(math.log2(x))


def binary_entropy(p: float) -> float:
    if not 0 <= p <= 1:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    if p == 0 or p == 1:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def combinatorial_entropy(n: int, k: int) -> float:
    """``log2 C(n, k)``, through log-gamma so large ``n`` does not overflow."""
    if not 0 <= k <= n:
        raise DomainError(f"need 0 <= k <= n, got k={k}, n={n}")
    ln = math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
    return max(ln / math.log(2), 0.0)


def counting_bound(n: int, p: float) -> float:
    """Fewest tests any scheme can average: ``H(p) n``."""
    return binary_entropy(p) * n


def zero_error_aspect(p: float, m: int) -> float:
    _check_open(p)
    if not is_power_of_two(m):
        raise DomainError(f"zero-error aspect is defined for powers of 2, got m={m}")
    return 1 / m + (1 + math.log2(m) - 1 / m) * p


def zero_error_optimal_m(p: float, check: bool = True) -> int:
    _check_open(p)
    x = 1 / p - 1
    m = int(floor_pow2(x)) if x >= 1 else 1
    if check:
        best = min(zero_error_aspect(p, 1 << j) for j in range(int(math.log2(2 / p)) + 2))
        if zero_error_aspect(p, m) > best + _GRID_TOL:
            raise OptimalityError(f"m={m} is not worst-case optimal at p={p}")
    return m


def pass_expected_tests(p: float, m: int) -> float:
    """Expected tests in one block pass (block test plus split)."""
    _check_open(p)
    _check_m(m)
    q = 1 - p
    a = m.bit_length() - 1
    b = m - (1 << a)
    q_short = q ** (m - 2 * b)
    q_all = q**m
    return q_all + (1 - q_short) * (a + 1) + (q_short - q_all) * (a + 2)


def pass_expected_items(p: float, m: int) -> float:
    """Expected number of items whose status one block pass settles."""
    _check_open(p)
    _check_m(m)
    q = 1 - p
    return m * q**m + (1 + m * q ** (m + 1) - (m + 1) * q**m) / p


def avg_aspect(p: float, m: int) -> float:
    return pass_expected_tests(p, m) / pass_expected_items(p, m)


def small_error_optimal_m(p: float, check: bool = True) -> int:
    """Average-case optimal block size ``ceil(-log(2 - p) / log(1 - p))``.

    A tolerance of ``1e-12`` is taken off before the ceiling: at points
    where the ratio is an integer (``p`` equal to the Ungar threshold,
    say) the two neighbouring block sizes tie and rounding noise must not
    decide between them.
    """
    _check_open(p)
    ratio = -math.log(2 - p) / math.log1p(-p)
    m = max(1, math.ceil(ratio - 1e-12))
    if check:
        best = min(avg_aspect(p, j) for j in range(1, 4 * m + 1))
        if avg_aspect(p, m) > best + _GRID_TOL:
            raise OptimalityError(f"m={m} is not average-case optimal at p={p}")
    return m


def theorem2_aspect(p: float) -> float:
    """Small-error achievable aspect ratio at the optimal block size."""
    return avg_aspect(p, small_error_optimal_m(p))


def zero_error_point(p: float) -> TheoryPoint:
    m = zero_error_optimal_m(p)
    A = zero_error_aspect(p, m)
    return TheoryPoint(p, m, A, binary_entropy(p) / A)


def small_error_point(p: float) -> TheoryPoint:
    m = small_error_optimal_m(p)
    A = avg_aspect(p, m)
    return TheoryPoint(p, m, A, binary_entropy(p) / A)


def mcdiarmid_bound(n: int, m: int, delta: float, p: float) -> float:
    """Tail bound ``P(|T - E T| > delta E T) <= exp(-delta^2 H(p)^2 n / (2 m^2))``.

    Uses ``E T >= H(p) n`` and the fact that flipping one item changes
    the test count by at most ``2m``.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    _check_m(m)
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    _check_open(p)
    h = binary_entropy(p)
    return min(1.0, math.exp(-(delta**2) * h**2 * n / (2 * m**2)))
