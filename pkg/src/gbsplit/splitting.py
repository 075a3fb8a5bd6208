"""Binary splitting primitives and the pooled-test oracle.

Items are labelled ``1..n``.  Pools handed to :class:`TestOracle` may be
any iterable of labels; contiguous ``range`` objects take an O(1) path
through a prefix-sum table, which is what the driver uses so that runs
with ``n = 10**6`` stay cheap.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptySplitError, GroupTestingError, InvalidBlockSizeError

ItemId = int


@dataclass(eq=False)
class DefectivePattern:
    """Ground truth: ``bits[i - 1]`` is True when item ``i`` is defective."""

    bits: np.ndarray
    _prefix: list[int] = field(init=False, repr=False)

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=bool).reshape(-1)
        counts = np.zeros(self.bits.size + 1, dtype=np.int64)
        np.cumsum(self.bits, out=counts[1:])
        # Python ints index faster than numpy scalars in the hot loop.
        self._prefix = counts.tolist()

    @classmethod
    def from_defectives(cls, n: int, defectives: Iterable[ItemId]) -> DefectivePattern:
        bits = np.zeros(n, dtype=bool)
        for item in defectives:
            if not 1 <= item <= n:
                raise GroupTestingError(f"item {item} outside 1..{n}")
            bits[item - 1] = True
        return cls(bits)

    @classmethod
    def from_int(cls, n: int, mask: int) -> DefectivePattern:
        """Pattern whose item ``i`` is defective iff bit ``i - 1`` of ``mask`` is set."""
        return cls([(mask >> i) & 1 for i in range(n)])

    @property
    def n(self) -> int:
        return self.bits.size

    @property
    def k(self) -> int:
        return self._prefix[-1]

    @property
    def defectives(self) -> list[ItemId]:
        return (np.flatnonzero(self.bits) + 1).tolist()

    def count(self, lo: ItemId, hi: ItemId) -> int:
        """Number of defectives among labels ``lo..hi-1``."""
        return self._prefix[hi - 1] - self._prefix[lo - 1]

    def any(self, pool: Iterable[ItemId]) -> bool:
        if isinstance(pool, range) and pool.step == 1:
            return len(pool) > 0 and self.count(pool.start, pool.stop) > 0
        bits = self.bits
        n = bits.size
        for item in pool:
            if not 1 <= item <= n:
                raise GroupTestingError(f"item {item} outside 1..{n}")
            if bits[item - 1]:
                return True
        return False


class BudgetExhausted(Exception):
    """Raised by a capped oracle when a test is requested past its budget."""


class TestOracle:
    """Answers OR-queries against a pattern and counts the tests spent.

    With ``record=True`` every query is appended to ``transcript`` as a
    ``(pool, result)`` pair.  ``budget`` caps the number of tests; the
    query that would exceed it raises :class:`BudgetExhausted` and is not
    counted.
    """

    __test__ = False  # not a pytest class

    def __init__(self, pattern: DefectivePattern, record: bool = True, budget: int | None = None):
        self.pattern = pattern
        self.tests_used = 0
        self.transcript: list[tuple[Sequence[ItemId], bool]] | None = [] if record else None
        self.budget = budget

    def test(self, pool: Sequence[ItemId]) -> bool:
        if self.budget is not None and self.tests_used >= self.budget:
            raise BudgetExhausted
        result = self.pattern.any(pool)
        self.tests_used += 1
        if self.transcript is not None:
            self.transcript.append((pool, result))
        return result


@dataclass(frozen=True)
class CodewordTable:
    m: int
    codewords: tuple[str, ...]

    @property
    def a(self) -> int:
        return self.m.bit_length() - 1

    @property
    def b(self) -> int:
        return self.m - (1 << self.a)

    def lengths(self) -> list[int]:
        return [len(w) for w in self.codewords]


@dataclass(frozen=True)
class SplitResult:
    defective: ItemId
    cleared_nondefectives: Sequence[ItemId]
    tests_used: int


def is_power_of_two(m: int) -> bool:
    return m >= 1 and m & (m - 1) == 0


def _huffman_lengths(m: int) -> list[int]:
    # Plain Huffman merge over m equal weights; the tiebreak counter keeps
    # heap entries comparable.
    heap = [(1, i, [i]) for i in range(m)]
    depth = [0] * m
    counter = m
    while len(heap) > 1:
        w1, _, left = heapq.heappop(heap)
        w2, _, right = heapq.heappop(heap)
        for leaf in left + right:
            depth[leaf] += 1
        heapq.heappush(heap, (w1 + w2, counter, left + right))
        counter += 1
    return sorted(depth)


@lru_cache(maxsize=None)
def huffman_codewords(m: int) -> CodewordTable:
    """Canonical Huffman code for the uniform distribution on ``m`` symbols.

    Codewords are assigned in canonical order, so position ``j`` of the
    block gets the ``j``-th word in lexicographic order and the short
    words go to the first positions.

    >>> huffman_codewords(5).codewords
    ('00', '01', '10', '110', '111')
    """
    if m < 1:
        raise InvalidBlockSizeError(f"block size must be >= 1, got {m}")
    words = []
    code = 0
    prev = 0
    for length in _huffman_lengths(m):
        code <<= length - prev
        words.append(format(code, f"0{length}b") if length else "")
        code += 1
        prev = length
    return CodewordTable(m, tuple(words))


@lru_cache(maxsize=None)
def _zero_branch(m: int) -> dict[tuple[int, int], int]:
    """Map a codeword-prefix interval ``(lo, hi)`` to the end of its 0-subtree.

    Canonical codewords are sorted, so the words sharing a prefix occupy a
    contiguous interval of block positions and those continuing with ``0``
    form its leading part.
    """
    words = huffman_codewords(m).codewords
    cut = {}
    stack = [(0, m, 0)]
    while stack:
        lo, hi, depth = stack.pop()
        if hi - lo == 1:
            continue
        mid = lo
        while words[mid][depth] == "0":
            mid += 1
        cut[lo, hi] = mid
        stack.append((lo, mid, depth + 1))
        stack.append((mid, hi, depth + 1))
    return cut


def _check_block(block: Sequence[ItemId], oracle: TestOracle) -> int:
    m = len(block)
    if m < 1:
        raise InvalidBlockSizeError("cannot split an empty block")
    if not oracle.pattern.any(block):
        raise EmptySplitError(f"block {block[0]}..{block[-1]} contains no defective")
    return m


def binary_split_pow2(block: Sequence[ItemId], oracle: TestOracle) -> SplitResult:
    """Halving search for the first defective in a block of size ``2**a``.

    The block is assumed to have tested positive already; that test is the
    caller's and is not counted here.
    """
    m = _check_block(block, oracle)
    if not is_power_of_two(m):
        raise InvalidBlockSizeError(f"block size {m} is not a power of 2")
    lo, hi = 0, m
    tests = 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        tests += 1
        if oracle.test(block[lo:mid]):
            hi = mid
        else:
            lo = mid
    return SplitResult(block[lo], block[:lo], tests)


def binary_split_general(block: Sequence[ItemId], oracle: TestOracle) -> SplitResult:
    """Huffman-tree search for the first defective in a block of any size.

    Each test pools the still-possible items whose next codeword bit is 0.
    A positive result discards the untested items, a negative one discards
    (and clears) the tested ones.  Stops when a single item is left.
    """
    m = _check_block(block, oracle)
    cut = _zero_branch(m)
    lo, hi = 0, m
    tests = 0
    while hi - lo > 1:
        mid = cut[lo, hi]
        tests += 1
        if oracle.test(block[lo:mid]):
            hi = mid
        else:
            lo = mid
    return SplitResult(block[lo], block[:lo], tests)


def binary_split(block: Sequence[ItemId], oracle: TestOracle) -> SplitResult:
    """Dispatch to the halving search when possible, the Huffman search otherwise."""
    if is_power_of_two(len(block)):
        return binary_split_pow2(block, oracle)
    return binary_split_general(block, oracle)
