"""Distinct integer partitions in ascending logistic-weight order.

A test error pattern that flips the bits at sorted-reliability ranks
(lambda_1 > lambda_2 > ... > lambda_P) has logistic weight m = sum of the
ranks and Hamming weight P.  This module enumerates all such partitions
for m = 0..lw_max in the order the decoder queries them:

  * logistic weight ascending (the empty partition, lw = 0, comes first),
  * within one weight, partition size P ascending,
  * within one (lw, P), the first part descends while the second ascends,
    the third part staying fixed until the inner pair sweep completes,
    and so on for higher parts (each higher part advances slower).

Counting is done with a separate partition-number DP so that query
budgets never require materializing the stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional

__all__ = [
    "Partition",
    "PatternBudget",
    "lambda_max",
    "partitions_of",
    "pattern_stream",
    "count_queries",
    "max_feasible_size",
]

# A partition is a plain tuple of strictly decreasing positive parts.
Partition = tuple


@dataclass(frozen=True)
class PatternBudget:
    """Enumeration budget: max logistic weight, max size, largest flippable rank.

    p_max=None means unbounded size.  Parts never exceed n (a flip rank
    cannot exceed the block length); for lw_max <= n the cap is inactive.
    """

    lw_max: int
    p_max: Optional[int]
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0 <= self.lw_max <= self.n * (self.n + 1) // 2:
            raise ValueError("lw_max must be in [0, n(n+1)/2]")
        if self.p_max is not None and self.p_max < 1:
            raise ValueError("p_max must be >= 1 (or None)")


def max_feasible_size(m: int) -> int:
    """Largest P with P(P+1)/2 <= m (a distinct partition needs at least 1+2+...+P)."""
    if m <= 0:
        return 0
    p = int((math.isqrt(8 * m + 1) - 1) // 2)
    while p * (p + 1) // 2 > m:
        p -= 1
    return p


def _bound(m: int, i: int, suffix_sum: int) -> int:
    num = 2 * m - i * (i - 1) + 2 - 2 * suffix_sum
    q, r = divmod(num, 2 * i)
    return q - 1 if r == 0 else q


def lambda_max(m: int, i: int, suffix: Partition = ()) -> int:
    """Largest admissible lambda_i when partitioning m into P parts.

    With the parts after position i fixed to `suffix`, lambda_i is bounded
    strictly by (2m - i(i-1) + 2 - 2*sum(suffix)) / (2i); the bound being
    an exact integer therefore excludes it.  May return a value < 1,
    meaning no valid partition exists for this prefix.
    """
    if i < 2:
        raise ValueError("position must be >= 2 (lambda_1 is determined by the rest)")
    return _bound(m, i, sum(suffix))


def _suffix_walk(m: int, i: int, prev: int, total: int, max_part: int):
    """Yield (sum, parts) for all (lambda_i, ..., lambda_3) wheel settings.

    Wheels advance odometer-style: lambda_3 fastest, lambda_i slowest.
    `prev` is lambda_{i+1} (0 when i is the last part), `total` the sum of
    parts already fixed beyond position i.
    """
    if i == 2:
        yield total, ()
        return
    # lambda_1 >= lambda_i + (i-1) caps lambda_i at max_part - (i-1)
    hi = min(_bound(m, i, total), max_part - (i - 1))
    for v in range(prev + 1, hi + 1):
        for s, parts in _suffix_walk(m, i - 1, v, total + v, max_part):
            yield s, parts + (v,)


def partitions_of(m: int, p: int, max_part: int) -> Iterator[Partition]:
    """All distinct partitions of m into exactly p parts, each <= max_part.

    Ordering follows the inner-pair sweep convention described in the
    module docstring.  Empty iterator when infeasible.
    """
    if p < 1 or m < p * (p + 1) // 2 or max_part < 1:
        return
    if p == 1:
        if m <= max_part:
            yield (m,)
        return
    for s, suffix in _suffix_walk(m, p, 0, 0, max_part):
        m2 = m - s
        lam3 = suffix[0] if suffix else 0
        lo = max(lam3 + 1, m2 - max_part, 1)
        hi = (m2 - 1) >> 1
        for lam2 in range(lo, hi + 1):
            yield (m2 - lam2, lam2) + suffix


def pattern_stream(budget: PatternBudget) -> Iterator[tuple]:
    """Yield (lw, partition) pairs in query order, starting with (0, ()).

    The empty partition stands for the initial syndrome check of the hard
    decision, so it is query #1 in all counting.  The stream is pull-based:
    the decoder aborts on the first codebook hit and worst-case budgets run
    to tens of millions of patterns, so nothing is materialized.
    """
    yield 0, ()
    for lw in range(1, budget.lw_max + 1):
        pmax = max_feasible_size(lw)
        if budget.p_max is not None:
            pmax = min(pmax, budget.p_max)
        pmax = min(pmax, budget.n)
        for p in range(1, pmax + 1):
            yield from ((lw, parts) for parts in partitions_of(lw, p, budget.n))


@lru_cache(maxsize=None)
def _bounded_partitions(t: int, a: int, b: int) -> int:
    """Number of ordinary partitions of t into at most a parts, each <= b."""
    if t == 0:
        return 1
    if t < 0 or a == 0 or b == 0:
        return 0
    return _bounded_partitions(t, a - 1, b) + _bounded_partitions(t - a, a, b - 1)


def count_distinct(m: int, p: int, max_part: int) -> int:
    """Number of distinct partitions of m into exactly p parts, each <= max_part.

    Strictly decreasing parts map to an ordinary bounded partition by
    subtracting the staircase (p-1, ..., 1, 0).
    """
    s = m - p * (p - 1) // 2
    if p < 1 or s < p or max_part - p + 1 < 1:
        return 0
    return _bounded_partitions(s - p, p, max_part - p)


def count_queries(budget: PatternBudget) -> int:
    """Exact number of patterns pattern_stream would emit, empty one included."""
    n = budget.n
    full_space = budget.lw_max == n * (n + 1) // 2 and (
        budget.p_max is None or budget.p_max >= n
    )
    if full_space:
        # every subset of ranks [1, n] appears exactly once
        return 1 << n
    total = 1
    for m in range(1, budget.lw_max + 1):
        pmax = max_feasible_size(m)
        if budget.p_max is not None:
            pmax = min(pmax, budget.p_max)
        pmax = min(pmax, n)
        for p in range(1, pmax + 1):
            total += count_distinct(m, p, n)
    return total
