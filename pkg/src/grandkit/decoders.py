"""ORBGRAND and GRANDAB decoding loops over any LinearCode.

Both decoders guess error patterns in a fixed order and test codebook
membership by syndrome; the query count is the number of membership
tests including the initial check of the hard decision itself.

The default path never recomputes H @ v: by linearity the syndrome of a
pattern flipping ranks (lambda_1..lambda_P) is the XOR of the base
syndrome with the per-rank one-bit-flip syndromes, so the inner loop is
a couple of integer XORs per query.  `fast_path=False` re-derives every
syndrome from the parity-check rows while walking the public
pattern_stream; tests hold the two routes to identical outcomes and
query counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .codes import LinearCode
from .gf2 import BitWord
from .patterns import PatternBudget, max_feasible_size, pattern_stream

__all__ = [
    "SortPermutation",
    "DecodeOutcome",
    "sort_indices",
    "apply_partition",
    "orbgrand_decode",
    "grandab_decode",
    "syndrome_combination_check",
]


@dataclass(frozen=True)
class SortPermutation:
    """1-indexed bit positions in ascending |LLR| order, ties by position."""

    ind: tuple

    def __len__(self):
        return len(self.ind)


@dataclass(frozen=True)
class DecodeOutcome:
    found: bool
    message: Optional[BitWord]
    codeword: Optional[BitWord]
    queries: int
    solution_lw: Optional[int]
    solution_hw: Optional[int]
    abandoned: bool
    solution_parts: Optional[tuple] = None


def sort_indices(llrs) -> SortPermutation:
    """Stable ascending-|LLR| permutation (quantized inputs tie often)."""
    a = np.abs(np.asarray(llrs, dtype=np.float64))
    order = np.argsort(a, kind="stable")
    return SortPermutation(tuple(int(i) + 1 for i in order))


def apply_partition(parts, perm: SortPermutation) -> BitWord:
    """Error pattern flipping the bit at reliability rank lambda_j for each part."""
    n = len(perm.ind)
    v = 0
    for lam in parts:
        if not 1 <= lam <= n:
            raise ValueError(f"part {lam} outside [1, {n}]")
        v |= 1 << (perm.ind[lam - 1] - 1)
    return BitWord(v, n)


def syndrome_combination_check(base: BitWord, flips, sorted_syndromes) -> bool:
    """True iff base XOR the chosen one-flip syndromes is zero.

    sorted_syndromes[i-1] must be the syndrome of flipping the i-th least
    reliable bit; `flips` are 1-indexed ranks.  Equivalent to recomputing
    H @ (y ^ e) by linearity.
    """
    acc = base.value
    for lam in flips:
        acc ^= sorted_syndromes[lam - 1].value
    return acc == 0


# ---------------------------------------------------------------------------
# ORBGRAND
# ---------------------------------------------------------------------------

def _pmax_by_lw(lw_max: int, p_max: Optional[int], n: int) -> list:
    cap = n if p_max is None else min(p_max, n)
    return [min(max_feasible_size(lw), cap) for lw in range(lw_max + 1)]


def _sweep_exact_p(synd, s0, lw, p, n, q, chosen):
    """Test all partitions of lw into exactly p (>= 2) parts, in order.

    Returns ((lambda_1, lambda_2) or None, q).  On a hit `chosen` still
    holds (lambda_p, ..., lambda_3); the caller assembles the full tuple.
    """

    def rec(i, prev, total, acc, q):
        if i == 2:
            m2 = lw - total
            lo = prev + 1
            if m2 - n > lo:
                lo = m2 - n
            hi = (m2 - 1) >> 1
            for lam2 in range(lo, hi + 1):
                q += 1
                if synd[m2 - lam2] ^ synd[lam2] == acc:
                    return (m2 - lam2, lam2), q
            return None, q
        num = 2 * lw - i * (i - 1) + 2 - 2 * total
        d, r = divmod(num, 2 * i)
        hi = d - 1 if r == 0 else d
        if n - (i - 1) < hi:
            hi = n - (i - 1)
        for v in range(prev + 1, hi + 1):
            chosen.append(v)
            pair, q = rec(i - 1, v, total + v, acc ^ synd[v], q)
            if pair is not None:
                return pair, q
            chosen.pop()
        return None, q

    return rec(p, 0, 0, s0, q)


def _orbgrand_core(synd, s0, lw_max, pmax_by_lw, n):
    """Walk the pattern stream with incremental syndrome XOR.

    synd[r] is the packed syndrome of flipping the rank-r bit (1-indexed;
    synd[0] unused).  Returns (found, queries, parts or None).
    """
    if s0 == 0:
        return True, 1, ()
    q = 1
    for lw in range(1, lw_max + 1):
        if lw <= n:
            q += 1
            if synd[lw] == s0:
                return True, q, (lw,)
        for p in range(2, pmax_by_lw[lw] + 1):
            chosen = []
            pair, q = _sweep_exact_p(synd, s0, lw, p, n, q, chosen)
            if pair is not None:
                return True, q, pair + tuple(reversed(chosen))
    return False, q, None


def _pack_bits(bits: np.ndarray) -> int:
    return int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")


def _outcome(code: LinearCode, yhat: int, parts, perm0, queries, is_orb: bool) -> DecodeOutcome:
    if parts is None:
        return DecodeOutcome(False, None, None, queries, None, None, True, None)
    e = 0
    for lam in parts:
        pos = perm0[lam - 1] if is_orb else lam - 1
        e |= 1 << int(pos)
    cw = yhat ^ e
    msg = code.recover_message_int(cw)
    return DecodeOutcome(
        found=True,
        message=BitWord(msg, code.k),
        codeword=BitWord(cw, code.n),
        queries=queries,
        solution_lw=sum(parts) if is_orb else None,
        solution_hw=len(parts),
        abandoned=False,
        solution_parts=tuple(parts),
    )


def orbgrand_decode(llrs, code: LinearCode, budget: PatternBudget,
                    fast_path: bool = True) -> DecodeOutcome:
    """Soft-input ORBGRAND: ascending logistic weight, then ascending size."""
    a = np.asarray(llrs, dtype=np.float64)
    if a.shape != (code.n,):
        raise ValueError(f"expected {code.n} LLRs, got shape {a.shape}")
    if budget.n != code.n:
        raise ValueError("budget.n must equal code.n")
    n = code.n
    perm0 = np.argsort(np.abs(a), kind="stable")
    yhat = _pack_bits((a < 0).astype(np.uint8))
    s0 = code.syndrome_int(yhat)
    if fast_path:
        cols = code.col_syndromes
        synd = [0] * (n + 1)
        for r, pos in enumerate(perm0):
            synd[r + 1] = cols[pos]
        found, q, parts = _orbgrand_core(
            synd, s0, budget.lw_max, _pmax_by_lw(budget.lw_max, budget.p_max, n), n)
        return _outcome(code, yhat, parts if found else None, perm0, q, True)
    # reference path: walk the public stream, recompute every syndrome from H
    perm = SortPermutation(tuple(int(i) + 1 for i in perm0))
    q = 0
    for lw, parts in pattern_stream(budget):
        q += 1
        e = apply_partition(parts, perm)
        if code.syndrome_int(yhat ^ e.value) == 0:
            return _outcome(code, yhat, parts, perm0, q, True)
    return DecodeOutcome(False, None, None, q, None, None, True, None)


# ---------------------------------------------------------------------------
# GRANDAB
# ---------------------------------------------------------------------------

def _grandab_core(cols, s0, ab, n):
    """Test Hamming weights 1..ab in lexicographic position order; the
    initial weight-0 check (query #1) happened before the call.
    Returns (found, queries, 1-indexed flip positions or None)."""

    def rec(w, begin, acc, q):
        if w == 1:
            for i in range(begin, n):
                q += 1
                if cols[i] == acc:
                    return (i + 1,), q
            return None, q
        for i in range(begin, n - w + 1):
            parts, q = rec(w - 1, i + 1, acc ^ cols[i], q)
            if parts is not None:
                return (i + 1,) + parts, q
        return None, q

    q = 1
    for w in range(1, ab + 1):
        parts, q = rec(w, 0, s0, q)
        if parts is not None:
            return True, q, parts
    return False, q, None


def grandab_decode(hard: BitWord, code: LinearCode, ab: int) -> DecodeOutcome:
    """Hard-decision GRAND, Hamming weights 0..ab, lexicographic within a weight.

    solution_lw is None: without soft information there is no reliability
    order to weigh flips by.  solution_parts holds 1-indexed flip
    positions (not ranks).
    """
    if hard.n != code.n:
        raise ValueError(f"expected {code.n}-bit word, got {hard.n}")
    if not 0 <= ab <= code.n:
        raise ValueError("ab must be in [0, n]")
    s0 = code.syndrome_int(hard.value)
    if s0 == 0:
        return DecodeOutcome(True, BitWord(code.recover_message_int(hard.value), code.k),
                             hard, 1, None, 0, False, ())
    found, q, parts = _grandab_core(code.col_syndromes, s0, ab, code.n)
    if found:
        return _outcome(code, hard.value, parts, None, q, False)
    return DecodeOutcome(False, None, None, q, None, None, True, None)
