"""Bit-packed GF(2) vectors and matrices.

Words and matrix rows are stored as Python integers, one bit per GF(2)
element.  Bit index convention (used everywhere in this package): index 1
is the first element of the sequence and is stored in the least
significant bit, so ``word.bit(i) == (word.value >> (i - 1)) & 1``.
Dense-hex file output puts column 1 in the most significant hex digit;
the conversion lives in :meth:`BitWord.to_hex` / :meth:`BitWord.from_hex`.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "BitWord",
    "Gf2Matrix",
    "RankDeficientError",
    "xor",
    "syndrome",
    "single_flip_syndromes",
    "right_inverse",
    "encode",
]


class RankDeficientError(ValueError):
    """Raised when a matrix does not have the rank a construction needs."""


def _parity(x: int) -> int:
    return x.bit_count() & 1


class BitWord:
    """Immutable fixed-length GF(2) vector."""

    __slots__ = ("value", "n")

    def __init__(self, value: int, n: int):
        if n < 0:
            raise ValueError("length must be non-negative")
        if value < 0 or value >> n:
            raise ValueError(f"value does not fit in {n} bits")
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "n", n)

    def __setattr__(self, *args):
        raise AttributeError("BitWord is immutable")

    def __reduce__(self):
        return (BitWord, (self.value, self.n))

    @classmethod
    def zeros(cls, n: int) -> "BitWord":
        return cls(0, n)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitWord":
        value = 0
        n = 0
        for b in bits:
            b = int(b)  # numpy scalars would overflow the shifts
            if b not in (0, 1):
                raise ValueError("bits must be 0 or 1")
            value |= b << n
            n += 1
        return cls(value, n)

    @classmethod
    def from_hex(cls, s: str, n: int) -> "BitWord":
        """Parse a dense-hex word: MSB of the hex string is bit 1."""
        ndigits = (n + 3) // 4
        if len(s) != ndigits:
            raise ValueError(f"expected {ndigits} hex digits for {n} bits, got {len(s)}")
        msb_first = int(s, 16)
        if msb_first >> (4 * ndigits):
            raise ValueError("hex value out of range")
        pad = 4 * ndigits - n
        if msb_first & ((1 << pad) - 1):
            raise ValueError("nonzero padding bits in hex word")
        msb_first >>= pad
        value = 0
        for i in range(n):
            value |= ((msb_first >> (n - 1 - i)) & 1) << i
        return cls(value, n)

    def to_hex(self) -> str:
        ndigits = (self.n + 3) // 4
        msb_first = 0
        for i in range(self.n):
            msb_first |= ((self.value >> i) & 1) << (self.n - 1 - i)
        msb_first <<= 4 * ndigits - self.n
        return format(msb_first, f"0{ndigits}X")

    def bit(self, i: int) -> int:
        """Bit at 1-indexed position i (paper convention)."""
        if not 1 <= i <= self.n:
            raise IndexError(f"bit index {i} out of range [1, {self.n}]")
        return (self.value >> (i - 1)) & 1

    def bits(self) -> tuple:
        return tuple((self.value >> i) & 1 for i in range(self.n))

    def to_array(self) -> np.ndarray:
        return np.array(self.bits(), dtype=np.uint8)

    def weight(self) -> int:
        return self.value.bit_count()

    def __len__(self) -> int:
        return self.n

    def __xor__(self, other: "BitWord") -> "BitWord":
        if not isinstance(other, BitWord):
            return NotImplemented
        if self.n != other.n:
            raise ValueError(f"length mismatch: {self.n} vs {other.n}")
        return BitWord(self.value ^ other.value, self.n)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitWord) and self.n == other.n and self.value == other.value
        )

    def __hash__(self) -> int:
        return hash((self.value, self.n))

    def __repr__(self) -> str:
        return f"BitWord('{''.join(str(b) for b in self.bits())}')"


class Gf2Matrix:
    """Immutable GF(2) matrix, rows bit-packed into integers (LSB = column 1)."""

    __slots__ = ("rows_int", "rows", "cols")

    def __init__(self, rows: Sequence[Sequence[int]]):
        packed = []
        cols = None
        for r in rows:
            bits = [int(b) for b in r]  # numpy scalars would overflow the shifts
            if cols is None:
                cols = len(bits)
            elif len(bits) != cols:
                raise ValueError("ragged rows")
            v = 0
            for i, b in enumerate(bits):
                if b not in (0, 1):
                    raise ValueError("entries must be 0 or 1")
                v |= b << i
            packed.append(v)
        if cols is None:
            raise ValueError("matrix needs at least one row")
        object.__setattr__(self, "rows_int", tuple(packed))
        object.__setattr__(self, "rows", len(packed))
        object.__setattr__(self, "cols", cols)

    def __setattr__(self, *args):
        raise AttributeError("Gf2Matrix is immutable")

    def __reduce__(self):
        return (Gf2Matrix.from_int_rows, (self.rows_int, self.cols))

    @classmethod
    def from_int_rows(cls, rows_int: Iterable[int], cols: int) -> "Gf2Matrix":
        m = object.__new__(cls)
        packed = tuple(int(r) for r in rows_int)
        for r in packed:
            if r < 0 or r >> cols:
                raise ValueError(f"row does not fit in {cols} columns")
        object.__setattr__(m, "rows_int", packed)
        object.__setattr__(m, "rows", len(packed))
        object.__setattr__(m, "cols", cols)
        return m

    @classmethod
    def from_array(cls, arr) -> "Gf2Matrix":
        a = np.asarray(arr)
        if a.ndim != 2:
            raise ValueError("expected 2-D array")
        return cls([[int(x) & 1 for x in row] for row in a])

    @classmethod
    def identity(cls, n: int) -> "Gf2Matrix":
        return cls.from_int_rows((1 << i for i in range(n)), n)

    def row(self, i: int) -> BitWord:
        return BitWord(self.rows_int[i], self.cols)

    def col(self, j: int) -> BitWord:
        if not 0 <= j < self.cols:
            raise IndexError("column out of range")
        v = 0
        for i, r in enumerate(self.rows_int):
            v |= ((r >> j) & 1) << i
        return BitWord(v, self.rows)

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for i, r in enumerate(self.rows_int):
            for j in range(self.cols):
                out[i, j] = (r >> j) & 1
        return out

    def transpose(self) -> "Gf2Matrix":
        return Gf2Matrix.from_int_rows(
            (self.col(j).value for j in range(self.cols)), self.rows
        )

    def matmul(self, other: "Gf2Matrix") -> "Gf2Matrix":
        if self.cols != other.rows:
            raise ValueError(f"dimension mismatch: {self.cols} vs {other.rows}")
        bt = other.transpose()
        out = []
        for r in self.rows_int:
            v = 0
            for j, c in enumerate(bt.rows_int):
                v |= _parity(r & c) << j
            out.append(v)
        return Gf2Matrix.from_int_rows(out, other.cols)

    def rank(self) -> int:
        rows = [r for r in self.rows_int if r]
        rank = 0
        for col in range(self.cols):
            mask = 1 << col
            piv = next((i for i in range(rank, len(rows)) if rows[i] & mask), None)
            if piv is None:
                continue
            rows[rank], rows[piv] = rows[piv], rows[rank]
            for i in range(len(rows)):
                if i != rank and rows[i] & mask:
                    rows[i] ^= rows[rank]
            rank += 1
            if rank == len(rows):
                break
        return rank

    def is_zero(self) -> bool:
        return all(r == 0 for r in self.rows_int)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Gf2Matrix)
            and self.cols == other.cols
            and self.rows_int == other.rows_int
        )

    def __hash__(self) -> int:
        return hash((self.rows_int, self.cols))

    def __repr__(self) -> str:
        return f"Gf2Matrix({self.rows}x{self.cols})"


def xor(a: BitWord, b: BitWord) -> BitWord:
    """Elementwise XOR of two equal-length words."""
    return a ^ b


def syndrome(h: Gf2Matrix, v: BitWord) -> BitWord:
    """Compute H @ v^T over GF(2).

    Each output bit is the XOR-parity of one matrix row ANDed with the
    input word; this is where the bit packing pays off, since syndrome
    checks dominate the decoder runtime.
    """
    if h.cols != v.n:
        raise ValueError(f"dimension mismatch: H has {h.cols} columns, v has {v.n} bits")
    out = 0
    for i, r in enumerate(h.rows_int):
        out |= _parity(r & v.value) << i
    return BitWord(out, h.rows)


def single_flip_syndromes(h: Gf2Matrix) -> tuple:
    """Syndromes of all one-bit-flip patterns: entry i-1 is H's i-th column.

    These are the s_i values the shift-register architecture stores; any
    error-pattern syndrome is an XOR of a subset of them (linearity).
    """
    return tuple(h.col(j) for j in range(h.cols))


def encode(g: Gf2Matrix, u: BitWord) -> BitWord:
    """Encode a message: u @ G over GF(2)."""
    if g.rows != u.n:
        raise ValueError(f"dimension mismatch: G has {g.rows} rows, u has {u.n} bits")
    v = 0
    for i in range(u.n):
        if (u.value >> i) & 1:
            v ^= g.rows_int[i]
    return BitWord(v, g.cols)


def right_inverse(g: Gf2Matrix) -> Gf2Matrix:
    """Right inverse M of a full-row-rank k x n matrix: G @ M = I_k.

    Gauss-Jordan elimination with pivot = first nonzero in column order.
    Raises RankDeficientError when rank(G) < k.
    """
    k, n = g.rows, g.cols
    # eliminate on [G | I_k]; `ops` mirrors the row operations
    work = list(g.rows_int)
    ops = [1 << i for i in range(k)]
    pivots = []
    r = 0
    for col in range(n):
        if r == k:
            break
        mask = 1 << col
        piv = next((i for i in range(r, k) if work[i] & mask), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        ops[r], ops[piv] = ops[piv], ops[r]
        for i in range(k):
            if i != r and work[i] & mask:
                work[i] ^= work[r]
                ops[i] ^= ops[r]
        pivots.append(col)
        r += 1
    if r < k:
        raise RankDeficientError(f"matrix rank {r} < {k}, no right inverse")
    # M has ops[i] (a k-bit row) at row pivots[i], zero rows elsewhere
    out = [0] * n
    for i, col in enumerate(pivots):
        out[col] = ops[i]
    return Gf2Matrix.from_int_rows(out, k)
