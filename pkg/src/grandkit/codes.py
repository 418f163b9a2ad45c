"""Linear block code construction and matrix file I/O.

Provides the 5G CRC-aided polar code used by the benchmark (CRC bits
folded into the generator so the whole codebook is one linear code),
systematic random codes for code-agnosticism tests, and alist / dense-hex
matrix loaders so any externally supplied H or G can be decoded.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .gf2 import BitWord, Gf2Matrix, RankDeficientError, right_inverse

__all__ = [
    "LinearCode",
    "CaPolarSpec",
    "build_ca_polar",
    "build_random_linear",
    "derive_parity_from_generator",
    "load_matrix",
    "save_matrix",
    "load_reliability_fixture",
    "MatrixFormatError",
]

_FIXTURE = "nr_polar_reliability.txt"


class MatrixFormatError(ValueError):
    """Malformed matrix file (message carries file/line context)."""


class LinearCode:
    """An (n, k) binary linear code with all decode-side tables precomputed.

    Immutable after construction; instances are safe to share across
    worker processes.  `col_syndromes[j]` is the integer-packed syndrome
    of flipping (1-indexed) bit j+1, i.e. column j of H; the decoders
    combine these instead of recomputing H @ v.
    """

    def __init__(self, n: int, k: int, h: Gf2Matrix, g: Gf2Matrix,
                 ginv: Gf2Matrix, name: str = "code", validate: bool = True):
        if h.cols != n or g.cols != n or g.rows != k or h.rows != n - k:
            raise ValueError("matrix dimensions inconsistent with (n, k)")
        if ginv.rows != n or ginv.cols != k:
            raise ValueError("G^-1 must be n x k")
        if validate:
            if not g.matmul(h.transpose()).is_zero():
                raise ValueError("G @ H^T != 0: H and G do not describe the same code")
            if h.rank() != n - k:
                raise RankDeficientError("H is rank deficient")
            if g.rank() != k:
                raise RankDeficientError("G is rank deficient")
            if g.matmul(ginv) != Gf2Matrix.identity(k):
                raise ValueError("G @ G^-1 is not the identity")
        self.n = n
        self.k = k
        self.H = h
        self.G = g
        self.Ginv = ginv
        self.name = name
        # decode-side tables
        self.h_rows = h.rows_int
        self.col_syndromes = tuple(h.col(j).value for j in range(n))
        self.g_arr = g.to_array()
        self.h_arr = h.to_array()
        self.ginv_arr = ginv.to_array()

    def encode(self, u: BitWord) -> BitWord:
        from .gf2 import encode as _enc
        return _enc(self.G, u)

    def encode_batch(self, msgs: np.ndarray) -> np.ndarray:
        """Encode a (batch, k) uint8 message array; float32 matmul is exact here."""
        prod = msgs.astype(np.float32) @ self.g_arr.astype(np.float32)
        return (prod.astype(np.int64) & 1).astype(np.uint8)

    def syndrome_batch(self, words: np.ndarray) -> np.ndarray:
        prod = words.astype(np.float32) @ self.h_arr.T.astype(np.float32)
        return (prod.astype(np.int64) & 1).astype(np.uint8)

    def syndrome_int(self, word_int: int) -> int:
        out = 0
        for i, r in enumerate(self.h_rows):
            out |= ((r & word_int).bit_count() & 1) << i
        return out

    def recover_message_int(self, codeword_int: int) -> int:
        """Message bits of a codeword: c @ G^-1, packed little-endian."""
        out = 0
        ginv_rows = self.Ginv.rows_int
        v = codeword_int
        while v:
            low = v & -v
            out ^= ginv_rows[low.bit_length() - 1]
            v ^= low
        return out

    def __repr__(self):
        return f"LinearCode({self.name}, n={self.n}, k={self.k})"


# ---------------------------------------------------------------------------
# CRC-aided polar construction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CaPolarSpec:
    """Parameters of a CRC-aided polar code.

    crc_poly holds the polynomial coefficients from degree crc_len down to
    degree 0 (leading coefficient included).  frozen_set are the
    synthetic-channel indices forced to zero; the k + crc_len payload bits
    occupy the remaining indices in natural ascending order, message bits
    first, CRC bits last.
    """

    n: int
    k: int
    crc_len: int
    crc_poly: tuple
    frozen_set: frozenset

    def __post_init__(self):
        if self.n < 2 or self.n & (self.n - 1):
            raise ValueError("n must be a power of two")
        if self.k + self.crc_len > self.n:
            raise ValueError("k + crc_len exceeds n")
        if len(self.crc_poly) != self.crc_len + 1 or (self.crc_len and self.crc_poly[0] != 1):
            raise ValueError("crc_poly must list crc_len+1 coefficients, leading 1")
        if len(self.frozen_set) != self.n - self.k - self.crc_len:
            raise ValueError("frozen_set size must be n - (k + crc_len)")
        if max(self.frozen_set, default=0) >= self.n or min(self.frozen_set, default=0) < 0:
            raise ValueError("frozen indices out of range")


def load_reliability_fixture(path=None):
    """Read the reliability-sequence fixture; returns (sequence, crc11_poly)."""
    if path is None:
        text = importlib.resources.files("grandkit.data").joinpath(_FIXTURE).read_text()
    else:
        text = Path(path).read_text()
    seq = []
    crc = None
    in_seq = False
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("version"):
            continue
        if line.startswith("crc11"):
            crc = tuple(int(c) for c in line.split()[1])
            continue
        if line == "sequence":
            in_seq = True
            continue
        if in_seq:
            seq.extend(int(tok) for tok in line.split())
    if crc is None or not seq:
        raise MatrixFormatError("reliability fixture missing crc or sequence")
    return seq, crc


def ca_polar_spec(n: int = 128, k: int = 105, crc_len: int = 11,
                  fixture_path=None) -> CaPolarSpec:
    """CaPolarSpec from the shipped 38.212 fixture: frozen set = least
    reliable n - (k + crc_len) indices among those < n."""
    seq, crc = load_reliability_fixture(fixture_path)
    sub = [i for i in seq if i < n]
    if len(sub) != n:
        raise ValueError(f"fixture does not cover block length {n}")
    frozen = frozenset(sub[: n - k - crc_len])
    if crc_len != len(crc) - 1:
        raise ValueError(f"fixture CRC is degree {len(crc) - 1}, requested {crc_len}")
    return CaPolarSpec(n=n, k=k, crc_len=crc_len, crc_poly=crc, frozen_set=frozen)


def crc_remainder(bits: Sequence[int], poly: Sequence[int]) -> list:
    """CRC over GF(2): remainder of bits * x^deg divided by poly (zero init)."""
    deg = len(poly) - 1
    reg = list(bits) + [0] * deg
    for i in range(len(bits)):
        if reg[i]:
            for j, p in enumerate(poly):
                reg[i + j] ^= p
    return reg[len(bits):]


def _polar_transform_matrix(n: int) -> np.ndarray:
    f = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    g = np.array([[1]], dtype=np.uint8)
    while g.shape[0] < n:
        g = np.kron(g, f)
    return g


def build_ca_polar(spec: CaPolarSpec, name: Optional[str] = None) -> LinearCode:
    """Build the (n, k + crc_len) CA-polar codebook as a LinearCode.

    The CRC bits are linear functions of the message (zero-initialized
    register), so the codebook { (u || crc(u)) placed on the information
    indices, times the polar transform } is itself a linear code of
    dimension k; H comes out as a nullspace basis of that generator.
    """
    n, k, c = spec.n, spec.k, spec.crc_len
    info_positions = sorted(set(range(n)) - spec.frozen_set)
    assert len(info_positions) == k + c
    fn = _polar_transform_matrix(n)

    g_rows = []
    for i in range(k):
        msg = [0] * k
        msg[i] = 1
        payload = msg + crc_remainder(msg, spec.crc_poly) if c else msg
        u = np.zeros(n, dtype=np.uint8)
        u[info_positions] = payload
        x = (u.astype(np.int64) @ fn.astype(np.int64)) & 1
        g_rows.append([int(b) for b in x])
    g = Gf2Matrix(g_rows)
    h = derive_parity_from_generator(g)
    ginv = right_inverse(g)
    label = name or f"ca-polar({n},{k}+{c})"
    return LinearCode(n, k, h, g, ginv, name=label)


# ---------------------------------------------------------------------------
# random systematic codes
# ---------------------------------------------------------------------------

def build_random_linear(n: int, k: int, seed: int) -> LinearCode:
    """Random systematic code G = [I_k | P]; deterministic in the seed.

    Systematic form is always full rank, and gives H = [P^T | I_{n-k}]
    and the right inverse [I_k ; 0] for free.
    """
    if not 0 < k < n:
        raise ValueError("need 0 < k < n")
    rng = np.random.default_rng(seed)
    p = rng.integers(0, 2, size=(k, n - k), dtype=np.uint8)
    g = Gf2Matrix(np.hstack([np.eye(k, dtype=np.uint8), p]))
    h = Gf2Matrix(np.hstack([p.T, np.eye(n - k, dtype=np.uint8)]))
    ginv = Gf2Matrix(np.vstack([np.eye(k, dtype=np.uint8),
                                np.zeros((n - k, k), dtype=np.uint8)]))
    return LinearCode(n, k, h, g, ginv, name=f"random({n},{k},seed={seed})")


def derive_parity_from_generator(g: Gf2Matrix) -> Gf2Matrix:
    """Nullspace basis of a full-row-rank generator: H with G @ H^T = 0."""
    k, n = g.rows, g.cols
    work = list(g.rows_int)
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
        for i in range(k):
            if i != r and work[i] & mask:
                work[i] ^= work[r]
        pivots.append(col)
        r += 1
    if r < k:
        raise RankDeficientError(f"generator rank {r} < {k}")
    free_cols = [c for c in range(n) if c not in pivots]
    rows = []
    for f in free_cols:
        v = 1 << f
        fmask = 1 << f
        for i, pcol in enumerate(pivots):
            if work[i] & fmask:
                v |= 1 << pcol
        rows.append(v)
    return Gf2Matrix.from_int_rows(rows, n)


def make_code_from_matrices(h: Optional[Gf2Matrix], g: Optional[Gf2Matrix],
                            name: str = "user") -> LinearCode:
    """LinearCode from H and/or G; the missing one is derived by duality."""
    if g is None and h is None:
        raise ValueError("need H or G")
    if g is None:
        g = derive_parity_from_generator(h)  # nullspace of H is the codebook
    if h is None:
        h = derive_parity_from_generator(g)
    n = g.cols
    k = g.rows
    return LinearCode(n, k, h, g, right_inverse(g), name=name)


# ---------------------------------------------------------------------------
# matrix file formats
# ---------------------------------------------------------------------------

def load_matrix(path, fmt: Optional[str] = None) -> Gf2Matrix:
    """Load a GF(2) matrix from an alist or dense-hex file.

    fmt is "alist" or "hex"; None guesses from the extension
    (".alist" -> alist, anything else -> hex).
    """
    path = Path(path)
    if fmt is None:
        fmt = "alist" if path.suffix == ".alist" else "hex"
    if fmt == "alist":
        return _load_alist(path)
    if fmt == "hex":
        return _load_hex(path)
    raise ValueError(f"unknown matrix format {fmt!r}")


def save_matrix(m: Gf2Matrix, path, fmt: Optional[str] = None) -> None:
    path = Path(path)
    if fmt is None:
        fmt = "alist" if path.suffix == ".alist" else "hex"
    if fmt == "alist":
        _save_alist(m, path)
    elif fmt == "hex":
        _save_hex(m, path)
    else:
        raise ValueError(f"unknown matrix format {fmt!r}")


def _load_hex(path) -> Gf2Matrix:
    """Dense-hex: header "rows cols", then one hex string per row, MSB = column 1."""
    lines = [ln.strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise MatrixFormatError(f"{path}: empty file")
    try:
        rows, cols = (int(t) for t in lines[0].split())
    except ValueError as e:
        raise MatrixFormatError(f"{path}:1: bad header (want 'rows cols'): {e}") from None
    if len(lines) - 1 != rows:
        raise MatrixFormatError(f"{path}: expected {rows} rows, found {len(lines) - 1}")
    out = []
    for i, ln in enumerate(lines[1:], start=2):
        try:
            out.append(BitWord.from_hex(ln, cols).value)
        except ValueError as e:
            raise MatrixFormatError(f"{path}:{i}: {e}") from None
    return Gf2Matrix.from_int_rows(out, cols)


def _save_hex(m: Gf2Matrix, path) -> None:
    lines = [f"{m.rows} {m.cols}"]
    lines += [m.row(i).to_hex() for i in range(m.rows)]
    Path(path).write_text("\n".join(lines) + "\n")


def _load_alist(path) -> Gf2Matrix:
    """MacKay alist: "ncols nrows", max degrees, per-column then per-row
    1-indexed entries, zero padded.  Returns the nrows x ncols matrix."""
    toks = Path(path).read_text().split()
    it = iter(toks)

    def take(what):
        try:
            return int(next(it))
        except StopIteration:
            raise MatrixFormatError(f"{path}: truncated alist ({what})") from None
        except ValueError as e:
            raise MatrixFormatError(f"{path}: bad integer ({what}): {e}") from None

    ncols = take("ncols")
    nrows = take("nrows")
    if ncols <= 0 or nrows <= 0:
        raise MatrixFormatError(f"{path}: non-positive dimensions")
    max_col_deg = take("max col degree")
    max_row_deg = take("max row degree")
    col_deg = [take("col degree") for _ in range(ncols)]
    row_deg = [take("row degree") for _ in range(nrows)]
    if col_deg and max(col_deg) > max_col_deg or row_deg and max(row_deg) > max_row_deg:
        raise MatrixFormatError(f"{path}: degree exceeds declared maximum")
    rows_int = [0] * nrows
    for c in range(ncols):
        for _ in range(max_col_deg):
            r = take("column entry")
            if r == 0:
                continue
            if not 1 <= r <= nrows:
                raise MatrixFormatError(f"{path}: row index {r} out of range")
            rows_int[r - 1] |= 1 << c
    # per-row lists are redundant; read and cross-check when present
    try:
        for r in range(nrows):
            row_val = 0
            for _ in range(max_row_deg):
                c = int(next(it))
                if c == 0:
                    continue
                if not 1 <= c <= ncols:
                    raise MatrixFormatError(f"{path}: column index {c} out of range")
                row_val |= 1 << (c - 1)
            if row_val != rows_int[r]:
                raise MatrixFormatError(f"{path}: row {r + 1} disagrees with column lists")
    except StopIteration:
        raise MatrixFormatError(f"{path}: truncated alist (row entries)") from None
    return Gf2Matrix.from_int_rows(rows_int, ncols)


def _save_alist(m: Gf2Matrix, path) -> None:
    cols = [[i + 1 for i in range(m.rows) if (m.rows_int[i] >> c) & 1] for c in range(m.cols)]
    rows = [[c + 1 for c in range(m.cols) if (m.rows_int[r] >> c) & 1] for r in range(m.rows)]
    maxc = max((len(c) for c in cols), default=0)
    maxr = max((len(r) for r in rows), default=0)
    out = [f"{m.cols} {m.rows}", f"{maxc} {maxr}"]
    out.append(" ".join(str(len(c)) for c in cols))
    out.append(" ".join(str(len(r)) for r in rows))
    for c in cols:
        out.append(" ".join(str(x) for x in c + [0] * (maxc - len(c))))
    for r in rows:
        out.append(" ".join(str(x) for x in r + [0] * (maxr - len(r))))
    Path(path).write_text("\n".join(out) + "\n")
