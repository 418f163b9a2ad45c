import numpy as np
import pytest

from grandkit.codes import (CaPolarSpec, MatrixFormatError, build_ca_polar,
                            build_random_linear, ca_polar_spec, crc_remainder,
                            derive_parity_from_generator, load_matrix,
                            load_reliability_fixture, make_code_from_matrices,
                            save_matrix)
from grandkit.gf2 import BitWord, Gf2Matrix, RankDeficientError, encode, syndrome

HAMMING_G = [[1, 1, 1, 0, 0, 0, 0],
             [1, 0, 0, 1, 1, 0, 0],
             [0, 1, 0, 1, 0, 1, 0],
             [1, 1, 0, 1, 0, 0, 1]]
HAMMING_H = [[1, 0, 1, 0, 1, 0, 1],
             [0, 1, 1, 0, 0, 1, 1],
             [0, 0, 0, 1, 1, 1, 1]]


# ---------------------------------------------------------------------------
# fixture data
# ---------------------------------------------------------------------------

def test_reliability_fixture_structure():
    seq, crc = load_reliability_fixture()
    assert sorted(seq) == list(range(1024))
    # universal partial order: dropping any set bit must give an earlier index
    pos = {v: i for i, v in enumerate(seq)}
    for b in range(1024):
        bit = 1
        while bit <= b:
            if b & bit:
                assert pos[b ^ bit] < pos[b]
            bit <<= 1
    # gCRC11 = D^11 + D^10 + D^9 + D^5 + 1
    assert crc == (1, 1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1)


def test_crc_remainder_linear():
    poly = (1, 1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1)
    rng = np.random.default_rng(0)
    for _ in range(50):
        a = rng.integers(0, 2, 105).tolist()
        b = rng.integers(0, 2, 105).tolist()
        ab = [(x + y) % 2 for x, y in zip(a, b)]
        ra, rb, rab = (crc_remainder(v, poly) for v in (a, b, ab))
        assert rab == [(x + y) % 2 for x, y in zip(ra, rb)]
    assert crc_remainder([0] * 105, poly) == [0] * 11


# ---------------------------------------------------------------------------
# CA-polar
# ---------------------------------------------------------------------------

def test_ca_polar_128_dimensions():
    code = build_ca_polar(ca_polar_spec(128, 105, 11))
    assert (code.n, code.k) == (128, 105)
    assert code.H.rows == 23  # n - k parity checks
    assert code.G.rank() == 105 and code.H.rank() == 23


def test_ca_polar_toy_rate_quarter():
    # n=4, k=1, no CRC, worst 3 indices frozen: the generator is the most
    # reliable row of the 2-fold Kronecker transform, here (1,1,1,1)
    spec = CaPolarSpec(n=4, k=1, crc_len=0, crc_poly=(1,), frozen_set=frozenset({0, 1, 2}))
    code = build_ca_polar(spec)
    f2 = [[1, 0, 0, 0], [1, 1, 0, 0], [1, 0, 1, 0], [1, 1, 1, 1]]
    assert code.G.to_array().tolist() == [f2[3]]


def test_ca_polar_self_consistency():
    code = build_ca_polar(ca_polar_spec(128, 105, 11))
    rng = np.random.default_rng(2)
    for _ in range(100):
        u = BitWord(int.from_bytes(rng.bytes(14), "little") >> 7, 105)
        cw = code.encode(u)
        assert syndrome(code.H, cw).value == 0
        assert code.recover_message_int(cw.value) == u.value


def test_ca_polar_codewords_pass_crc():
    # recover the pre-transform vector (the transform is self-inverse over
    # GF(2)), read out the payload, and recompute the CRC independently
    seq, _ = load_reliability_fixture()
    frozen = frozenset([i for i in seq if i < 32][:8])  # worst 8 of 32
    spec = CaPolarSpec(n=32, k=18, crc_len=6, crc_poly=(1, 0, 0, 0, 0, 1, 1),
                       frozen_set=frozen)
    code = build_ca_polar(spec)
    fn = np.array([[1]], dtype=np.uint8)
    f = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    while fn.shape[0] < 32:
        fn = np.kron(fn, f)
    info = sorted(set(range(32)) - spec.frozen_set)
    rng = np.random.default_rng(5)
    for _ in range(30):
        u = BitWord(int(rng.integers(0, 1 << 18)), 18)
        cw = code.encode(u).to_array()
        pre = (cw.astype(np.int64) @ fn.astype(np.int64)) & 1
        frozen = sorted(spec.frozen_set)
        assert not pre[frozen].any()
        payload = pre[info]
        msg, crc = payload[:18].tolist(), payload[18:].tolist()
        assert msg == list(u.bits())
        assert crc == crc_remainder(msg, spec.crc_poly)


def test_ca_polar_fixture_mismatch_raises():
    with pytest.raises(ValueError):
        ca_polar_spec(128, 105, 8)  # fixture CRC is 11 bits


# ---------------------------------------------------------------------------
# random codes and duality
# ---------------------------------------------------------------------------

def test_random_linear_deterministic():
    a = build_random_linear(8, 4, seed=1)
    b = build_random_linear(8, 4, seed=1)
    assert a.G == b.G and a.H == b.H
    c = build_random_linear(8, 4, seed=2)
    assert a.G != c.G


def test_random_linear_duality():
    code = build_random_linear(8, 4, seed=3)
    assert code.G.matmul(code.H.transpose()).is_zero()


def test_random_linear_full_enumeration():
    code = build_random_linear(16, 8, seed=7)
    seen = set()
    for u in range(256):
        cw = encode(code.G, BitWord(u, 8))
        assert syndrome(code.H, cw).value == 0
        seen.add(cw.value)
    assert len(seen) == 256  # injective encoding


def test_derive_parity_systematic():
    rng = np.random.default_rng(13)
    p = rng.integers(0, 2, size=(4, 3))
    g = Gf2Matrix(np.hstack([np.eye(4, dtype=int), p]))
    h = derive_parity_from_generator(g)
    expect = Gf2Matrix(np.hstack([p.T, np.eye(3, dtype=int)]))
    # same row space: over GF(2), equal rank and zero cross products suffice
    assert h.rank() == 3 == expect.rank()
    assert g.matmul(h.transpose()).is_zero()
    assert g.matmul(expect.transpose()).is_zero()
    stacked = Gf2Matrix.from_int_rows(h.rows_int + expect.rows_int, 7)
    assert stacked.rank() == 3


def test_derive_parity_hamming_row_space():
    g = Gf2Matrix(HAMMING_G)
    h = derive_parity_from_generator(g)
    std = Gf2Matrix(HAMMING_H)
    stacked = Gf2Matrix.from_int_rows(h.rows_int + std.rows_int, 7)
    assert h.rank() == 3 and stacked.rank() == 3


def test_derive_parity_enumeration():
    code = build_random_linear(16, 8, seed=21)
    h = derive_parity_from_generator(code.G)
    for u in range(256):
        cw = encode(code.G, BitWord(u, 8))
        assert syndrome(h, cw).value == 0


def test_derive_parity_rank_deficient():
    with pytest.raises(RankDeficientError):
        derive_parity_from_generator(Gf2Matrix([[1, 1, 0], [1, 1, 0]]))


def test_make_code_from_h_only():
    code = make_code_from_matrices(Gf2Matrix(HAMMING_H), None)
    assert (code.n, code.k) == (7, 4)
    assert code.G.matmul(code.H.transpose()).is_zero()


# ---------------------------------------------------------------------------
# matrix files
# ---------------------------------------------------------------------------

def test_hex_round_trip(tmp_path):
    rng = np.random.default_rng(31)
    m = Gf2Matrix(rng.integers(0, 2, size=(5, 11)))
    path = tmp_path / "m.hex"
    save_matrix(m, path)
    assert load_matrix(path) == m


def test_alist_round_trip(tmp_path):
    rng = np.random.default_rng(37)
    m = Gf2Matrix(rng.integers(0, 2, size=(6, 14)))
    path = tmp_path / "m.alist"
    save_matrix(m, path)
    assert load_matrix(path) == m


def test_alist_hamming(tmp_path):
    m = Gf2Matrix(HAMMING_H)
    path = tmp_path / "hamming.alist"
    save_matrix(m, path)
    got = load_matrix(path)
    assert (got.rows, got.cols) == (3, 7)
    assert got == m


def test_truncated_alist_errors(tmp_path):
    m = Gf2Matrix(HAMMING_H)
    path = tmp_path / "h.alist"
    save_matrix(m, path)
    text = path.read_text().split()
    (tmp_path / "trunc.alist").write_text(" ".join(text[: len(text) // 2]))
    with pytest.raises(MatrixFormatError):
        load_matrix(tmp_path / "trunc.alist")


def test_bad_hex_errors(tmp_path):
    path = tmp_path / "bad.hex"
    path.write_text("2 8\nFF\nZZ\n")
    with pytest.raises(MatrixFormatError) as ei:
        load_matrix(path)
    assert "bad.hex" in str(ei.value)


def test_hex_header_errors(tmp_path):
    path = tmp_path / "noheader.hex"
    path.write_text("FF\nAB\n")
    with pytest.raises(MatrixFormatError):
        load_matrix(path)
