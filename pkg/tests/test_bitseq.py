import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lrmkit.bitseq import (
    CompressedBitSeq,
    PlainBitSeq,
    binomial_bits,
    build_compressed,
    build_plain,
    compressed_payload_bound,
    plain_directory_bits,
    plain_overhead_bound,
    rank,
    select,
    size_report,
)
from lrmkit.errors import RangeError


def check_against_scan(S, bits):
    n = len(bits)
    assert len(S) == n
    assert S.to_bits().tolist() == list(bits)
    prefix = np.concatenate([[0], np.cumsum(bits)]).astype(int).tolist()
    for i in range(n + 1):
        assert S.rank1(i) == prefix[i]
        assert S.rank0(i) == i - prefix[i]
    ones = [i + 1 for i, b in enumerate(bits) if b]
    zeros = [i + 1 for i, b in enumerate(bits) if not b]
    for k, p in enumerate(ones, 1):
        assert S.select1(k) == p
    for k, p in enumerate(zeros, 1):
        assert S.select0(k) == p
    for i in range(1, n + 1):
        assert S.access(i) == bits[i - 1]


@pytest.mark.parametrize("cls", [PlainBitSeq, CompressedBitSeq])
@pytest.mark.parametrize("text", ["", "0", "1", "10011000", "10010000", "1111", "0" * 64])
def test_small_strings(cls, text):
    bits = [int(c) for c in text]
    check_against_scan(cls(text), bits)


def test_examples():
    B = build_plain("10011000")
    assert (B.n, B.ones) == (8, 3)
    assert rank(B, 1, 5) == 3 and rank(B, 1, 0) == 0
    assert select(B, 1, 2) == 4
    assert build_plain("").n == 0 and build_plain("").ones == 0
    assert build_plain("1111").rank1(4) == 4
    C = build_compressed("10010000")
    assert C.ones == 2 and C.rank1(7) == 2 and C.select1(2) == 4 and C.select1(1) == 1
    assert binomial_bits(8, 2) == 5
    Z = build_compressed("0" * 64)
    rep = size_report(Z)
    assert Z.ones == 0 and rep.payload_bits < 64
    assert rep.payload_bits == 4 * math.ceil(64 / 15)


def test_size_reports():
    P = build_plain("10011000")
    rep = P.size_report()
    assert rep.payload_bits == 8 and rep.total_bits >= 8
    C = build_compressed("10011000")
    rep = C.size_report()
    assert rep.total_bits == rep.payload_bits + rep.directory_bits
    assert rep.payload_bits >= 0 and rep.directory_bits >= 0


def test_random_against_scan():
    """1000 random strings, n <= 4096, densities {0, 0.01, 0.5, 0.99, 1}."""
    rng = np.random.default_rng(11)
    dens = [0.0, 0.01, 0.5, 0.99, 1.0]
    for t in range(1000):
        n = int(rng.integers(0, 4097)) if t % 4 else int(rng.choice([0, 1, 15, 16, 64, 511, 512, 513, 4096]))
        bits = (rng.random(n) < dens[t % 5]).astype(np.uint8)
        P, C = PlainBitSeq(bits), CompressedBitSeq(bits)
        pre = np.concatenate([[0], np.cumsum(bits)])
        probes = rng.integers(0, n + 1, size=40)
        for i in probes.tolist():
            assert P.rank1(i) == C.rank1(i) == pre[i]
        ones = np.flatnonzero(bits) + 1
        zeros = np.flatnonzero(bits == 0) + 1
        for pos, b in ((ones, 1), (zeros, 0)):
            if pos.size:
                for k in rng.integers(1, pos.size + 1, size=20).tolist():
                    assert P.select(b, k) == C.select(b, k) == pos[k - 1]
        assert C.to_bits().tolist() == bits.tolist()


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(0, 1), max_size=700))
def test_plain_and_compressed_agree(bits):
    check_against_scan(PlainBitSeq(bits), bits)
    check_against_scan(CompressedBitSeq(bits), bits)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 1), max_size=3000))
def test_space_accounting(bits):
    n, m = len(bits), sum(bits)
    P = PlainBitSeq(bits)
    rep = P.size_report()
    assert rep.payload_bits == n
    assert rep.directory_bits == plain_directory_bits(n, m) <= plain_overhead_bound(n)
    C = CompressedBitSeq(bits)
    crep = C.size_report()
    assert crep.payload_bits <= compressed_payload_bound(n, m)
    assert compressed_payload_bound(n, m) == binomial_bits(n, m) + 5 * math.ceil(n / 15)


def test_select_rank_inverse():
    rng = np.random.default_rng(5)
    bits = (rng.random(20000) < 0.3).astype(np.uint8)
    for S in (PlainBitSeq(bits), CompressedBitSeq(bits)):
        for k in range(1, S.ones + 1, 37):
            p = S.select1(k)
            assert S.rank1(p) == k and S.access(p) == 1


@pytest.mark.parametrize("cls", [PlainBitSeq, CompressedBitSeq])
def test_range_errors(cls):
    S = cls("10011000")
    for bad in (lambda: S.rank1(-1), lambda: S.rank1(9), lambda: S.select1(0), lambda: S.select1(4),
                lambda: S.select0(6), lambda: S.access(0), lambda: S.access(9)):
        with pytest.raises(RangeError):
            bad()
    with pytest.raises(RangeError):
        cls("").select1(1)
