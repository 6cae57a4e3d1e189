"""Static bit sequences with rank and select.

Two representations share one interface:

* :class:`PlainBitSeq` stores the n payload bits verbatim, plus a two-level
  rank directory (512-bit superblocks, 64-bit words) and select samples.
* :class:`CompressedBitSeq` stores 15-bit blocks as (class, offset) pairs,
  where class is the popcount and offset the rank of the block among all
  patterns of that popcount. Payload is close to ceil(lg C(n, m)).

Positions are 1-based at the public boundary (``rank(b, i)`` counts bits
in ``B[1..i]``); everything prefixed with an underscore is 0-based.

Directory probe bound: rank touches one superblock entry and at most one
word (plain) or 31 class codes (compressed); select does a binary search
over the superblocks between two consecutive samples (one sample every 512
occurrences) and then scans at most one superblock.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Union

import numpy as np

from . import _kernels, _nav
from .errors import RangeError

SUPER_BITS = 512
WORD_BITS = 64
BLOCK_REL_BITS = 9  # a count in [0, 448] relative to the enclosing superblock
SELECT_SAMPLE = 512

RRR_BLOCK = 15
RRR_CLASS_BITS = 4
RRR_BLOCKS_PER_SUPER = 32

# Plain-variant overhead bound: directory_bits <= C * n / lg n + C0 for n < 2**64.
PLAIN_OVERHEAD_C = 32
PLAIN_OVERHEAD_C0 = 512

BitsLike = Union[str, bytes, Iterable[int], np.ndarray]


@dataclass(frozen=True)
class SizeReport:
    payload_bits: int
    directory_bits: int

    @property
    def total_bits(self) -> int:
        return self.payload_bits + self.directory_bits

    def as_dict(self) -> dict:
        return {
            "payload_bits": self.payload_bits,
            "directory_bits": self.directory_bits,
            "total_bits": self.total_bits,
        }


def to_bit_array(bits: BitsLike) -> np.ndarray:
    """Normalise a bit string ('0'/'1' text, iterable of ints, array) to uint8."""
    if isinstance(bits, np.ndarray):
        arr = bits.astype(np.uint8, copy=False).ravel()
    elif isinstance(bits, str):
        if bits.strip("01"):
            raise ValueError("bit string may contain only '0' and '1'")
        arr = (np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")).astype(np.uint8)
    else:
        arr = np.fromiter((1 if b else 0 for b in bits), dtype=np.uint8)
    if arr.size and arr.max() > 1:
        raise ValueError("bits must be 0 or 1")
    return arr


def pack_words(bits: np.ndarray) -> np.ndarray:
    """Pack a 0/1 array LSB-first into uint64 words, plus one zero sentinel word."""
    packed = np.packbits(bits.astype(np.uint8, copy=False), bitorder="little")
    pad = (-packed.size) % 8
    if pad:
        packed = np.concatenate([packed, np.zeros(pad, dtype=np.uint8)])
    return np.concatenate([packed.view("<u8"), np.zeros(1, dtype=np.uint64)]).astype(np.uint64)


def unpack_words(words, n: int) -> np.ndarray:
    raw = np.asarray(words, dtype=np.uint64).view(np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n].copy()


def _width(value: int) -> int:
    """Bits needed to store any integer in [0, value]."""
    return max(1, int(value).bit_length())


_POP8 = [bin(b).count("1") for b in range(256)]
_SEL8 = [
    next(j for j in range(8) if bin(b & ((2 << j) - 1)).count("1") == r + 1) if r < _POP8[b] else -1
    for b in range(256)
    for r in range(8)
]


def _select_in_word(x: int, r: int) -> int:
    """0-based index of the r-th (1-based) set bit of x."""
    sh = 0
    while True:
        b = (x >> sh) & 0xFF
        c = _POP8[b]
        if r <= c:
            return sh + _SEL8[(b << 3) + r - 1]
        r -= c
        sh += 8


class BitSeq:
    """Shared public surface; subclasses supply the 0-based primitives."""

    n: int
    ones: int

    def __len__(self) -> int:
        return self.n

    def _rank1(self, i: int) -> int:
        raise NotImplementedError

    def _select1(self, k: int) -> int:
        raise NotImplementedError

    def _select0(self, k: int) -> int:
        raise NotImplementedError

    def _access(self, x: int) -> int:
        return self._rank1(x + 1) - self._rank1(x)

    def rank(self, b: int, i: int) -> int:
        """Number of ``b`` bits among B[1..i]; ``i`` ranges over [0..n]."""
        if not 0 <= i <= self.n:
            raise RangeError(f"rank position {i} outside [0..{self.n}]")
        r = self._rank1(i)
        return r if b else i - r

    def rank1(self, i: int) -> int:
        return self.rank(1, i)

    def rank0(self, i: int) -> int:
        return self.rank(0, i)

    def select(self, b: int, k: int) -> int:
        """Smallest position i (1-based) with rank(b, i) == k."""
        total = self.ones if b else self.n - self.ones
        if not 1 <= k <= total:
            raise RangeError(f"select({b}, {k}) outside [1..{total}]")
        return (self._select1(k) if b else self._select0(k)) + 1

    def select1(self, k: int) -> int:
        return self.select(1, k)

    def select0(self, k: int) -> int:
        return self.select(0, k)

    def access(self, i: int) -> int:
        """Bit B[i] for 1-based i."""
        if not 1 <= i <= self.n:
            raise RangeError(f"access position {i} outside [1..{self.n}]")
        return self._access(i - 1)

    def __getitem__(self, i: int) -> int:
        return self.access(i)

    def to_bits(self) -> np.ndarray:
        raise NotImplementedError

    def to_string(self) -> str:
        return "".join("1" if b else "0" for b in self.to_bits().tolist())

    def size_report(self) -> SizeReport:
        raise NotImplementedError


def _superblock_samples(positions: np.ndarray, super_len: int, nsuper: int) -> list[int]:
    """Superblock index of every SELECT_SAMPLE-th occurrence, closed by a bound."""
    samples = (positions[::SELECT_SAMPLE] // super_len).tolist()
    samples.append(max(nsuper - 1, 0))
    return samples


class PlainBitSeq(BitSeq):
    """Uncompressed bit sequence: n payload bits plus an o(n) directory."""

    _kind = 0  # word view passed to the compiled kernels

    def __init__(self, bits: BitsLike):
        arr = to_bit_array(bits)
        self.n = int(arr.size)
        self._words = pack_words(arr)
        counts = np.bitwise_count(self._words).astype(np.int64)
        self._set_directory(counts)

    def _set_directory(self, counts: np.ndarray) -> None:
        self._super, self._block, self._samples1, self._samples0, ones = _kernels.bit_directory(
            counts, self.n, SUPER_BITS // WORD_BITS, WORD_BITS, SELECT_SAMPLE
        )
        self.ones = int(ones)

    @classmethod
    def from_words(cls, words, n: int) -> "PlainBitSeq":
        return cls(unpack_words(words, n))

    @property
    def kernel_args(self) -> tuple:
        """(words, super, block, samples1, samples0) for the compiled walks."""
        return self._words, self._super, self._block, self._samples1, self._samples0

    def _rank1(self, i: int) -> int:
        return _nav.rank1(self._words, self._kind, self._super, self._block, i)

    def _access(self, x: int) -> int:
        return _nav.access(self._words, x)

    def _select1(self, k: int) -> int:
        return _nav.select1(self._words, self._kind, self._super, self._block, self._samples1, k)

    def _select0(self, k: int) -> int:
        return _nav.select0(self._words, self._super, self._block, self._samples0, k)

    def to_bits(self) -> np.ndarray:
        return unpack_words(self._words, self.n)

    def size_report(self) -> SizeReport:
        w = _width(self.n)
        dirs = self._super.size * w + self._block.size * BLOCK_REL_BITS
        dirs += (self._samples1.size + self._samples0.size) * w
        return SizeReport(self.n, dirs)


def plain_directory_bits(n: int, ones: int) -> int:
    """Exact directory size of a :class:`PlainBitSeq` over n bits with ``ones`` ones.

    superblock counts (one per 512 bits, lg(n+1) bits each), per-word
    relative counts (9 bits each) and the two select sample tables.
    """
    w = _width(n)
    nwords = -(-n // WORD_BITS) + 1
    nsuper = -(-nwords // (SUPER_BITS // WORD_BITS))
    samples = -(-ones // SELECT_SAMPLE) + 1 + -(-(n - ones) // SELECT_SAMPLE) + 1
    return nsuper * w + nwords * BLOCK_REL_BITS + samples * w


def plain_overhead_bound(n: int) -> int:
    """Published ceiling C*n/lg n + C0 on :func:`plain_directory_bits`."""
    lg = max(1.0, math.log2(max(n, 2)))
    return int(PLAIN_OVERHEAD_C * n / lg) + PLAIN_OVERHEAD_C0


# --------------------------------------------------------------------------
# class/offset compressed variant


@lru_cache(maxsize=None)
def _rrr_tables(length: int):
    """Per block length: (encode array, decode lists per class, widths per class)."""
    vals = np.arange(1 << length, dtype=np.int64)
    pc = np.bitwise_count(vals)
    order = np.lexsort((vals, pc))
    starts = np.searchsorted(pc[order], np.arange(length + 2))
    encode = np.empty(1 << length, dtype=np.int64)
    encode[order] = np.arange(1 << length) - starts[pc[order]]
    decode = [order[starts[c]:starts[c + 1]].tolist() for c in range(length + 1)]
    widths = [(math.comb(length, c) - 1).bit_length() for c in range(length + 1)]
    return encode, decode, widths


def _pack_variable(values: np.ndarray, widths: np.ndarray) -> list[int]:
    if values.size == 0:
        return [0]
    maxw = max(1, int(widths.max()))
    j = np.arange(maxw, dtype=np.int64)
    mat = (values[:, None] >> j) & 1
    stream = mat[j[None, :] < widths[:, None]]
    return pack_words(stream.astype(np.uint8)).tolist()


def _read_bits(words: list[int], pos: int, width: int) -> int:
    if width == 0:
        return 0
    w = pos >> 6
    sh = pos & 63
    val = words[w] >> sh
    if sh + width > 64:
        val |= words[w + 1] << (64 - sh)
    return val & ((1 << width) - 1)


class CompressedBitSeq(BitSeq):
    """Bit sequence stored as 15-bit (class, offset) blocks.

    Payload = 4 class bits per block + sum of ceil(lg C(len, class)) offset
    bits; the directory keeps, per 32-block superblock, the rank before it
    and the offset-stream pointer, plus select samples.
    """

    def __init__(self, bits: BitsLike):
        arr = to_bit_array(bits)
        self.n = n = int(arr.size)
        self.nblocks = nb = -(-n // RRR_BLOCK)
        self.last_len = n - RRR_BLOCK * (nb - 1) if nb else 0
        padded = np.zeros(nb * RRR_BLOCK, dtype=np.int64)
        padded[:n] = arr
        values = padded.reshape(nb, RRR_BLOCK) @ (np.int64(1) << np.arange(RRR_BLOCK, dtype=np.int64))
        classes = np.bitwise_count(values).astype(np.int64)
        enc15, _, wid15 = _rrr_tables(RRR_BLOCK)
        offsets = enc15[values] if nb else values
        widths = np.asarray(wid15, dtype=np.int64)[classes] if nb else classes
        if nb and self.last_len != RRR_BLOCK:
            enc_l, _, wid_l = _rrr_tables(self.last_len)
            offsets[-1] = enc_l[values[-1]]
            widths[-1] = wid_l[classes[-1]]
        self.ones = int(classes.sum())
        self._class_words = _pack_variable(classes, np.full(nb, RRR_CLASS_BITS, dtype=np.int64))
        self._offset_words = _pack_variable(offsets, widths)
        self.offset_bits = int(widths.sum())
        rank_cum = np.concatenate([[0], np.cumsum(classes)])
        ptr_cum = np.concatenate([[0], np.cumsum(widths)])
        self._rank_before = rank_cum[:-1][::RRR_BLOCKS_PER_SUPER].tolist() or [0]
        self._ptr_before = ptr_cum[:-1][::RRR_BLOCKS_PER_SUPER].tolist() or [0]
        nsuper = len(self._rank_before)
        super_len = RRR_BLOCK * RRR_BLOCKS_PER_SUPER
        self._samples1 = _superblock_samples(np.flatnonzero(arr), super_len, nsuper)
        self._samples0 = _superblock_samples(np.flatnonzero(arr == 0), super_len, nsuper)
        self._wid15 = wid15

    def _class(self, b: int) -> int:
        return (self._class_words[b >> 4] >> ((b & 15) << 2)) & 15

    def _block_len(self, b: int) -> int:
        return self.last_len if b == self.nblocks - 1 else RRR_BLOCK

    def _decode(self, b: int, c: int, ptr: int) -> int:
        length = self._block_len(b)
        _, dec, wid = _rrr_tables(length)
        return dec[c][_read_bits(self._offset_words, ptr, wid[c])]

    def _locate(self, blk: int) -> tuple[int, int]:
        """(ones before block blk, offset pointer of block blk)."""
        sb = blk // RRR_BLOCKS_PER_SUPER
        r = self._rank_before[sb]
        ptr = self._ptr_before[sb]
        wid = self._wid15
        for b in range(sb * RRR_BLOCKS_PER_SUPER, blk):
            c = self._class(b)
            r += c
            ptr += wid[c]
        return r, ptr

    def _rank1(self, i: int) -> int:
        blk = i // RRR_BLOCK
        if blk >= self.nblocks:
            return self.ones
        r, ptr = self._locate(blk)
        rem = i - blk * RRR_BLOCK
        if rem:
            pat = self._decode(blk, self._class(blk), ptr)
            r += (pat & ((1 << rem) - 1)).bit_count()
        return r

    def _access(self, x: int) -> int:
        blk = x // RRR_BLOCK
        _, ptr = self._locate(blk)
        return (self._decode(blk, self._class(blk), ptr) >> (x - blk * RRR_BLOCK)) & 1

    def _select(self, k: int, bit: int) -> int:
        super_len = RRR_BLOCK * RRR_BLOCKS_PER_SUPER
        rb = self._rank_before
        if bit:
            samples, before = self._samples1, rb.__getitem__
        else:
            samples, before = self._samples0, lambda s: s * super_len - rb[s]
        s = (k - 1) // SELECT_SAMPLE
        lo = samples[s]
        hi = samples[s + 1] if s + 1 < len(samples) else samples[-1]
        while lo < hi:
            mid = (lo + hi + 1) >> 1
            if before(mid) < k:
                lo = mid
            else:
                hi = mid - 1
        sb = lo
        r = before(sb)
        ptr = self._ptr_before[sb]
        b = sb * RRR_BLOCKS_PER_SUPER
        wid = self._wid15
        while True:
            c = self._class(b)
            length = self._block_len(b)
            cnt = c if bit else length - c
            if r + cnt >= k:
                break
            r += cnt
            ptr += wid[c]
            b += 1
        pat = self._decode(b, c, ptr)
        if not bit:
            pat = ~pat & ((1 << length) - 1)
        return b * RRR_BLOCK + _select_in_word(pat, k - r)

    def _select1(self, k: int) -> int:
        return self._select(k, 1)

    def _select0(self, k: int) -> int:
        return self._select(k, 0)

    def to_bits(self) -> np.ndarray:
        out = np.zeros(self.n, dtype=np.uint8)
        ptr = 0
        for b in range(self.nblocks):
            c = self._class(b)
            length = self._block_len(b)
            pat = self._decode(b, c, ptr)
            ptr += _rrr_tables(length)[2][c]
            for j in range(length):
                out[b * RRR_BLOCK + j] = (pat >> j) & 1
        return out

    @property
    def class_bits(self) -> int:
        return RRR_CLASS_BITS * self.nblocks

    def size_report(self) -> SizeReport:
        nsuper = len(self._rank_before)
        dirs = nsuper * (_width(self.n) + _width(self.offset_bits))
        dirs += (len(self._samples1) + len(self._samples0)) * _width(self.n)
        return SizeReport(self.class_bits + self.offset_bits, dirs)


def binomial_bits(n: int, m: int) -> int:
    """ceil(lg C(n, m)): information-theoretic size of an n-bit string with m ones."""
    return (math.comb(n, m) - 1).bit_length() if n >= 0 and 0 <= m <= n else 0


def compressed_payload_bound(n: int, m: int) -> int:
    """Published ceiling on CompressedBitSeq payload.

    ceil(lg C(n, m)) plus, per block, the 4-bit class code and at most one
    bit of offset rounding.
    """
    return binomial_bits(n, m) + (RRR_CLASS_BITS + 1) * -(-n // RRR_BLOCK)


# --------------------------------------------------------------------------
# functional surface


def build_plain(bits: BitsLike) -> PlainBitSeq:
    return PlainBitSeq(bits)


def build_compressed(bits: BitsLike) -> CompressedBitSeq:
    return CompressedBitSeq(bits)


def rank(s: BitSeq, b: int, i: int) -> int:
    return s.rank(b, i)


def select(s: BitSeq, b: int, k: int) -> int:
    return s.select(b, k)


def size_report(s: BitSeq) -> SizeReport:
    return s.size_report()
