"""Range-minimum indices built on LRM-trees.

Three variants:

* :class:`PlainRMQIndex` keeps only the BP encoding of the LRM-tree
  (2(n+1) paren bits plus navigation directories) and never reads the data.
* :class:`StrictRunsRMQIndex` marks strict-run heads in a compressed bit
  sequence and indexes only the heads; never reads the data either.
* :class:`RunsRMQIndex` does the same for ordinary runs but needs one
  comparison of two input values per query (systematic).

All answers are the leftmost minimum position, 1-based.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _nav
from .bitseq import CompressedBitSeq, binomial_bits, compressed_payload_bound
from .bp_forest import BPForest
from .container import TAG_RMQ_PLAIN, TAG_RMQ_RUNS, TAG_RMQ_STRICT_RUNS, Reader, Writer
from .counters import OpCounter
from .errors import ContractError, RangeError, StructureError
from .lrm import LRMTree, as_values, build_lrm_tree, run_heads


def _check_range(i: int, j: int, n: int) -> None:
    if not 1 <= i <= j <= n:
        raise RangeError(f"query range ({i}, {j}) invalid for n={n}")


def _read_n(rd: Reader) -> int:
    header = rd.ints().tolist()
    if len(header) != 1 or header[0] < 1:
        raise StructureError("index header must hold n >= 1")
    return header[0]


class PlainRMQIndex:
    """Non-systematic index: the BP-encoded LRM-tree and nothing else."""

    def __init__(self, tree: LRMTree):
        self.n = tree.n
        self.bp = tree.bp

    @classmethod
    def from_bp(cls, bp: BPForest) -> "PlainRMQIndex":
        """Wrap the BP form of an LRM-tree (node 0 the artificial root)."""
        if bp.wrapped:
            raise StructureError("an LRM-tree has a single root")
        idx = cls.__new__(cls)
        idx.n = bp.n_nodes - 1
        idx.bp = bp
        return idx

    def to_writer(self) -> Writer:
        return Writer(TAG_RMQ_PLAIN).ints([self.n]).bits(self.bp.paren_bits())

    @classmethod
    def from_reader(cls, rd: Reader) -> "PlainRMQIndex":
        n = _read_n(rd)
        idx = cls.from_bp(BPForest(rd.bits()))
        rd.done()
        if idx.n != n:
            raise StructureError("stored n does not match the tree")
        return idx

    def query(self, i: int, j: int) -> int:
        _check_range(i, j, self.n)
        if i == j:
            return i
        return self.bp.ancestor_or_child_toward(i, j)

    def query_many(self, ii, jj) -> np.ndarray:
        """query() over paired arrays of range ends in one compiled loop."""
        ii = np.asarray(ii, dtype=np.int64).ravel()
        jj = np.asarray(jj, dtype=np.int64).ravel()
        if ii.shape != jj.shape:
            raise RangeError("range end arrays differ in length")
        if ii.size and (ii.min() < 1 or (jj < ii).any() or jj.max() > self.n):
            raise RangeError(f"some query range is invalid for n={self.n}")
        return _nav.rmq_many(self.bp._state, ii, jj)

    def size_report(self) -> dict:
        rep = self.bp.size_report()
        return {
            "paren_bits": rep.payload_bits,
            "navigation_bits": rep.directory_bits,
            "total_bits": rep.total_bits,
        }


class _HeadsIndex:
    """Shared part of the two run-based indices: head bits B and an index on A'."""

    strict: bool
    tag: int

    def __init__(self, A: Sequence[int], counter: Optional[OpCounter] = None):
        vals = as_values(A)
        if vals.size == 0:
            raise ContractError("RMQ index needs n >= 1")
        self.n = int(vals.size)
        heads = run_heads(vals, strict=self.strict)
        self.B = CompressedBitSeq(heads)
        self.rho = self.B.ones
        self.heads = PlainRMQIndex(build_lrm_tree(vals[heads.astype(bool)], counter))

    def to_writer(self) -> Writer:
        w = Writer(self.tag).ints([self.n])
        return w.bits(self.B.to_bits()).bits(self.heads.bp.paren_bits())

    @classmethod
    def from_reader(cls, rd: Reader) -> "_HeadsIndex":
        n = _read_n(rd)
        B = CompressedBitSeq(rd.bits())
        heads = PlainRMQIndex.from_bp(BPForest(rd.bits()))
        rd.done()
        if B.n != n or heads.n != B.ones or (n and not B.access(1)):
            raise StructureError("head bits and head tree disagree")
        idx = cls.__new__(cls)
        idx.n, idx.B, idx.rho, idx.heads = n, B, B.ones, heads
        return idx

    def size_report(self) -> dict:
        b = self.B.size_report()
        h = self.heads.size_report()
        return {
            "n": self.n,
            "heads": self.rho,
            "head_tree_paren_bits": h["paren_bits"],
            "head_tree_navigation_bits": h["navigation_bits"],
            "head_bits_payload": b.payload_bits,
            "head_bits_directory": b.directory_bits,
            "binomial_bits": binomial_bits(self.n, self.rho),
            "payload_bits": h["paren_bits"] + b.payload_bits,
            "payload_bound": heads_payload_bound(self.n, self.rho),
            "total_bits": h["total_bits"] + b.total_bits,
        }


def heads_payload_bound(n: int, heads: int) -> int:
    """2(heads+1) tree parens + ceil(lg C(n, heads)) + 5 bits per 15-bit block.

    The +2 is the artificial root of the heads tree; the per-block term is
    the 4-bit class code plus at most one bit of offset rounding.
    """
    return 2 * (heads + 1) + compressed_payload_bound(n, heads)


class StrictRunsRMQIndex(_HeadsIndex):
    """Non-systematic index whose size depends on the number of strict runs."""

    strict = True
    tag = TAG_RMQ_STRICT_RUNS

    def query(self, i: int, j: int) -> int:
        _check_range(i, j, self.n)
        x = self.B.rank1(i)
        y = self.B.rank1(j)
        m = self.B.select1(self.heads.query(x, y))
        return i if m < i else m


class RunsRMQIndex(_HeadsIndex):
    """Systematic index over run heads; one data comparison per query at most."""

    strict = False
    tag = TAG_RMQ_RUNS

    def query(self, A: Sequence[int], i: int, j: int, counter: Optional[OpCounter] = None) -> int:
        if len(A) != self.n:
            raise StructureError(f"array has length {len(A)}, index was built for {self.n}")
        _check_range(i, j, self.n)
        x = self.B.rank1(i)
        y = self.B.rank1(j)
        if x == y:
            return i
        m = self.B.select1(self.heads.query(x + 1, y))
        a, b = A[i - 1], A[m - 1]
        if counter is not None:
            counter.comparisons += 1
            counter.accesses += 2
        # ranked order: on equal values the earlier position i is smaller
        return i if a <= b else m


def load_index(rd: Reader):
    """Rebuild whichever index a container holds."""
    kinds = {TAG_RMQ_PLAIN: PlainRMQIndex, TAG_RMQ_STRICT_RUNS: StrictRunsRMQIndex, TAG_RMQ_RUNS: RunsRMQIndex}
    if rd.tag not in kinds:
        raise StructureError(f"container type {rd.tag} is not an RMQ index")
    return kinds[rd.tag].from_reader(rd)


def build_plain(A: Sequence[int], counter: Optional[OpCounter] = None) -> PlainRMQIndex:
    vals = as_values(A)
    if vals.size == 0:
        raise ContractError("RMQ index needs n >= 1")
    return PlainRMQIndex(build_lrm_tree(vals, counter))


def query_plain(idx: PlainRMQIndex, i: int, j: int) -> int:
    return idx.query(i, j)


def build_strict_runs(A: Sequence[int], counter: Optional[OpCounter] = None) -> StrictRunsRMQIndex:
    return StrictRunsRMQIndex(A, counter)


def query_strict_runs(idx: StrictRunsRMQIndex, i: int, j: int) -> int:
    return idx.query(i, j)


def build_runs(A: Sequence[int], counter: Optional[OpCounter] = None) -> RunsRMQIndex:
    return RunsRMQIndex(A, counter)


def query_runs(idx: RunsRMQIndex, A: Sequence[int], i: int, j: int,
               counter: Optional[OpCounter] = None) -> int:
    return idx.query(A, i, j, counter)


@dataclass(frozen=True)
class TreeEntropyReport:
    """Tree entropy of an LRM-tree and the quantities bounding it.

    ``nodes`` is N = n + 1 (the artificial root included); the multinomial
    is taken over N, while the ceiling 2*rho*lg(n) uses n.
    """

    bits: float
    nodes: int
    degree_histogram: dict
    rho: int
    n: int

    @property
    def multinomial(self) -> int:
        """N! / prod(n_d!) as an exact integer (slow for large N)."""
        m = 1
        left = self.nodes
        for c in self.degree_histogram.values():
            m *= math.comb(left, c)
            left -= c
        return m

    @property
    def bound_bits(self) -> float:
        return 2 * self.rho * math.log2(self.n) if self.n > 0 else 0.0

    def within_bound(self) -> bool:
        """Decide multinomial / N <= n ** (2 rho) exactly.

        The float gap is trusted only when it dwarfs the rounding error of
        the log-gamma sums; otherwise the integers are compared.
        """
        gap = self.bound_bits - self.bits
        slack = 1e-9 * (self.nodes + 1) * math.log2(self.nodes + 1) + 1e-6
        if abs(gap) > slack:
            return gap > 0
        return self.multinomial <= self.nodes * self.n ** (2 * self.rho)


def _lg_factorial(k: int) -> float:
    return math.lgamma(k + 1) / math.log(2)


def tree_entropy_bits(t: LRMTree) -> TreeEntropyReport:
    """lg(multinomial(N; n_0, n_1, ...) / N) over the out-degree distribution."""
    counts = np.bincount(t.out_degrees)
    hist = {int(k): int(c) for k, c in enumerate(counts) if c}
    N = t.n + 1
    bits = _lg_factorial(N) - sum(_lg_factorial(c) for c in hist.values()) - math.log2(N)
    return TreeEntropyReport(max(bits, 0.0), N, hist, hist.get(0, 0), t.n)
