"""Partition entropy, LRM-partitions, Huffman-shaped merging and adaptive sorting.

The sorting pipeline is: build the LRM-tree (<= 2n comparisons), peel it
into down-paths by repeatedly removing a deepest root-to-leaf path (no
comparisons), then merge the resulting increasing subsequences following a
Huffman tree over their lengths (<= n(1 + H) comparisons).
"""
from __future__ import annotations

import bisect
from dataclasses import asdict, dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .counters import OpCounter
from .errors import ContractError, StructureError
from .lrm import LRMTree, as_values, build_lrm_tree


def entropy(lengths: Sequence[int]) -> float:
    """H = sum (n_i / n) lg(n / n_i) over positive part lengths."""
    w = np.asarray(lengths, dtype=np.float64)
    if w.size == 0:
        raise ContractError("entropy of an empty partition")
    if (w <= 0).any():
        raise ContractError("partition lengths must be positive")
    n = w.sum()
    return float(np.sum(w / n * np.log2(n / w)))


class Partition:
    """Ordered cover of positions 1..n by increasing subsequences.

    Parts are numbered by first position. Stored flat: ``members`` lists
    the 0-based positions part by part, part k occupying
    ``members[bounds[k]:bounds[k+1]]``; ``labels[i-1]`` is the part of
    position i. The per-part lists are built only when asked for.
    """

    def __init__(self, labels: np.ndarray, members: np.ndarray, bounds: np.ndarray, kind: str):
        self.labels = labels
        self.members = members
        self.bounds = bounds
        self.kind = kind

    @classmethod
    def from_parts(cls, parts: Sequence[Sequence[int]], kind: str) -> "Partition":
        """Build from explicit 1-based position lists (checked by ``validate``)."""
        n = sum(len(p) for p in parts)
        labels = np.full(n, -1, dtype=np.int64)
        for k, part in enumerate(parts):
            for pos in part:
                if not 1 <= pos <= n or labels[pos - 1] >= 0:
                    raise StructureError(f"position {pos} repeated or out of range")
                labels[pos - 1] = k
        members = np.fromiter((p - 1 for part in parts for p in part), dtype=np.int64, count=n)
        bounds = np.concatenate([[0], np.cumsum([len(p) for p in parts])]).astype(np.int64)
        return cls(labels, members, bounds, kind)

    @cached_property
    def parts(self) -> list[list[int]]:
        pos = (self.members + 1).tolist()
        b = self.bounds.tolist()
        return [pos[b[k]:b[k + 1]] for k in range(len(b) - 1)]

    @property
    def subsequences(self) -> list[list[int]]:
        return self.parts

    @cached_property
    def lengths(self) -> list[int]:
        return np.diff(self.bounds).tolist()

    @property
    def n(self) -> int:
        return int(self.bounds[-1])

    def __len__(self) -> int:
        return self.bounds.size - 1

    def __repr__(self) -> str:
        return f"Partition(kind={self.kind!r}, parts={self.parts!r})"

    def entropy(self) -> float:
        return entropy(np.diff(self.bounds)) if len(self) else 0.0

    def values(self, A: Sequence[int]) -> list[list[int]]:
        return [[A[i - 1] for i in p] for p in self.parts]

    def validate(self, A: Sequence[int]) -> None:
        """Raise StructureError unless this is an increasing cover of A."""
        vals = as_values(A)
        n = vals.size
        if self.n != n or self.members.size != n:
            raise StructureError(f"partition covers {self.n} positions, array has {n}")
        if (self.bounds[1:] <= self.bounds[:-1]).any():
            raise StructureError("empty part")
        if n == 0:
            return
        m = self.members
        if m.min() < 0 or m.max() >= n or np.bincount(m, minlength=n).max() != 1:
            raise StructureError("partition does not cover every position exactly once")
        inner = np.ones(n, dtype=bool)
        inner[self.bounds[1:-1] - 1] = False
        inner[-1] = False
        a, b = m[:-1][inner[:-1]], m[1:][inner[:-1]]
        if (a >= b).any():
            raise StructureError("part positions must increase")
        bad = vals[a] > vals[b]
        if bad.any():
            k = int(np.flatnonzero(bad)[0])
            raise StructureError(f"values at positions {a[k] + 1}, {b[k] + 1} decrease")


def _from_labels(labels: np.ndarray, nparts: int, kind: str) -> Partition:
    """Renumber parts by first position."""
    n = labels.size
    if n == 0:
        return Partition(labels.astype(np.int64), np.zeros(0, np.int64), np.zeros(1, np.int64), kind)
    first = np.full(nparts, n, dtype=np.int64)
    np.minimum.at(first, labels, np.arange(n))
    order = np.argsort(first, kind="stable")
    remap = np.empty(nparts, dtype=np.int64)
    remap[order] = np.arange(nparts)
    new = remap[labels]
    members = np.argsort(new, kind="stable").astype(np.int64)
    bounds = np.concatenate([[0], np.cumsum(np.bincount(new, minlength=nparts))]).astype(np.int64)
    return Partition(new, members, bounds, kind)


def lrm_partition(t: LRMTree, counter: Optional[OpCounter] = None) -> Partition:
    """Deepest-path-first partition of the LRM-tree (leftmost deepest on ties).

    Uses only the parent array; no values.
    """
    labels, members, bounds, ops = _kernels.lrm_partition(t.parents)
    if counter is not None:
        counter.internal_ops += int(ops)
    return Partition(labels, members, bounds, "lrm")


def run_partition(A: Sequence[int], strict: bool = False,
                  counter: Optional[OpCounter] = None) -> Partition:
    """Maximal ascending runs of consecutive positions (n - 1 comparisons)."""
    vals = as_values(A)
    n = vals.size
    if strict:
        from .lrm import ranks

        r = ranks(vals)
        breaks = r[1:] != r[:-1] + 1
    else:
        breaks = vals[1:] < vals[:-1]
    if counter is not None:
        counter.comparisons += max(n - 1, 0)
    labels = np.concatenate([[0], np.cumsum(breaks)]).astype(np.int64) if n else np.zeros(0, np.int64)
    return _from_labels(labels, int(labels[-1]) + 1 if n else 0, "strict-runs" if strict else "runs")


@dataclass
class MergeTree:
    """Huffman merge plan: leaves 0..r-1 are parts, internal nodes follow in creation order.

    The first node taken from the queue becomes the left child.
    """

    left: np.ndarray
    right: np.ndarray
    parent: np.ndarray
    weights: np.ndarray
    ops: int = 0

    @property
    def leaves(self) -> int:
        return (self.left.size + 1) // 2

    @property
    def root(self) -> int:
        return self.left.size - 1

    def depths(self) -> list[int]:
        """Code length of every leaf."""
        return _kernels.leaf_depths(self.parent, self.leaves).tolist()

    def weighted_path_length(self) -> int:
        # every internal node's weight is the number of elements passing through it
        return int(self.weights[self.leaves:].sum())

    @property
    def max_leaf_depth(self) -> int:
        return int(_kernels.leaf_depths(self.parent, self.leaves).max()) if self.leaves else 0

    def is_left_child(self, k: int) -> bool:
        return self.left[self.parent[k]] == k


def huffman_merge_plan(lengths: Sequence[int], counter: Optional[OpCounter] = None) -> MergeTree:
    """Huffman tree over part lengths; ties go to the earliest created node."""
    if len(lengths) == 0:
        raise ContractError("merge plan needs at least one part")
    w = np.asarray(lengths, dtype=np.int64)
    left, right, parent, weights, ops = _kernels.huffman(w)
    if counter is not None:
        counter.internal_ops += int(ops)
    return MergeTree(left, right, parent, weights, int(ops))


_I32 = 1 << 31


def _narrow(vals: np.ndarray) -> np.ndarray:
    """int32 copy of the keys when they fit: halves the merge's memory traffic."""
    if vals.size and -_I32 <= int(vals.min()) and int(vals.max()) < _I32:
        return vals.astype(np.int32)
    return vals


def run_merges(A: Sequence[int], P: Partition, plan: MergeTree, counter: Optional[OpCounter] = None,
               with_bits: bool = False):
    """Execute the plan; returns (sorted 0-based positions, comparisons, bits, bit starts)."""
    vals = _narrow(as_values(A))
    need = int(plan.weights.sum())
    buf = np.empty(need, dtype=np.int32 if need < _I32 else np.int64)
    out, cmp, bits, bit_start = _kernels.merge_plan(
        vals, P.members, P.bounds, plan.left, plan.right, plan.weights, with_bits, buf
    )
    if counter is not None:
        counter.comparisons += int(cmp)
    return out, int(cmp), bits, bit_start


def merge_sort_partition(A: Sequence[int], P: Partition, plan: MergeTree,
                         counter: Optional[OpCounter] = None) -> list[int]:
    """Sort A by merging the parts of P as the plan dictates (stable by position)."""
    if len(P) == 0:
        if len(A):
            raise StructureError("empty partition for a nonempty array")
        return []
    if plan.leaves != len(P):
        raise StructureError("merge plan and partition disagree on the number of parts")
    P.validate(A)
    out, _, _, _ = run_merges(A, P, plan, counter)
    vals = as_values(A)
    return vals[out].tolist()


@dataclass
class SortStats:
    n: int
    rho: int
    h: float
    cmp_build: int
    cmp_merge: int
    internal_ops: int
    max_leaf_depth: int
    weighted_path_length: int

    @property
    def cmp_total(self) -> int:
        return self.cmp_build + self.cmp_merge

    def as_dict(self) -> dict:
        d = asdict(self)
        d["cmp_total"] = self.cmp_total
        return d


def _sort_with(A: Sequence[int], P: Partition, cmp_build: int, counter: OpCounter) -> tuple[list[int], SortStats]:
    vals = as_values(A)
    n = int(vals.size)
    if n == 0:
        return [], SortStats(0, 0, 0.0, 0, 0, counter.internal_ops, 0, 0)
    plan = huffman_merge_plan(np.diff(P.bounds), counter)
    out, cmp_merge, _, _ = run_merges(vals, P, plan, counter)
    stats = SortStats(
        n=n,
        rho=len(P),
        h=P.entropy(),
        cmp_build=cmp_build,
        cmp_merge=cmp_merge,
        internal_ops=counter.internal_ops,
        max_leaf_depth=plan.max_leaf_depth,
        weighted_path_length=plan.weighted_path_length(),
    )
    return vals[out].tolist(), stats


def sort_lrm(A: Sequence[int], counter: Optional[OpCounter] = None) -> tuple[list[int], SortStats]:
    """LRM-sort: <= n(3 + H(vLRM)) data comparisons in total."""
    counter = counter if counter is not None else OpCounter()
    vals = as_values(A)
    t = build_lrm_tree(vals, counter)
    P = lrm_partition(t, counter)
    return _sort_with(vals, P, t.comparisons, counter)


def sort_runs_baseline(A: Sequence[int], counter: Optional[OpCounter] = None) -> tuple[list[int], SortStats]:
    """Entropy-adaptive merge over the ascending-run partition."""
    counter = counter if counter is not None else OpCounter()
    vals = as_values(A)
    before = counter.comparisons
    P = run_partition(vals, counter=counter)
    return _sort_with(vals, P, counter.comparisons - before, counter)


def longest_decreasing_subsequence(A: Sequence[int]) -> int:
    """Length of the longest strictly decreasing subsequence in (value, position) order.

    Equals the fewest increasing subsequences covering A (patience sorting).
    """
    tails: list[int] = []
    for a in A:
        k = bisect.bisect_left(tails, -a)
        if k == len(tails):
            tails.append(-a)
        else:
            tails[k] = -a
    return len(tails)


@dataclass
class MeasureReport:
    n: int
    rho: int
    rho_strict: int
    n_sus: int
    h_runs: float
    h_lrm: float

    def as_dict(self) -> dict:
        return asdict(self)


def measures(A: Sequence[int]) -> MeasureReport:
    vals = as_values(A)
    if vals.size == 0:
        raise ContractError("measures need n >= 1")
    runs = run_partition(vals)
    strict = run_partition(vals, strict=True)
    lrm = lrm_partition(build_lrm_tree(vals))
    return MeasureReport(
        n=int(vals.size),
        rho=len(runs),
        rho_strict=len(strict),
        n_sus=longest_decreasing_subsequence(vals.tolist()),
        h_runs=runs.entropy(),
        h_lrm=lrm.entropy(),
    )
