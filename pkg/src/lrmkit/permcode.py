"""Compressed permutations over the LRM-partition.

A permutation is stored as

* a BP forest whose internal nodes are the increasing subsequences of its
  LRM-partition (numbered by first position, which is also their preorder
  rank among internal nodes) and whose leaves are the positions 1..n;
* a Huffman merge tree over the subsequence lengths, with one bit per
  element at every internal merge node telling whether the element came
  from the left (0) or the right (1) child.

Merging increasing subsequences of a permutation yields 1..n, so the
offset of an element at the merge root is its value. ``apply`` walks up the
merge tree with select, ``inverse`` walks down with rank.
"""
from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from . import _kernels, _nav
from .bitseq import PlainBitSeq, _width
from .bp_forest import BPForest
from .container import TAG_PERMCODE, Reader, Writer
from .counters import OpCounter
from .errors import CapabilityError, ContractError, RangeError, StructureError
from .lrm import as_values, build_lrm_tree
from .partition_sort import MergeTree, entropy, huffman_merge_plan, lrm_partition, run_merges
from .rmq import PlainRMQIndex


def check_permutation(pi: Sequence[int]) -> np.ndarray:
    """Return pi as int64, or raise ContractError naming the first bad position."""
    vals = as_values(pi)
    n = vals.size
    out = (vals < 1) | (vals > n)
    if out.any():
        pos = int(np.flatnonzero(out)[0])
        raise ContractError(f"position {pos + 1}: value {vals[pos]} outside [1..{n}]")
    if n and (np.bincount(vals, minlength=n + 1)[1:] != 1).any():
        # report the later occurrence that comes first in the array
        seen = np.zeros(n + 1, dtype=bool)
        for pos, v in enumerate(vals.tolist()):
            if seen[v]:
                first = int(np.flatnonzero(vals == v)[0])
                raise ContractError(f"position {pos + 1}: value {v} already seen at position {first + 1}")
            seen[v] = True
    return vals


class PermCode:
    """Immutable compressed permutation; build with :func:`encode`."""

    def __init__(self, n: int, forest: BPForest, plan: MergeTree, bits: np.ndarray,
                 bit_start: np.ndarray, lrm_bp: Optional[BPForest] = None):
        self.n = n
        self.forest = forest
        self.rho = forest.internal_count if n else 0
        self.plan = plan
        self._r = plan.leaves if n else 0
        self._left = np.asarray(plan.left, dtype=np.int64)
        self._right = np.asarray(plan.right, dtype=np.int64)
        self._parent = np.asarray(plan.parent, dtype=np.int64)
        self._start = np.asarray(bit_start, dtype=np.int64)
        self.node_bits = PlainBitSeq(bits)
        self._nb = self.node_bits.kernel_args
        self.lrm_bp = lrm_bp
        self._rmq = None
        if lrm_bp is not None:
            self._rmq = PlainRMQIndex.from_bp(lrm_bp)
        if n and forest.leaf_count != n:
            raise StructureError("forest leaf count differs from n")

    # ------------------------------------------------------------------
    # partition forest

    def _check_pos(self, i: int, what: str = "position") -> None:
        if not 1 <= i <= self.n:
            raise RangeError(f"{what} {i} outside [1..{self.n}]")

    def map(self, i: int) -> tuple[int, int]:
        """(subsequence id, offset inside it) of position i."""
        self._check_pos(i)
        return _nav.map_one(self.forest._state, i)

    def unmap(self, s: int, p: int) -> int:
        """Position of the p-th element of subsequence s."""
        if not 1 <= s <= self.rho:
            raise RangeError(f"subsequence {s} outside [1..{self.rho}]")
        pos = _nav.unmap_one(self.forest._state, s, p) if p >= 1 else -1
        if pos < 0:
            raise RangeError(f"subsequence {s} has no element {p}")
        return pos

    def apply(self, i: int) -> int:
        """pi(i): climb the merge tree from the subsequence holding i."""
        s, p = self.map(i)
        return _nav.climb(self._nb, self._left, self._parent, self._start, self._r, s - 1, p)

    def inverse(self, v: int) -> int:
        """pi^-1(v): descend the merge tree from offset v at the root."""
        self._check_pos(v, "value")
        k, off = _nav.descend(self._nb, self._left, self._right, self._start, self._r, v)
        return self.unmap(k + 1, off)

    def _batch(self, xs, what: str) -> np.ndarray:
        arr = np.asarray(xs, dtype=np.int64).ravel()
        if arr.size and (arr.min() < 1 or arr.max() > self.n):
            raise RangeError(f"{what} outside [1..{self.n}]")
        return arr

    def apply_many(self, positions) -> np.ndarray:
        """apply() over an array of positions in one compiled loop."""
        arr = self._batch(positions, "position")
        return _nav.apply_many(self.forest._state, self._nb, self._left, self._parent, self._start, self._r, arr)

    def inverse_many(self, values) -> np.ndarray:
        arr = self._batch(values, "value")
        return _nav.inverse_many(self.forest._state, self._nb, self._left, self._right, self._start, self._r, arr)

    def map_many(self, positions) -> tuple[np.ndarray, np.ndarray]:
        return _nav.map_many(self.forest._state, self._batch(positions, "position"))

    def unmap_many(self, ss, pp) -> np.ndarray:
        ss = np.asarray(ss, dtype=np.int64).ravel()
        pp = np.asarray(pp, dtype=np.int64).ravel()
        if ss.size and (ss.min() < 1 or ss.max() > self.rho or pp.min() < 1):
            raise RangeError("subsequence id or offset out of range")
        out = _nav.unmap_many(self.forest._state, ss, pp)
        if out.size and out.min() < 0:
            raise RangeError("offset beyond the end of its subsequence")
        return out

    def levels(self, i: int) -> int:
        """Merge-tree levels climbed by apply(i)."""
        s, _ = self.map(i)
        k, d = s - 1, 0
        while self._parent[k] >= 0:
            k = int(self._parent[k])
            d += 1
        return d

    # ------------------------------------------------------------------
    # optional PSV / RMQ support through the retained LRM-tree

    def _need_index(self) -> PlainRMQIndex:
        if self._rmq is None:
            raise CapabilityError("PSV/RMQ support was not retained; encode with with_psv_rmq=True")
        return self._rmq

    def psv_query(self, i: int) -> int:
        self._need_index()
        self._check_pos(i)
        return self.lrm_bp.parent(i)

    def rmq_query(self, i: int, j: int) -> int:
        return self._need_index().query(i, j)

    # ------------------------------------------------------------------

    def to_list(self) -> list[int]:
        return self.apply_many(np.arange(1, self.n + 1)).tolist()

    def size_report(self) -> dict:
        """Itemized bits.

        ``merge_shape_bits`` is the preorder shape (2r - 1 bits) and
        ``merge_pointer_bits`` covers the leaf map (r ids of lg r bits) and
        the start offset of every internal node's bits; both are the
        O(rho lg n) part of the bound.
        """
        f = self.forest.size_report()
        nb = self.node_bits.size_report()
        r = self._r
        wpl = self.node_bits.n
        shape = 2 * r - 1 if r else 0
        pointers = r * _width(max(r - 1, 0)) + max(r - 1, 0) * _width(wpl)
        lrm_paren = lrm_dir = 0
        if self.lrm_bp is not None:
            rep = self.lrm_bp.size_report()
            lrm_paren, lrm_dir = rep.payload_bits, rep.directory_bits
        h = entropy(self.plan.weights[:r].tolist()) if r else 0.0
        total = f.total_bits + nb.total_bits + shape + pointers + lrm_paren + lrm_dir
        return {
            "n": self.n,
            "rho": self.rho,
            "h_lrm": h,
            "forest_paren_bits": f.payload_bits,
            "forest_directory_bits": f.directory_bits,
            "merge_payload_bits": wpl,
            "merge_directory_bits": nb.directory_bits,
            "merge_shape_bits": shape,
            "merge_pointer_bits": pointers,
            "max_leaf_depth": self.plan.max_leaf_depth if r else 0,
            "lrm_paren_bits": lrm_paren,
            "lrm_directory_bits": lrm_dir,
            "total_bits": total,
        }

    # ------------------------------------------------------------------
    # serialization

    def to_writer(self) -> Writer:
        """Sections: header, forest parens, merge shape, leaf map, node bits, LRM parens."""
        r = self._r
        shape: list[int] = []
        leaves: list[int] = []
        internal_pre: list[int] = []
        stack = [len(self._left) - 1] if r else []
        while stack:
            k = stack.pop()
            if k < r:
                shape.append(0)
                leaves.append(k)
            else:
                shape.append(1)
                internal_pre.append(k)
                stack.append(self._right[k])
                stack.append(self._left[k])
        bits = self.node_bits.to_bits()
        payload = [bits[self._start[k - r]:self._start[k - r + 1]] for k in internal_pre]
        flags = 1 if self.lrm_bp is not None else 0
        w = Writer(TAG_PERMCODE)
        w.ints([self.n, self.rho, flags])
        w.bits(self.forest.paren_bits())
        w.bits(np.array(shape, dtype=np.uint8))
        w.ints(leaves)
        w.bits(np.concatenate(payload) if payload else np.zeros(0, np.uint8))
        if self.lrm_bp is not None:
            w.bits(self.lrm_bp.paren_bits())
        return w

    def to_bytes(self) -> bytes:
        return self.to_writer().to_bytes()

    @classmethod
    def from_reader(cls, rd: Reader) -> "PermCode":
        header = rd.ints().tolist()
        if len(header) != 3:
            raise StructureError("permutation code header must hold n, rho and flags")
        n, rho, flags = header
        if flags not in (0, 1):
            raise StructureError(f"unknown permutation code flags {flags}")
        parens = rd.bits()
        shape = rd.bits().tolist()
        leaves = rd.ints().tolist()
        payload = rd.bits()
        lrm_bp = BPForest(rd.bits()) if flags & 1 else None
        rd.done()
        if lrm_bp is not None and lrm_bp.n_nodes != n + 1:
            raise StructureError("retained LRM-tree has the wrong number of nodes")
        if n == 0:
            return _empty_code(lrm_bp)
        forest = BPForest(parens)
        if forest.internal_count != rho or forest.leaf_count != n or len(leaves) != rho:
            raise StructureError("permutation code header does not match its forest")
        sizes = _subsequence_lengths(forest)
        # internal ids in reverse preorder: the root is last and parents outrank children
        r = rho
        total = 2 * r - 1
        n_internal = sum(shape)
        if len(shape) != total or n_internal != r - 1:
            raise StructureError("merge tree shape does not match the number of subsequences")
        if sorted(leaves) != list(range(r)):
            raise StructureError("merge tree leaf map is not a permutation of the subsequences")
        left = np.full(total, -1, dtype=np.int64)
        right = np.full(total, -1, dtype=np.int64)
        parent = np.full(total, -1, dtype=np.int64)
        ids: list[int] = []
        nxt, li = total - 1, 0
        for b in shape:
            if b:
                ids.append(nxt)
                nxt -= 1
            else:
                ids.append(leaves[li])
                li += 1
        stack: list[int] = []
        for node in ids:
            if stack:
                top = stack[-1]
                if left[top] < 0:
                    left[top] = node
                else:
                    right[top] = node
                    stack.pop()
                parent[node] = top
            elif node != ids[0]:
                raise StructureError("merge tree shape is not a single binary tree")
            if node >= r:
                stack.append(node)
        if stack:
            raise StructureError("malformed merge tree shape")
        weights = np.zeros(total, dtype=np.int64)
        weights[:r] = sizes
        for k in range(r, total):
            weights[k] = weights[left[k]] + weights[right[k]]
        # payload chunks were written in preorder, i.e. by decreasing id
        pre_start = 0
        chunks = {}
        for k in range(total - 1, r - 1, -1):
            chunks[k] = payload[pre_start:pre_start + weights[k]]
            pre_start += int(weights[k])
        if pre_start != payload.size:
            raise StructureError("merge payload length does not match the tree")
        # every element of the right child must be marked once, or the walks run off the end
        for k, chunk in chunks.items():
            if int(chunk.sum()) != weights[right[k]]:
                raise StructureError("merge node bits disagree with the child sizes")
        payload = np.concatenate([chunks[k] for k in range(r, total)]) if r > 1 else payload
        bit_start = np.concatenate([[0], np.cumsum(weights[r:])]).astype(np.int64)
        plan = MergeTree(left, right, parent, weights)
        return cls(n, forest, plan, payload, bit_start, lrm_bp)

    @classmethod
    def from_bytes(cls, data: bytes) -> "PermCode":
        return cls.from_reader(Reader(data, TAG_PERMCODE))


def _subsequence_lengths(forest: BPForest) -> np.ndarray:
    """Number of leaf children of every internal node, in internal preorder."""
    parents = forest.to_parents()
    leaf = np.ones(len(parents), dtype=bool)
    for p in parents:
        if p >= 0:
            leaf[p] = False
    internal_ids = np.flatnonzero(~leaf)
    rank = np.full(len(parents), -1, dtype=np.int64)
    rank[internal_ids] = np.arange(internal_ids.size)
    counts = np.zeros(internal_ids.size, dtype=np.int64)
    for v in np.flatnonzero(leaf).tolist():
        p = parents[v]
        if p < 0:
            raise StructureError("a position leaf must hang below a subsequence node")
        counts[rank[p]] += 1
    return counts


def _empty_code(lrm_bp: Optional[BPForest]) -> PermCode:
    plan = MergeTree(np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0, np.int64))
    return PermCode(0, BPForest(""), plan, np.zeros(0, np.uint8), np.zeros(1, np.int64), lrm_bp)


def encode(pi: Sequence[int], with_psv_rmq: bool = False, counter: Optional[OpCounter] = None) -> PermCode:
    """Compress a permutation of 1..n (comparisons as in LRM-sort)."""
    vals = check_permutation(pi)
    n = int(vals.size)
    t = build_lrm_tree(vals, counter)
    lrm_bp = t.bp if with_psv_rmq else None
    if n == 0:
        return _empty_code(lrm_bp)
    P = lrm_partition(t, counter)
    bits, ok = _kernels.forest_parens(P.labels, len(P))
    if not ok:
        raise StructureError("LRM-partition does not nest")
    forest = BPForest(bits)
    plan = huffman_merge_plan(P.lengths, counter)
    _, _, node_bits, bit_start = run_merges(vals, P, plan, counter, with_bits=True)
    return PermCode(n, forest, plan, node_bits, bit_start, lrm_bp)


def apply(c: PermCode, i: int) -> int:
    return c.apply(i)


def inverse(c: PermCode, v: int) -> int:
    return c.inverse(v)


def map_position(c: PermCode, i: int) -> tuple[int, int]:
    return c.map(i)


def unmap(c: PermCode, s: int, p: int) -> int:
    return c.unmap(s, p)


def psv_query(c: PermCode, i: int) -> int:
    return c.psv_query(i)


def rmq_query(c: PermCode, i: int, j: int) -> int:
    return c.rmq_query(i, j)


def size_report(c: PermCode) -> dict:
    return c.size_report()
