"""Balanced-parentheses encoding of ordered forests.

Nodes are identified by their preorder rank (0-based). A forest with more
than one root is wrapped in a virtual super-root internally; it never shows
up in node ids, in ``to_string()`` or in serialized paren strings.

Navigation runs on the excess sequence E(x) = #opens - #closes among the
first x parens, x in [0..L]. E is summarised per 256-position block (block
start value, block minimum, and how many leaf openings sit at that minimum)
and the block minima are arranged in a segment tree. Inside a block the
scan goes 8 parens at a time through byte lookup tables. Every navigation
call is therefore O(lg n) index operations and never touches the data the
tree was built from. The walks themselves are compiled (module ``_nav``).
"""
from __future__ import annotations

import math
from typing import Sequence, Union

import numpy as np

from . import _kernels, _nav
from .bitseq import PlainBitSeq, SizeReport, _width, to_bit_array
from .errors import ContractError, RangeError, StructureError

BLOCK = _nav.BLOCK


class PatternIndex(PlainBitSeq):
    """rank/select over a two-paren pattern; the bitmap itself is not stored.

    Only the directory costs space: occurrences are recomputed from the
    paren words on every probe.
    """

    def __init__(self, parens: PlainBitSeq, leaf: bool):
        self.n = parens.n
        self._words = parens._words
        self._kind = 1 if leaf else 2
        self._set_directory(_nav.pattern_counts(self._words, self._kind))

    def _access(self, x: int) -> int:
        return self._rank1(x + 1) - self._rank1(x)

    def _select0(self, k: int) -> int:
        raise NotImplementedError("pattern occurrences support select1 only")

    def to_bits(self) -> np.ndarray:
        return np.array([self._access(x) for x in range(self.n)], dtype=np.uint8)

    def size_report(self) -> SizeReport:
        rep = super().size_report()
        return SizeReport(0, rep.directory_bits)


def _parse_parens(parens: Union[str, Sequence[int], np.ndarray]) -> np.ndarray:
    if isinstance(parens, str) and set(parens) <= {"(", ")"}:
        parens = parens.replace("(", "1").replace(")", "0")
    return to_bit_array(parens)


class BPForest:
    """Ordered forest as a balanced-parentheses sequence plus navigation index."""

    def __init__(self, bits: Union[str, Sequence[int], np.ndarray]):
        ext = _parse_parens(bits)
        exc = np.cumsum(ext.astype(np.int64) * 2 - 1)
        if ext.size % 2 or (exc.size and (exc.min() < 0 or exc[-1] != 0)):
            raise StructureError("paren sequence is not balanced")
        self.n_nodes = ext.size // 2
        roots = int(np.count_nonzero(exc == 0))
        self.wrapped = roots > 1
        self._off = 1 if self.wrapped else 0
        if self.wrapped:
            internal = np.concatenate([[1], ext, [0]]).astype(np.uint8)
        else:
            internal = ext.astype(np.uint8)
        self._L = L = internal.size
        self._parens = PlainBitSeq(internal)
        self._leaf = PatternIndex(self._parens, leaf=True)
        self._internal = PatternIndex(self._parens, leaf=False)
        self._build_blocks(internal)

    @classmethod
    def from_parents(cls, parents: Sequence[int]) -> "BPForest":
        """Build from a parent array over preorder ids; roots have parent -1."""
        arr = np.asarray(parents, dtype=np.int64)
        bits, ok = _kernels.parents_to_parens(arr)
        if not ok:
            raise StructureError("parent array is not a preorder-numbered ordered forest")
        return cls(bits)

    @classmethod
    def from_parens(cls, text: str) -> "BPForest":
        return cls(text)

    def _build_blocks(self, bits: np.ndarray) -> None:
        self._bstart, self._tmin, self._tcnt, self._P = _nav.build_blocks(bits)
        self._nb = self._bstart.size - 1

    @property
    def _state(self) -> tuple:
        """Arguments for the compiled navigation routines (see ``_nav``)."""
        st = self.__dict__.get("_st")
        if st is None:
            p, lf, it = self._parens, self._leaf, self._internal
            st = (
                p._words, p._super, p._block, p._samples1,
                lf._super, lf._block, lf._samples1,
                it._super, it._block, it._samples1,
                self._bstart, self._tmin, self._tcnt,
                self._P, self._L, self._off,
            )
            self._st = st
        return st

    def _E(self, x: int) -> int:
        return _nav.excess(self._state, x)

    def _fwd(self, x0: int, t: int) -> int:
        return _nav.fwd(self._state, x0, t)

    def _bwd(self, x0: int, t: int) -> int:
        return _nav.bwd(self._state, x0, t)

    def _range_min(self, lo: int, hi: int) -> int:
        return _nav.range_min(self._state, lo, hi)

    # ------------------------------------------------------------------
    # node-level operations

    def _check(self, v: int) -> None:
        if not 0 <= v < self.n_nodes:
            raise RangeError(f"node {v} outside [0..{self.n_nodes - 1}]")

    def _open(self, v: int) -> int:
        return _nav.open_of(self._state, v)

    def _node(self, x: int) -> int:
        return _nav.node_at(self._state, x)

    def _close(self, x: int) -> int:
        return _nav.close_of(self._state, x)

    def open_position(self, v: int) -> int:
        """0-based position of v's '(' in the external paren string."""
        self._check(v)
        return self._open(v) - self._off

    def close_position(self, v: int) -> int:
        self._check(v)
        return self._close(self._open(v)) - self._off

    def enclose(self, x: int) -> int:
        """External position of the '(' of the parent of the node opened at x, or -1."""
        xi = x + self._off
        q = self._bwd(xi, self._E(xi) - 1)
        if q < 0 or (self.wrapped and q == 0):
            return -1
        return q - self._off

    def parent(self, v: int) -> int:
        self._check(v)
        return _nav.parent(self._state, v)

    def depth(self, v: int) -> int:
        self._check(v)
        return self._E(self._open(v)) - self._off

    def is_leaf(self, v: int) -> bool:
        self._check(v)
        return not self._parens._access(self._open(v) + 1)

    def is_ancestor(self, a: int, v: int) -> bool:
        """True when a is v or an ancestor of v."""
        self._check(a)
        self._check(v)
        oa, ov = self._open(a), self._open(v)
        return oa <= ov <= self._close(oa)

    def lca(self, u: int, v: int) -> int:
        """Deepest common ancestor; -1 when u and v lie in different trees."""
        self._check(u)
        self._check(v)
        return _nav.lca(self._state, u, v)

    def child_toward(self, a: int, v: int) -> int:
        """The child of a on the path from a down to v."""
        self._check(a)
        self._check(v)
        oa, ov = self._open(a), self._open(v)
        if not oa < ov <= self._close(oa):
            raise ContractError(f"node {a} is not a proper ancestor of {v}")
        return _nav.child_toward(self._state, a, v)

    def _node_arrays(self, us, vs) -> tuple[np.ndarray, np.ndarray]:
        us = np.asarray(us, dtype=np.int64).ravel()
        vs = np.asarray(vs, dtype=np.int64).ravel()
        if us.shape != vs.shape:
            raise RangeError("node arrays differ in length")
        for a in (us, vs):
            if a.size and (a.min() < 0 or a.max() >= self.n_nodes):
                raise RangeError(f"some node id is outside [0..{self.n_nodes - 1}]")
        return us, vs

    def lca_many(self, us, vs) -> np.ndarray:
        """lca() over paired node arrays in one compiled loop."""
        us, vs = self._node_arrays(us, vs)
        return _nav.lca_many(self._state, us, vs)

    def child_toward_many(self, aa, vs) -> np.ndarray:
        """child_toward() over pairs; -1 marks pairs where a is not a proper ancestor."""
        aa, vs = self._node_arrays(aa, vs)
        return _nav.child_toward_many(self._state, aa, vs)

    def ancestor_or_child_toward(self, u: int, v: int) -> int:
        """For u preceding v in preorder: u if u is an ancestor of v, else the
        child of lca(u, v) on the path down to v.

        This is the range-minimum step on an LRM-tree, fused so each open
        position is located once.
        """
        return _nav.ancestor_or_child_toward(self._state, u, v)

    @property
    def leaf_count(self) -> int:
        return self._leaf.ones

    @property
    def internal_count(self) -> int:
        return self._internal.ones - self._off

    def leaf_rank(self, v: int) -> int:
        """Number of leaves with preorder rank <= v."""
        self._check(v)
        return _nav.leaf_rank(self._state, v)

    def leaf_select(self, k: int) -> int:
        if not 1 <= k <= self.leaf_count:
            raise RangeError(f"leaf {k} outside [1..{self.leaf_count}]")
        return _nav.leaf_select(self._state, k)

    def internal_rank(self, v: int) -> int:
        """Number of internal nodes with preorder rank <= v."""
        self._check(v)
        return _nav.internal_rank(self._state, v)

    def internal_select(self, k: int) -> int:
        if not 1 <= k <= self.internal_count:
            raise RangeError(f"internal node {k} outside [1..{self.internal_count}]")
        return _nav.internal_select(self._state, k)

    def leaf_children_left_of(self, v: int) -> int:
        """How many left siblings of v are leaves."""
        self._check(v)
        return _nav.leaf_children_left_of(self._state, v)

    def leaf_child_select(self, u: int, p: int) -> int:
        """The p-th child of u that is a leaf (1-based p)."""
        self._check(u)
        found = _nav.leaf_child_select(self._state, u, p) if p >= 1 else -1
        if found < 0:
            raise RangeError(f"node {u} has no leaf child number {p}")
        return found

    # ------------------------------------------------------------------
    # views and accounting

    def paren_bits(self) -> np.ndarray:
        bits = self._parens.to_bits()
        return bits[1:-1] if self.wrapped else bits

    def to_string(self) -> str:
        return "".join("(" if b else ")" for b in self.paren_bits().tolist())

    def to_parents(self) -> list[int]:
        parents = []
        stack: list[int] = []
        for b in self.paren_bits().tolist():
            if b:
                parents.append(stack[-1] if stack else -1)
                stack.append(len(parents) - 1)
            else:
                stack.pop()
        return parents

    def __len__(self) -> int:
        return self.n_nodes

    def size_report(self) -> SizeReport:
        """Payload = 2 * nodes paren bits; directory = everything else."""
        w = _width(self._L)
        aux = 2 * self._off
        aux += self._parens.size_report().directory_bits
        aux += self._leaf.size_report().directory_bits
        aux += self._internal.size_report().directory_bits
        aux += self._bstart.size * w + 2 * self._P * 2 * w
        return SizeReport(2 * self.n_nodes, aux)


# o(n) ceiling on BPForest auxiliary bits: C * L / lg L + C0 where L is the paren count.
BP_AUX_C = 128
BP_AUX_C0 = 4096


def bp_aux_bound(paren_length: int) -> int:
    lg = max(1.0, math.log2(max(paren_length, 2)))
    return int(BP_AUX_C * paren_length / lg) + BP_AUX_C0


def from_parents(parents: Sequence[int]) -> BPForest:
    return BPForest.from_parents(parents)


def lca(f: BPForest, u: int, v: int) -> int:
    return f.lca(u, v)


def child_toward(f: BPForest, a: int, v: int) -> int:
    return f.child_toward(a, v)
