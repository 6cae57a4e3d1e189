"""Left-to-right-minima trees: previous-smaller-value parents over positions 0..n.

Node 0 stands for an artificial minimum in front of the array; node i >= 1
is position i. Equal values are ranked by position, so every array behaves
like a permutation. Children are in increasing position order, which makes
the node ids 0..n a preorder.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .bp_forest import BPForest
from .counters import OpCounter
from .errors import ContractError, RangeError


def as_values(A: Sequence[int]) -> np.ndarray:
    """Copy an input array into an int64 vector (reads every element once)."""
    if isinstance(A, np.ndarray):
        return A.astype(np.int64, copy=True)
    try:
        return np.fromiter((int(a) for a in A), dtype=np.int64, count=len(A))
    except OverflowError as exc:
        raise ContractError("values must fit in signed 64-bit integers") from exc


def ranks(A: Sequence[int]) -> np.ndarray:
    """Ranks 1..n of the (value, position) order."""
    vals = as_values(A)
    r = np.empty(vals.size, dtype=np.int64)
    r[np.argsort(vals, kind="stable")] = np.arange(1, vals.size + 1)
    return r


@dataclass(eq=False)
class LRMTree:
    """Parent array over nodes 0..n plus lazily built BP view and depths."""

    parents: np.ndarray
    comparisons: int = 0
    _bp: Optional[BPForest] = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.parents.size - 1

    @property
    def bp(self) -> BPForest:
        if self._bp is None:
            self._bp = BPForest.from_parents(self.parents)
        return self._bp

    @cached_property
    def depths(self) -> np.ndarray:
        return _kernels.depths_from_parents(self.parents)

    @cached_property
    def out_degrees(self) -> np.ndarray:
        return np.bincount(self.parents[1:], minlength=self.n + 1)

    @property
    def leaf_count(self) -> int:
        return int(np.count_nonzero(self.out_degrees == 0))

    def psv(self, i: int) -> int:
        return psv(self, i)


def build_lrm_tree(A: Sequence[int], counter: Optional[OpCounter] = None) -> LRMTree:
    """Build the tree with the rightmost-branch stack scan (<= 2n comparisons).

    The comparison count follows the charging argument: one per element
    popped off the rightmost branch plus one per insertion.
    """
    vals = as_values(A)
    parents, cmp = _kernels.lrm_parents(vals)
    if counter is not None:
        counter.comparisons += int(cmp)
    return LRMTree(parents, int(cmp))


def psv(t: LRMTree, i: int) -> int:
    """Previous smaller value of position i; 0 is the artificial minimum."""
    if not 1 <= i <= t.n:
        raise RangeError(f"psv position {i} outside [1..{t.n}]")
    return int(t.parents[i])


def run_heads(A: Sequence[int], strict: bool = False) -> np.ndarray:
    """0/1 array, bit i-1 set iff position i starts a run (or strict run).

    A run breaks where the ranked value drops; a strict run also breaks
    where the next rank is not exactly one more.
    """
    r = ranks(A)
    if r.size == 0:
        raise ContractError("run_heads needs n >= 1")
    heads = np.ones(r.size, dtype=np.uint8)
    if strict:
        heads[1:] = r[1:] != r[:-1] + 1
    else:
        heads[1:] = r[1:] < r[:-1]
    return heads


def depths_preorder(t: LRMTree) -> np.ndarray:
    """Depth of every node in preorder (node ids are already preorder)."""
    return t.depths
