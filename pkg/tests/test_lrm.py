import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lrmkit.counters import OpCounter
from lrmkit.errors import ContractError, RangeError
from lrmkit.lrm import build_lrm_tree, depths_preorder, psv, ranks, run_heads

from oracles import all_permutations, psv_parents, psv_parents_rows, runs

PI = [4, 5, 9, 6, 8, 1, 3, 7, 2]


def test_examples():
    t = build_lrm_tree(PI)
    assert t.parents.tolist() == [-1, 0, 1, 2, 2, 4, 0, 6, 7, 6]
    assert psv(t, 9) == 6 and psv(t, 1) == 0 and psv(t, 5) == 4
    c = OpCounter()
    s = build_lrm_tree([1, 2, 3, 4], c)
    assert s.parents.tolist() == [-1, 0, 1, 2, 3] and s.comparisons == 4 == c.comparisons
    r = build_lrm_tree([4, 3, 2, 1])
    assert r.parents.tolist() == [-1, 0, 0, 0, 0] and r.comparisons <= 8
    assert depths_preorder(t).tolist() == [0, 1, 2, 3, 3, 4, 1, 2, 3, 2]
    assert depths_preorder(build_lrm_tree([1, 2, 3])).tolist() == [0, 1, 2, 3]
    assert depths_preorder(build_lrm_tree([3, 2, 1])).tolist() == [0, 1, 1, 1]


def test_run_heads_examples():
    A = [2, 3, 4, 1, 5, 6, 7, 8]
    assert "".join(map(str, run_heads(A).tolist())) == "10010000"
    assert "".join(map(str, run_heads(A, strict=True).tolist())) == "10011000"
    assert "".join(map(str, run_heads([1, 2, 3, 4, 5], strict=True).tolist())) == "10000"
    with pytest.raises(ContractError):
        run_heads([])


def test_empty_and_errors():
    t = build_lrm_tree([])
    assert t.n == 0 and t.comparisons == 0 and t.parents.tolist() == [-1]
    with pytest.raises(RangeError):
        psv(build_lrm_tree(PI), 0)
    with pytest.raises(RangeError):
        psv(build_lrm_tree(PI), 10)


@pytest.mark.parametrize("n", range(0, 10))
def test_all_permutations_against_psv_oracle(n):
    M = all_permutations(n)
    want = psv_parents_rows(M)
    for row, expect in zip(M, want):
        t = build_lrm_tree(row)
        assert np.array_equal(t.parents, expect)
        assert n <= t.comparisons <= 2 * n
    sorted_tree = build_lrm_tree(np.arange(1, n + 1))
    assert sorted_tree.comparisons == n


def test_random_arrays_with_repeats():
    rng = np.random.default_rng(21)
    for _ in range(1000):
        n = int(rng.integers(1, 2049))
        A = rng.integers(-5, int(rng.integers(1, 50)), size=n)
        t = build_lrm_tree(A)
        assert t.parents.tolist() == psv_parents(A.tolist())
        assert t.comparisons <= 2 * n
        assert t.leaf_count == int(run_heads(A).sum()) == len(runs(A.tolist()))


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=1, max_size=60))
def test_tree_invariants(A):
    t = build_lrm_tree(A)
    par = t.parents.tolist()
    r = ranks(A).tolist()
    # (value, position) strictly increases down every path; parent is the maximal such index
    for i in range(1, len(A) + 1):
        p = par[i]
        assert p < i
        if p > 0:
            assert r[p - 1] < r[i - 1]
        assert all(r[j - 1] > r[i - 1] for j in range(p + 1, i))
    assert t.leaf_count == int(run_heads(A).sum())
    assert int(run_heads(A, strict=True).sum()) == len(runs(A, strict=True))
    D = t.depths.tolist()
    for v in range(len(par)):
        # subtrees are contiguous preorder intervals of D
        end = v + 1
        while end < len(par) and D[end] > D[v]:
            end += 1
        sub = [u for u in range(len(par)) if u == v or (u > v and _is_desc(par, u, v))]
        assert sub == list(range(v, end))


def _is_desc(par, u, v):
    while u > 0:
        u = par[u]
        if u == v:
            return True
    return False


def test_ranks_break_ties_by_position():
    assert ranks([5, 1, 5, 1]).tolist() == [3, 1, 4, 2]
    assert build_lrm_tree([2, 2, 2]).parents.tolist() == [-1, 0, 1, 2]


def test_counter_accumulates():
    c = OpCounter()
    build_lrm_tree([3, 1, 2], c)
    build_lrm_tree([1, 2], c)
    assert c.comparisons == build_lrm_tree([3, 1, 2]).comparisons + 2
    c.reset()
    assert (c.comparisons, c.accesses, c.internal_ops) == (0, 0, 0)
