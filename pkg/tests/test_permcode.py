import numpy as np
import pytest

from lrmkit.counters import OpCounter
from lrmkit.container import ContainerError, Reader, Writer
from lrmkit.errors import CapabilityError, ContractError, RangeError, StructureError
from lrmkit.lrm import build_lrm_tree
from lrmkit.partition_sort import entropy
from lrmkit.permcode import PermCode, apply, encode, inverse, map_position, psv_query, rmq_query, size_report, unmap

from oracles import all_permutations, huffman_depths, peel_partition, psv_parents, scan_rmq

PI = [4, 5, 9, 6, 8, 1, 3, 7, 2]


def check_code(pi, c=None):
    n = len(pi)
    c = c if c is not None else encode(pi)
    inv = [0] * (n + 1)
    for i, v in enumerate(pi, 1):
        inv[v] = i
    parts = peel_partition(psv_parents(pi))
    where = {pos: (s, p) for s, part in enumerate(parts, 1) for p, pos in enumerate(part, 1)}
    assert c.rho == len(parts)
    for i in range(1, n + 1):
        assert c.apply(i) == pi[i - 1]
        assert c.inverse(i) == inv[i]
        assert c.map(i) == where[i]
        assert c.unmap(*where[i]) == i
    assert c.to_list() == list(pi)
    lengths = [len(p) for p in parts]
    rep = c.size_report()
    assert rep["forest_paren_bits"] == 2 * (n + len(parts))
    wpl = sum(w * d for w, d in zip(lengths, huffman_depths(lengths))) if parts else 0
    assert rep["merge_payload_bits"] == wpl
    if parts:
        assert wpl <= n * (entropy(lengths) + 1) + 1e-9
    return c


def test_examples():
    c = encode(PI)
    assert c.forest.to_string() == "(()()(())()())(()()())(())"
    assert map_position(c, 3) == (2, 1)
    assert map_position(c, 5) == (1, 4)
    assert map_position(c, 9) == (4, 1)
    assert unmap(c, 3, 2) == 7 and unmap(c, 1, 1) == 1
    assert all(unmap(c, *map_position(c, i)) == i for i in range(1, 10))
    assert apply(c, 3) == 9 and apply(c, 6) == 1
    assert inverse(c, 9) == 3 and inverse(c, 2) == 9
    rep = size_report(c)
    assert rep["forest_paren_bits"] == 26 and rep["merge_payload_bits"] == 16
    assert rep["rho"] == 4 and rep["lrm_paren_bits"] == 0


def test_identity_and_tiny():
    c = encode([1, 2, 3, 4, 5])
    assert c.forest.to_string() == "(()()()()())"
    assert c.rho == 1 and c.size_report()["merge_payload_bits"] == 0
    assert [c.apply(i) for i in range(1, 6)] == [1, 2, 3, 4, 5]
    one = encode([1])
    assert one.apply(1) == 1 and one.inverse(1) == 1
    empty = encode([])
    assert empty.n == 0 and empty.to_list() == []


def test_psv_rmq_support():
    c = encode(PI, with_psv_rmq=True)
    assert psv_query(c, 9) == 6 and psv_query(c, 1) == 0
    assert rmq_query(c, 3, 9) == 6
    par = psv_parents(PI)
    for i in range(1, 10):
        assert c.psv_query(i) == par[i]
        for j in range(i, 10):
            assert c.rmq_query(i, j) == scan_rmq(PI, i, j)
    rep = c.size_report()
    assert rep["lrm_paren_bits"] == 2 * (9 + 1)
    plain = encode(PI)
    with pytest.raises(CapabilityError):
        plain.psv_query(3)
    with pytest.raises(CapabilityError):
        plain.rmq_query(1, 2)


@pytest.mark.parametrize("n", range(1, 8))
def test_all_permutations(n):
    """n = 8 is covered exhaustively by the acceptance suite."""
    for row in all_permutations(n):
        check_code(row.tolist())


def test_random_permutations():
    rng = np.random.default_rng(5)
    for k in range(500):
        n = int(rng.integers(1, 10001)) if k % 5 else int(rng.integers(1, 200))
        pi = rng.permutation(n) + 1
        cut = int(rng.integers(0, n + 1))
        pi[:cut] = np.sort(pi[:cut])
        c = encode(pi)
        inv = np.empty(n + 1, dtype=np.int64)
        inv[pi] = np.arange(1, n + 1)
        idx = np.arange(1, n + 1)
        assert np.array_equal(c.apply_many(idx), pi)
        assert np.array_equal(c.inverse_many(idx), inv[1:])
        ss, pp = c.map_many(idx)
        assert np.array_equal(c.unmap_many(ss, pp), idx)
        if k % 50 == 0:
            check_code(pi.tolist(), c)
        for i in rng.integers(1, n + 1, size=5).tolist():
            assert c.apply(i) == pi[i - 1] and c.inverse(int(pi[i - 1])) == i


def test_average_levels_bound():
    rng = np.random.default_rng(8)
    for n in (50, 1000, 20000):
        pi = rng.permutation(n) + 1
        pi[: n // 2] = np.sort(pi[: n // 2])
        c = encode(pi)
        rep = c.size_report()
        avg = rep["merge_payload_bits"] / n
        if n <= 1000:
            assert avg == pytest.approx(sum(c.levels(i) for i in range(1, n + 1)) / n)
        assert avg <= rep["h_lrm"] + 1 + 1e-9
        assert max(c.levels(i) for i in range(1, min(n, 500) + 1)) <= rep["max_leaf_depth"]


def test_encode_comparisons():
    rng = np.random.default_rng(1)
    for n in (1, 9, 1000, 30000):
        pi = rng.permutation(n) + 1
        cnt = OpCounter()
        c = encode(pi, counter=cnt)
        assert cnt.comparisons <= n * (3 + c.size_report()["h_lrm"]) + 1e-9


def test_round_trip_bytes():
    rng = np.random.default_rng(4)
    for n in (0, 1, 9, 500, 5000):
        pi = (rng.permutation(n) + 1).tolist() if n != 9 else PI
        for flag in (False, True):
            c = encode(pi, with_psv_rmq=flag)
            back = PermCode.from_bytes(c.to_bytes())
            assert back.to_list() == list(pi)
            assert back.size_report() == c.size_report()
            assert back.to_bytes() == c.to_bytes()
            if flag and n:
                assert back.rmq_query(1, n) == pi.index(1) + 1


def test_corrupt_bytes_rejected():
    data = encode(PI).to_bytes()
    with pytest.raises(ContainerError):
        PermCode.from_bytes(data[:-3])
    with pytest.raises(ContainerError):
        PermCode.from_bytes(b"XXXX" + data[4:])
    with pytest.raises(ContainerError):
        from lrmkit.rmq import build_plain

        PermCode.from_bytes(build_plain(PI).to_writer().to_bytes())
    bad = bytearray(data)
    # the header ints follow the 10-byte container header and a 9-byte section header
    bad[19] = 10
    with pytest.raises(StructureError):
        PermCode.from_bytes(bytes(bad))


def _resections(data, edit):
    """Decode a code's sections, let ``edit`` change them, and re-encode."""
    rd = Reader(data)
    header, parens, shape, leaves, payload = rd.ints(), rd.bits(), rd.bits(), rd.ints(), rd.bits()
    header, parens, shape, leaves, payload = edit(header.copy(), parens, shape, leaves.copy(), payload.copy())
    return Writer(rd.tag).ints(header).bits(parens).bits(shape).ints(leaves).bits(payload).to_bytes()


def test_inconsistent_sections_rejected():
    data = encode(PI).to_bytes()

    def flip_node_bit(h, f, s, lv, pl):
        pl[0] ^= 1
        return h, f, s, lv, pl

    def bad_leaf_map(h, f, s, lv, pl):
        lv[0] = 99
        return h, f, s, lv, pl

    def bad_flags(h, f, s, lv, pl):
        h[2] = 4
        return h, f, s, lv, pl

    for edit in (flip_node_bit, bad_leaf_map, bad_flags):
        with pytest.raises(StructureError):
            PermCode.from_bytes(_resections(data, edit))
    assert PermCode.from_bytes(_resections(data, lambda *a: a)).to_list() == PI


def test_errors():
    with pytest.raises(ContractError, match="position 3: value 2 already seen at position 1"):
        encode([2, 1, 2])
    with pytest.raises(ContractError, match="position 2: value 7"):
        encode([1, 7, 2])
    with pytest.raises(ContractError):
        encode([0, 1])
    c = encode(PI)
    for bad in (lambda: c.apply(0), lambda: c.apply(10), lambda: c.inverse(10), lambda: c.map(0),
                lambda: c.unmap(5, 1), lambda: c.unmap(2, 2), lambda: c.unmap(1, 0),
                lambda: c.apply_many([1, 10]), lambda: c.unmap_many([2], [2])):
        with pytest.raises(RangeError):
            bad()


def test_forest_nests_lrm_parts():
    # the LRM-tree depth structure is what makes the forest well formed
    rng = np.random.default_rng(2)
    for _ in range(100):
        pi = (rng.permutation(int(rng.integers(1, 400))) + 1).tolist()
        c = encode(pi)
        t = build_lrm_tree(pi)
        assert c.rho == t.leaf_count
        assert c.forest.leaf_count == len(pi) and c.forest.internal_count == c.rho
