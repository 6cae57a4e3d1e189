"""Compiled rank/select and balanced-parentheses navigation.

The Python classes in ``bitseq`` and ``bp_forest`` hold their directories
as numpy arrays and call into these functions; the batch entry points at
the bottom run the very same scalar routines in a loop.

Bit vectors are passed as (words, kind, super, block[, samples]). ``kind``
selects the word view: 0 is the stored bits, 1 the "()" occurrences and 2
the "((" occurrences, both derived from the paren words on the fly.

A BP forest is passed as the tuple built by ``BPForest._state``:

    0 words  1 super  2 block  3 samples1
    4 leaf super  5 leaf block  6 leaf samples
    7 internal super  8 internal block  9 internal samples
    10 block start excess  11 tree min  12 tree count
    13 P (tree leaves)  14 L (paren count)  15 off (1 if wrapped)
"""
import numpy as np
from numba import njit

_U1 = np.uint64(1)
_UFF = np.uint64(0xFF)
_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)

BLOCK = 256
CHUNKS_PER_BLOCK = BLOCK // 8
SELECT_SAMPLE = 512
INF = 1 << 62


def _tables():
    pop8 = np.array([bin(b).count("1") for b in range(256)], dtype=np.int64)
    sel8 = np.full(256 * 8, -1, dtype=np.int64)
    for b in range(256):
        r = 0
        for j in range(8):
            if (b >> j) & 1:
                sel8[b * 8 + r] = j
                r += 1
    le = np.zeros(256 * 17, dtype=np.int64)
    eq = np.zeros(256 * 17, dtype=np.int64)
    exc = np.zeros(256, dtype=np.int64)
    cmin = np.zeros(256, dtype=np.int64)
    for b in range(256):
        prefix = []
        e = 0
        for j in range(8):
            prefix.append(e)
            e += 1 if (b >> j) & 1 else -1
        exc[b] = e
        cmin[b] = min(prefix)
        for t in range(-8, 9):
            le[b * 17 + t + 8] = sum(1 << j for j in range(8) if prefix[j] <= t)
            eq[b * 17 + t + 8] = sum(1 << j for j in range(8) if prefix[j] == t)
    return pop8, sel8, le, eq, exc, cmin


POP8, SEL8, LE, EQ, EXC, CMIN = _tables()


# ----------------------------------------------------------------------
# words


@njit(cache=True, inline="always")
def popcount(x):
    x = x - ((x >> _U1) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return np.int64((x * _H01) >> np.uint64(56))


@njit(cache=True, inline="always")
def word_at(words, k, kind):
    x = words[k]
    if kind == 0:
        return x
    nb = words[k + 1] & _U1 if k + 1 < words.shape[0] else np.uint64(0)
    y = (x >> _U1) | (nb << np.uint64(63))
    if kind == 1:
        return x & ~y
    return x & y


@njit(cache=True)
def select_in_word(x, r):
    """0-based index of the r-th (1-based) set bit of x."""
    sh = 0
    while True:
        b = np.int64((x >> np.uint64(sh)) & _UFF)
        c = POP8[b]
        if r <= c:
            return sh + SEL8[(b << 3) + r - 1]
        r -= c
        sh += 8


# ----------------------------------------------------------------------
# plain rank / select (0-based positions, 1-based k)


@njit(cache=True)
def rank1(words, kind, sup, blk, i):
    w = i >> 6
    m = (_U1 << np.uint64(i & 63)) - _U1
    return sup[i >> 9] + blk[w] + popcount(word_at(words, w, kind) & m)


@njit(cache=True)
def select1(words, kind, sup, blk, samples, k):
    s = (k - 1) // SELECT_SAMPLE
    lo = samples[s]
    hi = samples[s + 1] if s + 1 < samples.shape[0] else samples[samples.shape[0] - 1]
    while lo < hi:
        mid = (lo + hi + 1) >> 1
        if sup[mid] < k:
            lo = mid
        else:
            hi = mid - 1
    w = lo << 3
    last = min(w + 8, words.shape[0]) - 1
    base = sup[lo]
    while w < last and base + blk[w + 1] < k:
        w += 1
    return (w << 6) + select_in_word(word_at(words, w, kind), k - base - blk[w])


@njit(cache=True)
def select0(words, sup, blk, samples, k):
    s = (k - 1) // SELECT_SAMPLE
    lo = samples[s]
    hi = samples[s + 1] if s + 1 < samples.shape[0] else samples[samples.shape[0] - 1]
    while lo < hi:
        mid = (lo + hi + 1) >> 1
        if (mid << 9) - sup[mid] < k:
            lo = mid
        else:
            hi = mid - 1
    sb = lo
    w = sb << 3
    last = min(w + 8, words.shape[0]) - 1
    zbase = (sb << 9) - sup[sb]
    while w < last and zbase + ((w + 1 - (sb << 3)) << 6) - blk[w + 1] < k:
        w += 1
    r = k - zbase - (((w - (sb << 3)) << 6) - blk[w])
    return (w << 6) + select_in_word(~words[w], r)


@njit(cache=True)
def access(words, x):
    return np.int64((words[x >> 6] >> np.uint64(x & 63)) & _U1)


# ----------------------------------------------------------------------
# excess primitives


@njit(cache=True, inline="always")
def _le_mask(b, t):
    if t >= 8:
        return 0xFF
    if t < -8:
        return 0
    return LE[b * 17 + t + 8]


@njit(cache=True, inline="always")
def _eq_mask(b, t):
    if t > 8 or t < -8:
        return 0
    return EQ[b * 17 + t + 8]


@njit(cache=True, inline="always")
def _lowbit(m):
    k = 0
    while not (m >> k) & 1:
        k += 1
    return k


@njit(cache=True, inline="always")
def _highbit(m):
    k = 7
    while not (m >> k) & 1:
        k -= 1
    return k


@njit(cache=True, inline="always")
def _chunk(words, c):
    return np.int64((words[c >> 3] >> np.uint64((c & 7) << 3)) & _UFF)


@njit(cache=True, inline="always")
def _leaf_chunk(words, c):
    return np.int64((word_at(words, c >> 3, 1) >> np.uint64((c & 7) << 3)) & _UFF)


@njit(cache=True)
def excess(st, x):
    return 2 * rank1(st[0], 0, st[1], st[2], x) - x


@njit(cache=True)
def _next_block(tmin, P, k, t):
    i = P + k
    while True:
        if i == 1:
            return -1
        if not i & 1 and tmin[i + 1] <= t:
            i += 1
            break
        i >>= 1
    while i < P:
        i = 2 * i if tmin[2 * i] <= t else 2 * i + 1
    return i - P


@njit(cache=True)
def _prev_block(tmin, P, k, t):
    i = P + k
    while True:
        if i == 1:
            return -1
        if i & 1 and tmin[i - 1] <= t:
            i -= 1
            break
        i >>= 1
    while i < P:
        i = 2 * i + 1 if tmin[2 * i + 1] <= t else 2 * i
    return i - P


@njit(cache=True)
def fwd(st, x0, t):
    """Smallest x >= x0 with E(x) <= t, or -1."""
    words = st[0]
    L = st[14]
    if x0 > L:
        return -1
    last_chunk = L >> 3
    c = x0 >> 3
    e = excess(st, c << 3)
    b = _chunk(words, c)
    m = _le_mask(b, t - e) & (0xFF << (x0 & 7)) & 0xFF
    if m:
        x = (c << 3) + _lowbit(m)
        return x if x <= L else -1
    e += EXC[b]
    c += 1
    k = x0 >> 8
    cend = min((k + 1) * CHUNKS_PER_BLOCK, last_chunk + 1)
    while c < cend:
        b = _chunk(words, c)
        m = _le_mask(b, t - e)
        if m:
            x = (c << 3) + _lowbit(m)
            return x if x <= L else -1
        e += EXC[b]
        c += 1
    k = _next_block(st[11], st[13], k, t)
    if k < 0:
        return -1
    c = k * CHUNKS_PER_BLOCK
    e = st[10][k]
    while c <= last_chunk:
        b = _chunk(words, c)
        m = _le_mask(b, t - e)
        if m:
            x = (c << 3) + _lowbit(m)
            return x if x <= L else -1
        e += EXC[b]
        c += 1
    return -1


@njit(cache=True)
def bwd(st, x0, t):
    """Largest x <= x0 with E(x) <= t, or -1."""
    words = st[0]
    if x0 < 0:
        return -1
    c = x0 >> 3
    e = excess(st, c << 3)
    b = _chunk(words, c)
    m = _le_mask(b, t - e) & ((2 << (x0 & 7)) - 1)
    if m:
        return (c << 3) + _highbit(m)
    k = x0 >> 8
    cstart = k * CHUNKS_PER_BLOCK
    c -= 1
    while c >= cstart:
        b = _chunk(words, c)
        e -= EXC[b]
        m = _le_mask(b, t - e)
        if m:
            return (c << 3) + _highbit(m)
        c -= 1
    k = _prev_block(st[11], st[13], k, t)
    if k < 0:
        return -1
    c = (k + 1) * CHUNKS_PER_BLOCK - 1
    e = st[10][k + 1]
    while True:
        b = _chunk(words, c)
        e -= EXC[b]
        m = _le_mask(b, t - e)
        if m:
            return (c << 3) + _highbit(m)
        c -= 1


@njit(cache=True)
def _seg_min(tmin, P, k1, k2):
    lo = k1 + P
    hi = k2 + P + 1
    best = INF
    while lo < hi:
        if lo & 1:
            best = min(best, tmin[lo])
            lo += 1
        if hi & 1:
            hi -= 1
            best = min(best, tmin[hi])
        lo >>= 1
        hi >>= 1
    return best


@njit(cache=True)
def range_min(st, lo, hi):
    """min E(x) over lo <= x <= hi."""
    words = st[0]
    best = INF
    x = lo
    e = excess(st, lo)
    while x <= hi and x & 7:
        best = min(best, e)
        e += 1 if access(words, x) else -1
        x += 1
    while x + 7 <= hi and x & (BLOCK - 1):
        b = _chunk(words, x >> 3)
        best = min(best, e + CMIN[b])
        e += EXC[b]
        x += 8
    if not x & (BLOCK - 1) and x + BLOCK - 1 <= hi:
        k1 = x // BLOCK
        k2 = (hi + 1) // BLOCK - 1
        best = min(best, _seg_min(st[11], st[13], k1, k2))
        x = (k2 + 1) * BLOCK
        e = st[10][k2 + 1]
    while x + 7 <= hi:
        b = _chunk(words, x >> 3)
        best = min(best, e + CMIN[b])
        e += EXC[b]
        x += 8
    while x <= hi:
        best = min(best, e)
        e += 1 if access(words, x) else -1
        x += 1
    return best


@njit(cache=True)
def _seg_level(tmin, tcnt, P, k1, k2, d, p):
    """Block holding the p-th leaf opening at level d within blocks k1..k2.

    Returns (block, p - occurrences before it) or (-1, p - total).
    """
    left = np.empty(64, dtype=np.int64)
    right = np.empty(64, dtype=np.int64)
    nl = 0
    nr = 0
    lo = k1 + P
    hi = k2 + P + 1
    while lo < hi:
        if lo & 1:
            left[nl] = lo
            nl += 1
            lo += 1
        if hi & 1:
            hi -= 1
            right[nr] = hi
            nr += 1
        lo >>= 1
        hi >>= 1
    for idx in range(nl + nr):
        node = left[idx] if idx < nl else right[nr - 1 - (idx - nl)]
        if tmin[node] != d:
            continue
        if tcnt[node] < p:
            p -= tcnt[node]
            continue
        while node < P:
            lft = 2 * node
            if tmin[lft] == d:
                if tcnt[lft] >= p:
                    node = lft
                    continue
                p -= tcnt[lft]
            node = lft + 1
        return node - P, p
    return -1, p


@njit(cache=True)
def level_scan(st, lo, hi, d, p):
    """Walk [lo, hi] counting leaf openings x with E(x) == d.

    Returns (position of the p-th one, 0) if reached, else (-1, count).
    Assumes E >= d on the whole range.
    """
    words = st[0]
    count = 0
    use_tree = True
    x = lo
    e = excess(st, lo)
    while x <= hi and x & 7:
        if e == d and access(words, x) and not access(words, x + 1):
            count += 1
            if count == p:
                return x, 0
        e += 1 if access(words, x) else -1
        x += 1
    while x + 7 <= hi:
        if use_tree and not x & (BLOCK - 1) and x + BLOCK - 1 <= hi:
            k1 = x // BLOCK
            k2 = (hi + 1) // BLOCK - 1
            found, rem = _seg_level(st[11], st[12], st[13], k1, k2, d, p - count)
            count = p - rem
            if found >= 0:
                # rescan the block that holds the target
                use_tree = False
                x = found * BLOCK
                e = st[10][found]
                hi = x + BLOCK - 1
            else:
                x = (k2 + 1) * BLOCK
                e = st[10][k2 + 1]
            continue
        c = x >> 3
        b = _chunk(words, c)
        m = _eq_mask(b, d - e) & _leaf_chunk(words, c)
        cnt = POP8[m]
        if count + cnt >= p:
            for _ in range(p - count - 1):
                m &= m - 1
            return x + _lowbit(m), 0
        count += cnt
        e += EXC[b]
        x += 8
    while x <= hi:
        if e == d and access(words, x) and not access(words, x + 1):
            count += 1
            if count == p:
                return x, 0
        e += 1 if access(words, x) else -1
        x += 1
    return -1, count


# ----------------------------------------------------------------------
# node operations (node ids are preorder ranks; no range checks here)


@njit(cache=True)
def open_of(st, v):
    return select1(st[0], 0, st[1], st[2], st[3], v + 1 + st[15])


@njit(cache=True)
def node_at(st, x):
    return rank1(st[0], 0, st[1], st[2], x + 1) - 1 - st[15]


@njit(cache=True)
def close_of(st, x):
    return fwd(st, x + 1, excess(st, x)) - 1


@njit(cache=True)
def parent(st, v):
    x = open_of(st, v)
    e = excess(st, x)
    if e == 0:
        return -1
    return node_at(st, bwd(st, x, e - 1))


@njit(cache=True)
def lca(st, u, v):
    if u == v:
        return u
    p = open_of(st, u)
    q = open_of(st, v)
    if p > q:
        p, q = q, p
        u = v
    # u is an ancestor iff the excess never returns to E(p) before q
    m = range_min(st, p + 1, q)
    if m > excess(st, p):
        return u
    return node_at(st, bwd(st, p, m - 1))


@njit(cache=True)
def ancestor_or_child_toward(st, u, v):
    """For u before v in preorder: u if u is an ancestor of v, else the
    child of lca(u, v) on the path to v."""
    p = open_of(st, u)
    q = open_of(st, v)
    m = range_min(st, p + 1, q)
    if m > excess(st, p):
        return u
    # the lca opens at excess m - 1, so its children open at excess m
    return node_at(st, bwd(st, q, m))


@njit(cache=True)
def leaf_rank(st, v):
    return rank1(st[0], 1, st[4], st[5], open_of(st, v) + 1)


@njit(cache=True)
def leaf_select(st, k):
    return node_at(st, select1(st[0], 1, st[4], st[5], st[6], k))


@njit(cache=True)
def internal_rank(st, v):
    return rank1(st[0], 2, st[7], st[8], open_of(st, v) + 1) - st[15]


@njit(cache=True)
def internal_select(st, k):
    return node_at(st, select1(st[0], 2, st[7], st[8], st[9], k + st[15]))


@njit(cache=True)
def leaf_children_left_of(st, v):
    x = open_of(st, v)
    e = excess(st, x)
    if e == 0:
        return 0
    po = bwd(st, x, e - 1)
    if po + 1 > x - 1:
        return 0
    _, count = level_scan(st, po + 1, x - 1, e, INF)
    return count


@njit(cache=True)
def leaf_child_select(st, u, p):
    """The p-th leaf child of u, or -1."""
    ou = open_of(st, u)
    cu = close_of(st, ou)
    found, _ = level_scan(st, ou + 1, cu - 1, excess(st, ou) + 1, p)
    if found < 0:
        return -1
    return node_at(st, found)


# ----------------------------------------------------------------------
# batch entry points


@njit(cache=True)
def child_toward(st, a, v):
    """Child of a on the path to v; a must be a proper ancestor of v."""
    return node_at(st, bwd(st, open_of(st, v), excess(st, open_of(st, a)) + 1))


@njit(cache=True)
def lca_many(st, us, vs):
    out = np.empty(us.shape[0], dtype=np.int64)
    for t in range(us.shape[0]):
        out[t] = lca(st, us[t], vs[t])
    return out


@njit(cache=True)
def child_toward_many(st, aa, vs):
    """child_toward over pairs; -1 where a is not a proper ancestor of v."""
    out = np.empty(aa.shape[0], dtype=np.int64)
    for t in range(aa.shape[0]):
        oa = open_of(st, aa[t])
        ov = open_of(st, vs[t])
        if oa < ov and ov <= close_of(st, oa):
            out[t] = child_toward(st, aa[t], vs[t])
        else:
            out[t] = -1
    return out


@njit(cache=True)
def rmq_many(st, ii, jj):
    out = np.empty(ii.shape[0], dtype=np.int64)
    for t in range(ii.shape[0]):
        i = ii[t]
        j = jj[t]
        out[t] = i if i == j else ancestor_or_child_toward(st, i, j)
    return out


@njit(cache=True)
def map_one(st, i):
    """(internal rank of the parent of leaf i, 1 + leaf siblings to its left)."""
    x = select1(st[0], 1, st[4], st[5], st[6], i)
    e = excess(st, x)
    po = bwd(st, x, e - 1)
    s = rank1(st[0], 2, st[7], st[8], po + 1) - st[15]
    if po + 1 > x - 1:
        return s, 1
    _, count = level_scan(st, po + 1, x - 1, e, INF)
    return s, 1 + count


@njit(cache=True)
def unmap_one(st, s, p):
    leaf = leaf_child_select(st, internal_select(st, s), p)
    if leaf < 0:
        return -1
    return leaf_rank(st, leaf)


@njit(cache=True)
def climb(nb, left, parent_of, start, r, k, off):
    """Offset at the merge root of element ``off`` of merge node k."""
    words, sup, blk, s1, s0 = nb
    while parent_of[k] >= 0:
        par = parent_of[k]
        base = start[par - r]
        if left[par] == k:
            zeros = base - rank1(words, 0, sup, blk, base)
            off = select0(words, sup, blk, s0, zeros + off) - base + 1
        else:
            off = select1(words, 0, sup, blk, s1, rank1(words, 0, sup, blk, base) + off) - base + 1
        k = par
    return off


@njit(cache=True)
def descend(nb, left, right, start, r, off):
    """Leaf merge node and offset holding root offset ``off``."""
    words, sup, blk, s1, s0 = nb
    k = left.shape[0] - 1
    while k >= r:
        base = start[k - r]
        x = base + off - 1
        ones_before = rank1(words, 0, sup, blk, x) - rank1(words, 0, sup, blk, base)
        if access(words, x):
            off = ones_before + 1
            k = right[k]
        else:
            off = off - ones_before
            k = left[k]
    return k, off


@njit(cache=True)
def apply_many(st, nb, left, parent_of, start, r, positions):
    out = np.empty(positions.shape[0], dtype=np.int64)
    for t in range(positions.shape[0]):
        s, p = map_one(st, positions[t])
        out[t] = climb(nb, left, parent_of, start, r, s - 1, p)
    return out


@njit(cache=True)
def inverse_many(st, nb, left, right, start, r, values):
    out = np.empty(values.shape[0], dtype=np.int64)
    for t in range(values.shape[0]):
        k, off = descend(nb, left, right, start, r, values[t])
        out[t] = unmap_one(st, k + 1, off)
    return out


@njit(cache=True)
def map_many(st, positions):
    s_out = np.empty(positions.shape[0], dtype=np.int64)
    p_out = np.empty(positions.shape[0], dtype=np.int64)
    for t in range(positions.shape[0]):
        s_out[t], p_out[t] = map_one(st, positions[t])
    return s_out, p_out


@njit(cache=True)
def unmap_many(st, ss, pp):
    out = np.empty(ss.shape[0], dtype=np.int64)
    for t in range(ss.shape[0]):
        out[t] = unmap_one(st, ss[t], pp[t])
    return out


# ----------------------------------------------------------------------
# construction helpers


@njit(cache=True)
def pattern_counts(words, kind):
    """Set bits per word of a derived pattern view (directory input)."""
    out = np.empty(words.shape[0], dtype=np.int64)
    for k in range(words.shape[0]):
        out[k] = popcount(word_at(words, k, kind))
    return out


@njit(cache=True)
def build_blocks(bits):
    """Block start excesses, block-min segment tree and leaf counts at the minima.

    Returns (bstart with the final excess appended, tmin, tcnt, P).
    """
    L = bits.shape[0]
    nb = L // BLOCK + 1
    E = np.empty(L + 1, dtype=np.int64)
    E[0] = 0
    for x in range(L):
        E[x + 1] = E[x] + (1 if bits[x] else -1)
    bmin = np.full(nb, INF, dtype=np.int64)
    for x in range(L + 1):
        b = x // BLOCK
        if E[x] < bmin[b]:
            bmin[b] = E[x]
    bcnt = np.zeros(nb, dtype=np.int64)
    for x in range(L - 1):
        if bits[x] == 1 and bits[x + 1] == 0 and E[x] == bmin[x // BLOCK]:
            bcnt[x // BLOCK] += 1
    P = 1
    while P < nb:
        P <<= 1
    tmin = np.full(2 * P, INF, dtype=np.int64)
    tcnt = np.zeros(2 * P, dtype=np.int64)
    for b in range(nb):
        tmin[P + b] = bmin[b]
        tcnt[P + b] = bcnt[b]
    for i in range(P - 1, 0, -1):
        a = tmin[2 * i]
        c = tmin[2 * i + 1]
        m = min(a, c)
        tmin[i] = m
        tcnt[i] = (tcnt[2 * i] if a == m else 0) + (tcnt[2 * i + 1] if c == m else 0)
    bstart = np.empty(nb + 1, dtype=np.int64)
    for b in range(nb):
        bstart[b] = E[b * BLOCK]
    bstart[nb] = E[L]
    return bstart, tmin, tcnt, P
