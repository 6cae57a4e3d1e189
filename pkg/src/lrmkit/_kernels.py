"""Compiled inner loops.

Every loop that runs once per element of an input array lives here so the
Python layer stays readable and the large-corpus checks stay fast. All
functions are pure: arrays in, arrays and counts out.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def lrm_parents(values):
    """Previous-smaller-value parents over positions 0..n (0 is the -inf root).

    Ties are ranked by position, so an earlier equal value counts as smaller.
    Charging: one comparison per pop plus one per insertion, so the count
    is n + pops <= 2n.
    """
    n = values.shape[0]
    parents = np.empty(n + 1, dtype=np.int64)
    parents[0] = -1
    stack = np.empty(n + 1, dtype=np.int64)
    top = 0
    stack[0] = 0
    cmp = 0
    for i in range(1, n + 1):
        x = values[i - 1]
        while top > 0 and values[stack[top] - 1] > x:
            top -= 1
            cmp += 1
        cmp += 1
        parents[i] = stack[top]
        top += 1
        stack[top] = i
    return parents, cmp


@njit(cache=True)
def parents_to_parens(parents):
    """BP bits of a forest whose node ids are preorder ranks.

    Returns (bits, ok); ok is False when some parent is not on the current
    root path, i.e. the ids are not a preorder of an ordered forest.
    """
    n = parents.shape[0]
    bits = np.zeros(2 * n, dtype=np.uint8)
    stack = np.empty(n + 1, dtype=np.int64)
    top = 0
    pos = 0
    for v in range(n):
        p = parents[v]
        if p >= v or p < -1:
            return bits, False
        while top > 0 and stack[top - 1] != p:
            top -= 1
            pos += 1
        if p != -1 and top == 0:
            return bits, False
        bits[pos] = 1
        pos += 1
        stack[top] = v
        top += 1
    return bits, True


@njit(cache=True)
def depths_from_parents(parents):
    n = parents.shape[0]
    depths = np.zeros(n, dtype=np.int64)
    for v in range(n):
        p = parents[v]
        if p >= 0:
            depths[v] = depths[p] + 1
    return depths


@njit(cache=True)
def lrm_partition(parents):
    """Peel the tree into deepest-first root-to-leaf paths ("spinal chords").

    Repeatedly removing the leftmost deepest root-to-leaf path of every
    remaining subtree gives the same paths as letting each node continue
    into its tallest child, the leftmost one on ties. Ids are preorder and
    parents precede children, so one backward pass finds the tallest
    children and one forward pass labels the paths, numbered by their
    first position. Node 0 is the artificial root and belongs to no part.

    Returns (label per position 1..n, members, bounds, index operations);
    part k holds positions members[bounds[k]:bounds[k+1]] (0-based, in
    increasing order). No value of the input is read.
    """
    n = parents.shape[0] - 1
    height = np.zeros(n + 1, dtype=np.int64)
    heavy = np.full(n + 1, -1, dtype=np.int64)
    for v in range(n, 0, -1):
        p = parents[v]
        h = height[v] + 1
        # children arrive right to left, so >= keeps the leftmost tallest
        if h >= height[p]:
            height[p] = h
            heavy[p] = v
    label = np.empty(n, dtype=np.int64)
    size = np.zeros(n + 1, dtype=np.int64)
    parts = 0
    for v in range(1, n + 1):
        p = parents[v]
        if p != 0 and heavy[p] == v:
            lab = label[p - 1]
        else:
            lab = parts
            parts += 1
        label[v - 1] = lab
        size[lab + 1] += 1
    bounds = np.zeros(parts + 1, dtype=np.int64)
    for k in range(parts):
        bounds[k + 1] = bounds[k] + size[k + 1]
    fill = bounds[:parts].copy()
    members = np.empty(n, dtype=np.int64)
    for i in range(n):
        members[fill[label[i]]] = i
        fill[label[i]] += 1
    return label, members, bounds, 2 * n


@njit(cache=True)
def huffman(weights):
    """Two-queue Huffman construction with (weight, creation index) priority.

    Leaves are nodes 0..r-1, internal nodes r..2r-2 in creation order; the
    first node popped becomes the left child. Returns (left, right, parent,
    node weights, ops).
    """
    r = weights.shape[0]
    total = 2 * r - 1
    left = np.full(total, -1, dtype=np.int64)
    right = np.full(total, -1, dtype=np.int64)
    parent = np.full(total, -1, dtype=np.int64)
    w = np.zeros(total, dtype=np.int64)
    for i in range(r):
        w[i] = weights[i]
    order = np.argsort(weights, kind="mergesort")
    ops = r
    qa = 0  # leaf queue head (into order)
    qb = r  # internal queue head (node ids)
    nxt = r
    picked = np.empty(2, dtype=np.int64)
    for _ in range(r - 1):
        for s in range(2):
            take_leaf = False
            if qa < r and (qb >= nxt or w[order[qa]] <= w[qb]):
                take_leaf = True
            if take_leaf:
                picked[s] = order[qa]
                qa += 1
            else:
                picked[s] = qb
                qb += 1
            ops += 1
        left[nxt] = picked[0]
        right[nxt] = picked[1]
        parent[picked[0]] = nxt
        parent[picked[1]] = nxt
        w[nxt] = w[picked[0]] + w[picked[1]]
        nxt += 1
    return left, right, parent, w, ops


@njit(cache=True)
def leaf_depths(parent, r):
    """Depth of every leaf of a merge tree whose parents have larger ids."""
    total = parent.shape[0]
    depth = np.zeros(total, dtype=np.int64)
    for k in range(total - 2, -1, -1):
        depth[k] = depth[parent[k]] + 1
    return depth[:r]


@njit(cache=True)
def merge_plan(values, members, starts, left, right, sizes, with_bits, buf):
    """Run the merges of a Huffman plan bottom-up.

    ``members`` lists the positions (0-based) of every part, part s occupying
    members[starts[s]:starts[s+1]] in increasing order. Keys compare by
    (value, position). Internal node k (k >= r) writes its merged positions
    into a buffer slice; if ``with_bits`` the origin of each output element
    (0 = left child, 1 = right child) is written to a flat bit array whose
    slice for node k starts at bit_start[k - r].

    ``buf`` is scratch for positions, at least sum(sizes) long; its dtype
    (int32 when positions fit) is the caller's choice, since the merge is
    bound by memory traffic.

    Returns (sorted positions, comparisons, bits, bit_start).
    """
    r = starts.shape[0] - 1
    total = left.shape[0]
    buf_start = np.zeros(total + 1, dtype=np.int64)
    for k in range(total):
        buf_start[k + 1] = buf_start[k] + sizes[k]
    key = np.empty(buf_start[total], dtype=values.dtype)
    for s in range(r):
        b = buf_start[s]
        for t in range(starts[s], starts[s + 1]):
            p = members[t]
            buf[b + t - starts[s]] = p
            key[b + t - starts[s]] = values[p]
    nbits = 0
    bit_start = np.zeros(max(r - 1, 0) + 1, dtype=np.int64)
    for k in range(r, total):
        bit_start[k - r] = nbits
        nbits += sizes[k]
    bit_start[max(r - 1, 0)] = nbits
    bits = np.zeros(nbits, dtype=np.uint8)
    cmp = 0
    for k in range(r, total):
        a = left[k]
        b = right[k]
        ia = buf_start[a]
        ea = ia + sizes[a]
        ib = buf_start[b]
        eb = ib + sizes[b]
        o = buf_start[k]
        bo = bit_start[k - r]
        while ia < ea and ib < eb:
            # branch-free step; keys travel with positions so reads stay sequential
            ka = key[ia]
            kb = key[ib]
            pa = buf[ia]
            pb = buf[ib]
            tb = (kb < ka) | ((kb == ka) & (pb < pa))
            buf[o] = pb if tb else pa
            key[o] = kb if tb else ka
            bits[bo] = tb
            ib += tb
            ia += 1 - tb
            o += 1
            bo += 1
            cmp += 1
        while ia < ea:
            buf[o] = buf[ia]
            key[o] = key[ia]
            ia += 1
            o += 1
            bo += 1
        while ib < eb:
            buf[o] = buf[ib]
            key[o] = key[ib]
            bits[bo] = 1
            ib += 1
            o += 1
            bo += 1
    if not with_bits:
        bits = bits[:0]
    root = total - 1
    out = buf[buf_start[root]:buf_start[root] + sizes[root]].astype(np.int64)
    return out, cmp, bits, bit_start


@njit(cache=True)
def forest_parens(label, nparts):
    """BP bits of the partition forest; parts must be numbered by first position.

    Returns (bits, ok); ok is False when two parts interleave without
    nesting, which cannot happen for an LRM-partition.
    """
    n = label.shape[0]
    last = np.full(nparts, -1, dtype=np.int64)
    for i in range(n):
        last[label[i]] = i
    bits = np.zeros(2 * (n + nparts), dtype=np.uint8)
    stack = np.empty(nparts + 1, dtype=np.int64)
    opened = np.zeros(nparts, dtype=np.uint8)
    top = 0
    pos = 0
    for i in range(n):
        s = label[i]
        if opened[s] == 0:
            while top > 0 and last[stack[top - 1]] < i:
                top -= 1
                pos += 1
            opened[s] = 1
            bits[pos] = 1
            pos += 1
            stack[top] = s
            top += 1
        else:
            while top > 0 and stack[top - 1] != s:
                if last[stack[top - 1]] > i:
                    return bits, False
                top -= 1
                pos += 1
            if top == 0:
                return bits, False
        bits[pos] = 1
        pos += 2
    return bits, True


@njit(cache=True)
def _samples(before, total, nbits_super, zeros, sample):
    """Superblock holding every sample-th one (or zero), closed by the last superblock."""
    nsuper = before.shape[0]
    m = (total + sample - 1) // sample
    out = np.empty(m + 1, dtype=np.int64)
    s = 0
    for j in range(m):
        k = j * sample + 1
        while s + 1 < nsuper:
            nxt = (s + 1) * nbits_super - before[s + 1] if zeros else before[s + 1]
            if nxt >= k:
                break
            s += 1
        out[j] = s
    out[m] = max(nsuper - 1, 0)
    return out


@njit(cache=True)
def bit_directory(counts, n, per_super, word_bits, sample):
    """Rank directory (superblock and word prefix counts) and select samples."""
    nw = counts.shape[0]
    nsuper = (nw + per_super - 1) // per_super
    sup = np.empty(nsuper, dtype=np.int64)
    blk = np.empty(nw, dtype=np.int64)
    run = 0
    for w in range(nw):
        if w % per_super == 0:
            sup[w // per_super] = run
        blk[w] = run - sup[w // per_super]
        run += counts[w]
    nbits_super = per_super * word_bits
    s1 = _samples(sup, run, nbits_super, False, sample)
    s0 = _samples(sup, n - run, nbits_super, True, sample)
    return sup, blk, s1, s0, run
