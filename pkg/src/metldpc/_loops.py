"""Compiled flooding-schedule loops over the CSR edge layout of a code.

Edge ``e`` of check ``j`` lives at ``cn_ptr[j] <= e < cn_ptr[j + 1]``;
``vn_edges[vn_ptr[v]:vn_ptr[v + 1]]`` lists the edges of variable ``v``.
"""

import math

import numpy as np
from numba import njit

LLR_MAX = 38.0


@njit(cache=True, inline="always")
def _clip(x, lim):
    if x > lim:
        return lim
    if x < -lim:
        return -lim
    return x


@njit(cache=True, inline="always")
def _box_plus(a, b):
    sa = -1.0 if a < 0.0 else 1.0
    sb = -1.0 if b < 0.0 else 1.0
    ba = abs(a)
    bb = abs(b)
    mn = ba if ba < bb else bb
    s = math.log1p(math.exp(-(ba + bb))) - math.log1p(math.exp(-abs(ba - bb)))
    return sa * sb * (mn + s)


@njit(cache=True)
def vn_update(llr, c2v, vn_ptr, vn_edges, v2c, post):
    for v in range(len(vn_ptr) - 1):
        total = llr[v]
        for k in range(vn_ptr[v], vn_ptr[v + 1]):
            total += c2v[vn_edges[k]]
        for k in range(vn_ptr[v], vn_ptr[v + 1]):
            e = vn_edges[k]
            v2c[e] = _clip(total - c2v[e], LLR_MAX)
        post[v] = _clip(total, LLR_MAX)


@njit(cache=True)
def init_v2c(llr, edge_vn, v2c):
    for e in range(len(edge_vn)):
        v2c[e] = _clip(llr[edge_vn[e]], LLR_MAX)


@njit(cache=True)
def hard_decision(post, hard):
    """Bit 1 for negative posteriors; returns the number of zero posteriors."""
    zeros = 0
    for v in range(len(post)):
        hard[v] = 1 if post[v] < 0.0 else 0
        if post[v] == 0.0:
            zeros += 1
    return zeros


@njit(cache=True)
def unsatisfied_checks(hard, cn_ptr, edge_vn):
    bad = 0
    for j in range(len(cn_ptr) - 1):
        p = 0
        for e in range(cn_ptr[j], cn_ptr[j + 1]):
            p ^= hard[edge_vn[e]]
        bad += p
    return bad


@njit(cache=True)
def cn_spa(v2c, cn_ptr, c2v, fwd, bwd):
    """Exact box-plus check update by forward-backward recursion."""
    for j in range(len(cn_ptr) - 1):
        lo = cn_ptr[j]
        d = cn_ptr[j + 1] - lo
        if d == 0:
            continue
        if d == 1:
            c2v[lo] = 0.0
            continue
        fwd[0] = v2c[lo]
        for k in range(1, d - 1):
            fwd[k] = _box_plus(fwd[k - 1], v2c[lo + k])
        bwd[d - 1] = v2c[lo + d - 1]
        for k in range(d - 2, 0, -1):
            bwd[k] = _box_plus(bwd[k + 1], v2c[lo + k])
        c2v[lo] = bwd[1]
        c2v[lo + d - 1] = fwd[d - 2]
        for i in range(1, d - 1):
            c2v[lo + i] = _box_plus(fwd[i - 1], bwd[i + 1])


@njit(cache=True)
def cn_min_sum(v2c, cn_ptr, c2v, factor):
    for j in range(len(cn_ptr) - 1):
        lo = cn_ptr[j]
        hi = cn_ptr[j + 1]
        d = hi - lo
        if d == 0:
            continue
        if d == 1:
            c2v[lo] = 0.0
            continue
        sprod = 1.0
        min1 = np.inf
        min2 = np.inf
        idx1 = -1
        for e in range(lo, hi):
            x = v2c[e]
            if x < 0.0:
                sprod = -sprod
            b = abs(x)
            if b < min1:
                min2 = min1
                min1 = b
                idx1 = e
            elif b < min2:
                min2 = b
        for e in range(lo, hi):
            s = -sprod if v2c[e] < 0.0 else sprod
            mag = min2 if e == idx1 else min1
            c2v[e] = s * factor * mag


@njit(cache=True)
def cn_id_min_sum(v2c, cn_ptr, edge_tidx, row_of_type, cluster_rows, midpoints, c2v):
    """Min-sum with a LUT scaling indexed by the second-smallest magnitude.

    ``row_of_type[i]`` is the LUT centroid row for edge type ``i`` at the
    current iteration. Returns the number of table lookups performed.
    """
    lookups = 0
    for j in range(len(cn_ptr) - 1):
        lo = cn_ptr[j]
        hi = cn_ptr[j + 1]
        d = hi - lo
        if d == 0:
            continue
        if d == 1:
            c2v[lo] = 0.0
            continue
        sprod = 1.0
        m1 = np.inf
        m2 = np.inf
        m3 = np.inf
        i1 = -1
        i2 = -1
        for e in range(lo, hi):
            x = v2c[e]
            if x < 0.0:
                sprod = -sprod
            b = abs(x)
            # strict comparisons keep the lowest index first among ties
            if b < m1:
                m3 = m2
                m2 = m1
                i2 = i1
                m1 = b
                i1 = e
            elif b < m2:
                m3 = m2
                m2 = b
                i2 = e
            elif b < m3:
                m3 = b
        for e in range(lo, hi):
            s = -sprod if v2c[e] < 0.0 else sprod
            if e == i1:
                bm = m2
                bm2 = m3
            elif e == i2:
                bm = m1
                bm2 = m3
            else:
                bm = m1
                bm2 = m2
            if d == 2:
                c2v[e] = s * bm
                continue
            q = np.searchsorted(midpoints, bm2)
            c2v[e] = s * bm * cluster_rows[row_of_type[edge_tidx[e]], q]
            lookups += 1
    return lookups
