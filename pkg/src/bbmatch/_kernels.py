"""Compiled inner loops for the auction engine.

Everything here operates on flat arrays so numba can compile it; the
wrapper objects live in :mod:`bbmatch.auction`.  Edge indices in this
module refer to positions in the kept-edge arrays of a preprocessed
instance, not to original edge ids.

Counter/meta slots shared between kernels and wrappers:
0 pops, 1 bids (price updates), 2 outbids (evictions), 3 nonpositive
bids observed, 4 active-stack top.
"""

from __future__ import annotations

import numpy as np
from numba import njit

POPS = 0
BIDS = 1
OUTBIDS = 2
NONPOS = 3
TOP = 4
N_META = 5


@njit(cache=True, inline="always")
def _copy_less(copy_price, a, b):
    pa = copy_price[a]
    pb = copy_price[b]
    return pa < pb or (pa == pb and a < b)


@njit(cache=True)
def _sift_down(copy_price, heap_copy, heap_pos, lo, hi, pos):
    # binary min-heap over copies of one object, keyed (price, copy id),
    # stored in the slot range [lo, hi)
    while True:
        left = lo + 2 * (pos - lo) + 1
        small = pos
        if left < hi and _copy_less(copy_price, heap_copy[left], heap_copy[small]):
            small = left
        right = left + 1
        if right < hi and _copy_less(copy_price, heap_copy[right], heap_copy[small]):
            small = right
        if small == pos:
            return
        ca = heap_copy[pos]
        cb = heap_copy[small]
        heap_copy[pos] = cb
        heap_copy[small] = ca
        heap_pos[cb] = pos
        heap_pos[ca] = small
        pos = small


@njit(cache=True)
def build_queues(ke_bidder, ke_rexp, s_min, s_max, n_a):
    """Per-bidder pop sequences, non-increasing in r.

    Each kept edge contributes entries at r, r-1, ..., r-s_min.  Two
    stable counting-sort passes reproduce the bucket construction: first
    bucket all entries by descending r (edge order inside a bucket),
    then sweep the buckets once, appending to per-bidder segments.

    Returns (q_start, q_edge, q_r): segment offsets per bidder plus the
    entry arrays.
    """
    mk = ke_rexp.shape[0]
    span = s_min + 1
    n_entries = mk * span
    n_buckets = s_max + s_min + 1

    counts = np.zeros(n_buckets + 1, dtype=np.int64)
    for e in range(mk):
        b0 = s_max - ke_rexp[e]
        for k in range(span):
            counts[b0 + k + 1] += 1
    for b in range(n_buckets):
        counts[b + 1] += counts[b]

    fill = counts[:n_buckets].copy()
    bucket_edge = np.empty(n_entries, dtype=np.int32)
    for e in range(mk):
        b0 = s_max - ke_rexp[e]
        for k in range(span):
            pos = fill[b0 + k]
            bucket_edge[pos] = e
            fill[b0 + k] = pos + 1

    q_start = np.zeros(n_a + 1, dtype=np.int64)
    for e in range(mk):
        q_start[ke_bidder[e] + 1] += span
    for i in range(n_a):
        q_start[i + 1] += q_start[i]

    qfill = q_start[:n_a].copy()
    q_edge = np.empty(n_entries, dtype=np.int32)
    q_r = np.empty(n_entries, dtype=np.int32)
    pos = 0
    for b in range(n_buckets):
        r = s_max - b
        hi = counts[b + 1]
        while pos < hi:
            e = bucket_edge[pos]
            i = ke_bidder[e]
            p = qfill[i]
            q_edge[p] = e
            q_r[p] = r
            qfill[i] = p + 1
            pos += 1
    return q_start, q_edge, q_r


@njit(cache=True, inline="always")
def _push_active(stack, in_i, meta, y):
    if not in_i[y]:
        in_i[y] = True
        stack[meta[TOP]] = y
        meta[TOP] += 1


@njit(cache=True)
def match_copy(e, c, ke_bidder, matched_copy, fcount, copy_owner,
               q_start, q_cursor, stack, in_i, meta):
    """Assign copy c to the bidder of kept edge e, evicting any owner.

    An evicted bidder goes back on the active stack only if its queue
    still has entries to pop; with an exhausted queue it stays out for
    good.  The previous owner is never the bidder of e itself: a bidder
    reaches this point only for an object it holds no copy of.
    """
    oe = copy_owner[c]
    if oe >= 0:
        y = ke_bidder[oe]
        matched_copy[oe] = -1
        fcount[y] -= 1
        meta[OUTBIDS] += 1
        if q_cursor[y] < q_start[y + 1]:
            _push_active(stack, in_i, meta, y)
    copy_owner[c] = e
    matched_copy[e] = c
    fcount[ke_bidder[e]] += 1


@njit(cache=True)
def _check_utility_bound(i, r_i, ke_object, ke_rexp, ke_wt, copy_off,
                         copy_price, matched_copy, table, toff, s_min,
                         kadj_off, kadj_edge):
    # Debug-only invariant: for every unmatched neighbor copy, the
    # utility stays strictly below the larger of table(r_i + 1) and the
    # edge's own last threshold table(r_edge - s_min).
    cap = table[r_i + 1 + toff]
    for p in range(kadj_off[i], kadj_off[i + 1]):
        e = kadj_edge[p]
        if matched_copy[e] >= 0:
            continue
        alt = table[ke_rexp[e] - s_min + toff]
        bound = cap if cap > alt else alt
        j = ke_object[e]
        for c in range(copy_off[j], copy_off[j + 1]):
            if ke_wt[e] - copy_price[c] >= bound:
                raise AssertionError(
                    "utility upper bound invariant violated"
                )


@njit(cache=True)
def assign_and_bid(i, ke_bidder, ke_object, ke_rexp, ke_wt,
                   table, toff, one_minus_eps, s_min,
                   q_edge, q_r, q_start, q_cursor,
                   copy_off, copy_price, copy_owner, heap_copy, heap_pos,
                   matched_copy, fcount, b_a, r_final,
                   stack, in_i, meta,
                   t_edge, t_copy, in_t,
                   kadj_off, kadj_edge, debug):
    """One auction round for bidder i: pop, match, then raise prices.

    Entries are consumed until the queue runs dry or the bidder is
    saturated.  A popped pair whose utility clears the entry threshold
    is matched (or refreshed, if the edge is already matched) and its
    copy is recorded; everything recorded gets one price update at the
    end, computed against the final popped exponent.
    """
    tn = 0
    cur = q_cursor[i]
    end = q_start[i + 1]
    cap = b_a[i]
    while cur < end and fcount[i] < cap:
        e = q_edge[cur]
        r = q_r[cur]
        cur += 1
        meta[POPS] += 1
        r_final[i] = r
        if debug:
            _check_utility_bound(i, r, ke_object, ke_rexp, ke_wt, copy_off,
                                 copy_price, matched_copy, table, toff,
                                 s_min, kadj_off, kadj_edge)
        j = ke_object[e]
        threshold = table[r + toff]
        c = matched_copy[e]
        if c >= 0:
            # already holds this object through e: refresh the bid if
            # the pair still clears the current threshold
            if ke_wt[e] - copy_price[c] >= threshold and not in_t[c]:
                if tn >= t_edge.shape[0]:
                    raise AssertionError("bid buffer overflow")
                in_t[c] = True
                t_edge[tn] = e
                t_copy[tn] = c
                tn += 1
        else:
            c = heap_copy[copy_off[j]]
            if ke_wt[e] - copy_price[c] >= threshold:
                match_copy(e, c, ke_bidder, matched_copy, fcount, copy_owner,
                           q_start, q_cursor, stack, in_i, meta)
                if not in_t[c]:
                    if tn >= t_edge.shape[0]:
                        raise AssertionError("bid buffer overflow")
                    in_t[c] = True
                    t_edge[tn] = e
                    t_copy[tn] = c
                    tn += 1
    q_cursor[i] = cur
    if tn > 0:
        bid_floor = one_minus_eps * table[r_final[i] + 1 + toff]
        for k in range(tn):
            e = t_edge[k]
            c = t_copy[k]
            gamma = ke_wt[e] - copy_price[c] - bid_floor
            if gamma <= 0.0:
                meta[NONPOS] += 1
                if debug:
                    raise AssertionError("nonpositive bid")
            copy_price[c] += gamma
            j = ke_object[e]
            _sift_down(copy_price, heap_copy, heap_pos,
                       copy_off[j], copy_off[j + 1], heap_pos[c])
            in_t[c] = False
            meta[BIDS] += 1


@njit(cache=True)
def auction_loop(ke_bidder, ke_object, ke_rexp, ke_wt,
                 table, toff, one_minus_eps, s_min,
                 q_edge, q_r, q_start, q_cursor,
                 copy_off, copy_price, copy_owner, heap_copy, heap_pos,
                 matched_copy, fcount, b_a, r_final,
                 stack, in_i, meta,
                 t_edge, t_copy, in_t,
                 kadj_off, kadj_edge, debug):
    while meta[TOP] > 0:
        meta[TOP] -= 1
        i = stack[meta[TOP]]
        in_i[i] = False
        assign_and_bid(i, ke_bidder, ke_object, ke_rexp, ke_wt,
                       table, toff, one_minus_eps, s_min,
                       q_edge, q_r, q_start, q_cursor,
                       copy_off, copy_price, copy_owner, heap_copy, heap_pos,
                       matched_copy, fcount, b_a, r_final,
                       stack, in_i, meta,
                       t_edge, t_copy, in_t,
                       kadj_off, kadj_edge, debug)
