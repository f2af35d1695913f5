"""Multiplicative auction for approximate maximum weight b-matching.

Objects are split into one copy per capacity unit, each with its own
price.  Every bidder works through a precomputed queue of (threshold
exponent, edge) pairs in non-increasing exponent order; a popped pair
whose rounded weight minus the cheapest copy price clears the threshold
(1 + eps)^r is matched, possibly evicting the previous owner, and the
bidder then raises the prices of everything it touched so that losing
any of it later costs the next bidder a real increment.

Prices only ever increase, each queue is consumed at most once, and an
evicted bidder re-enters the active stack only while its queue has
entries left, which bounds total work by the queue length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .graph import BipartiteGraph
from .scaling import ScaledInstance


@dataclass
class Counters:
    pops: int = 0
    bids: int = 0
    outbids: int = 0
    nonpos_bids: int = 0


class AuctionState:
    """Mutable engine state; create with :func:`initialize`.

    Exposes single-step operations (:meth:`pop_active`,
    :meth:`assign_and_bid`, :meth:`match`) so invariants can be checked
    between rounds; :func:`run` drives the same compiled kernels without
    returning to Python in between.
    """

    def __init__(self, instance: ScaledInstance, graph: BipartiteGraph,
                 debug: bool = False):
        self.graph = graph
        self.instance = instance
        self.debug = debug
        g = graph
        s = instance
        mk = s.n_kept

        self.ke_bidder = g.edge_bidder[s.kept_ids].astype(np.int64)
        self.ke_object = g.edge_object[s.kept_ids].astype(np.int64)
        self.ke_rexp = s.r_exp.astype(np.int64)
        self.ke_wt = s.w_tilde.astype(np.float64)

        self.q_start, self.q_edge, self.q_r = K.build_queues(
            self.ke_bidder, self.ke_rexp, s.s_min, s.s_max, g.n_a
        )
        self.q_cursor = self.q_start[:-1].copy()

        # object copies, one price and one heap slot per capacity unit
        self.copy_off = np.zeros(g.n_b + 1, dtype=np.int64)
        np.cumsum(g.b_b, out=self.copy_off[1:])
        n_copies = int(self.copy_off[-1])
        self.copy_price = np.zeros(n_copies, dtype=np.float64)
        self.copy_owner = np.full(n_copies, -1, dtype=np.int64)
        # all prices zero: identity layout is a valid heap with the
        # lowest copy id at each root
        self.heap_copy = np.arange(n_copies, dtype=np.int64)
        self.heap_pos = np.arange(n_copies, dtype=np.int64)

        self.matched_copy = np.full(mk, -1, dtype=np.int64)
        self.fcount = np.zeros(g.n_a, dtype=np.int64)
        self.b_a = g.b_a.astype(np.int64)

        # active stack seeded in reverse so bidder 0 pops first
        self.stack = np.arange(g.n_a - 1, -1, -1, dtype=np.int64)
        self.in_i = np.ones(g.n_a, dtype=np.bool_)
        self.meta = np.zeros(K.N_META, dtype=np.int64)
        self.meta[K.TOP] = g.n_a

        self.r_final = np.zeros(g.n_a, dtype=np.int64)
        if mk:
            np.maximum.at(self.r_final, self.ke_bidder, self.ke_rexp)

        width = max(int(g.max_b), 1)
        self.t_edge = np.empty(width + 1, dtype=np.int64)
        self.t_copy = np.empty(width + 1, dtype=np.int64)
        self.in_t = np.zeros(n_copies, dtype=np.bool_)

        # kept-edge adjacency per bidder, for the certifier and the
        # debug-mode utility bound check
        order = np.argsort(self.ke_bidder, kind="stable").astype(np.int64)
        self.kadj_edge = order
        self.kadj_off = np.zeros(g.n_a + 1, dtype=np.int64)
        np.cumsum(np.bincount(self.ke_bidder, minlength=g.n_a),
                  out=self.kadj_off[1:])

    # -- single-step interface ------------------------------------------

    def pop_active(self) -> int | None:
        """Take the most recently activated bidder, or None when done."""
        if self.meta[K.TOP] == 0:
            return None
        self.meta[K.TOP] -= 1
        i = int(self.stack[self.meta[K.TOP]])
        self.in_i[i] = False
        return i

    def assign_and_bid(self, i: int) -> None:
        """Run one auction round for bidder i (already off the stack)."""
        s = self.instance
        K.assign_and_bid(
            i, self.ke_bidder, self.ke_object, self.ke_rexp, self.ke_wt,
            s.power_table, s.table_offset, 1.0 - s.eps, s.s_min,
            self.q_edge, self.q_r, self.q_start, self.q_cursor,
            self.copy_off, self.copy_price, self.copy_owner,
            self.heap_copy, self.heap_pos,
            self.matched_copy, self.fcount, self.b_a, self.r_final,
            self.stack, self.in_i, self.meta,
            self.t_edge, self.t_copy, self.in_t,
            self.kadj_off, self.kadj_edge, self.debug,
        )

    def match(self, i: int, j: int, c: int) -> None:
        """Assign copy c of object j to bidder i along their kept edge.

        Same semantics as a match made inside :meth:`assign_and_bid`:
        the previous owner, if any, is evicted and re-enters the active
        stack only while its queue is non-exhausted.
        """
        s = self.instance
        g = self.graph
        e = -1
        for eid in g.bidder_edges(i):
            if int(g.edge_object[eid]) == j:
                e = int(s.kept_pos[eid])
                break
        if e < 0:
            raise ValueError(f"no kept edge between bidder {i} and object {j}")
        if self.matched_copy[e] >= 0:
            raise ValueError(f"edge ({i}, {j}) is already matched")
        lo = int(self.copy_off[j])
        hi = int(self.copy_off[j + 1])
        if not (0 <= c < hi - lo):
            raise ValueError(f"object {j} has no copy {c}")
        K.match_copy(e, lo + c, self.ke_bidder, self.matched_copy,
                     self.fcount, self.copy_owner,
                     self.q_start, self.q_cursor,
                     self.stack, self.in_i, self.meta)

    def run_to_completion(self) -> None:
        s = self.instance
        K.auction_loop(
            self.ke_bidder, self.ke_object, self.ke_rexp, self.ke_wt,
            s.power_table, s.table_offset, 1.0 - s.eps, s.s_min,
            self.q_edge, self.q_r, self.q_start, self.q_cursor,
            self.copy_off, self.copy_price, self.copy_owner,
            self.heap_copy, self.heap_pos,
            self.matched_copy, self.fcount, self.b_a, self.r_final,
            self.stack, self.in_i, self.meta,
            self.t_edge, self.t_copy, self.in_t,
            self.kadj_off, self.kadj_edge, self.debug,
        )

    # -- inspection ------------------------------------------------------

    @property
    def counters(self) -> Counters:
        return Counters(
            pops=int(self.meta[K.POPS]),
            bids=int(self.meta[K.BIDS]),
            outbids=int(self.meta[K.OUTBIDS]),
            nonpos_bids=int(self.meta[K.NONPOS]),
        )

    def queue_view(self, i: int) -> list[tuple[int, int]]:
        """Remaining (r, original edge id) entries for bidder i."""
        s = self.instance
        lo = int(self.q_cursor[i])
        hi = int(self.q_start[i + 1])
        return [
            (int(self.q_r[p]), int(s.kept_ids[self.q_edge[p]]))
            for p in range(lo, hi)
        ]

    def result(self) -> AuctionResult:
        """Snapshot of the matching, prices, and counters."""
        return AuctionResult(
            graph=self.graph,
            instance=self.instance,
            matched_copy=self.matched_copy.copy(),
            copy_off=self.copy_off.copy(),
            copy_price=self.copy_price.copy(),
            copy_owner=self.copy_owner.copy(),
            r_final=self.r_final.copy(),
            kadj_off=self.kadj_off,
            kadj_edge=self.kadj_edge,
            counters=self.counters,
        )


@dataclass
class AuctionResult:
    """Matching plus the price state and counters that certify it."""

    graph: BipartiteGraph
    instance: ScaledInstance
    matched_copy: np.ndarray  # kept-edge index -> global copy id or -1
    copy_off: np.ndarray
    copy_price: np.ndarray
    copy_owner: np.ndarray  # global copy id -> kept-edge index or -1
    r_final: np.ndarray
    kadj_off: np.ndarray
    kadj_edge: np.ndarray
    counters: Counters

    @property
    def matched_kept(self) -> np.ndarray:
        """Kept-edge indices of matched edges, ascending."""
        return np.nonzero(self.matched_copy >= 0)[0].astype(np.int64)

    @property
    def matched_edges(self) -> np.ndarray:
        """Original edge ids of matched edges, ascending."""
        return self.instance.kept_ids[self.matched_kept]

    def matching_pairs(self) -> list[tuple[int, int, float]]:
        g = self.graph
        return [
            (int(g.edge_bidder[e]), int(g.edge_object[e]),
             float(g.edge_weight[e]))
            for e in self.matched_edges
        ]

    def weight(self) -> float:
        """Matching weight under the original edge weights."""
        g = self.graph
        return math.fsum(float(g.edge_weight[e]) for e in self.matched_edges)

    def weight_rounded(self) -> float:
        """Matching weight under the rounded (table power) weights."""
        s = self.instance
        return math.fsum(float(s.w_tilde[e]) for e in self.matched_kept)

    def min_price(self, j: int) -> float:
        """Cheapest copy price of object j (0.0 if it has no copies)."""
        lo = int(self.copy_off[j])
        hi = int(self.copy_off[j + 1])
        if lo == hi:
            return 0.0
        return float(self.copy_price[lo:hi].min())


def initialize(instance: ScaledInstance, graph: BipartiteGraph,
               debug: bool = False) -> AuctionState:
    """Build queues, copies, and the active stack for a fresh auction."""
    return AuctionState(instance, graph, debug=debug)


def run(instance: ScaledInstance, graph: BipartiteGraph,
        debug: bool = False) -> AuctionResult:
    """Run the auction to completion and return the result snapshot."""
    st = initialize(instance, graph, debug=debug)
    st.run_to_completion()
    return st.result()
