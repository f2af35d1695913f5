"""Exact and baseline solvers used to check the auction's output.

These share no code with the auction engine on purpose: they maximize
the original weights directly, with no pruning, scaling, or rounding.

Reported weights are correctly rounded sums (math.fsum) of the matched
original weights, so two oracles that find equally heavy matchings
report bit-identical totals regardless of summation order.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .graph import BipartiteGraph

BRUTE_FORCE_MAX_EDGES = 24


class InstanceTooLargeError(ValueError):
    """Raised when brute_force is asked to enumerate too many edges."""


@dataclass
class OracleResult:
    weight: float
    edges: np.ndarray  # original edge ids, ascending
    method: str

    def pairs(self, g: BipartiteGraph) -> list[tuple[int, int, float]]:
        return [
            (int(g.edge_bidder[e]), int(g.edge_object[e]),
             float(g.edge_weight[e]))
            for e in self.edges
        ]


def _canonical_weight(g: BipartiteGraph, edge_ids) -> float:
    return math.fsum(float(g.edge_weight[e]) for e in edge_ids)


def _heavy_first_order(g: BipartiteGraph) -> np.ndarray:
    # descending weight, ties by ascending edge id
    return np.lexsort((np.arange(g.m), -g.edge_weight))


@njit(cache=True)
def _brute_kernel(ei, ej, ew, cap_a, cap_b):
    # Depth-first take/skip search over edges in heavy-first order, with
    # an explicit stack.  Prunes a branch when even taking every
    # remaining edge cannot beat the best found so far.  Frame codes:
    # 0 visit, 1 restore the capacities edge k consumed.
    #
    # Running sums are kept in double-double form (hi + lo, exact for the
    # value ranges here) so candidate comparisons are order-independent:
    # rounded instances repeat identical weights across edges, producing
    # candidate sums that genuinely differ by one ulp, which plain
    # accumulation can rank the wrong way round.
    m = ew.shape[0]
    suffix = np.zeros(m + 1, dtype=np.float64)
    for k in range(m - 1, -1, -1):
        suffix[k] = suffix[k + 1] + ew[k]

    best_hi = 0.0
    best_lo = 0.0
    best_mask = np.int64(0)
    cap = 4 * m + 8
    st_k = np.empty(cap, dtype=np.int64)
    st_hi = np.zeros(cap, dtype=np.float64)
    st_lo = np.zeros(cap, dtype=np.float64)
    st_mask = np.zeros(cap, dtype=np.int64)
    st_code = np.empty(cap, dtype=np.int8)
    st_k[0] = 0
    st_code[0] = 0
    top = 1
    while top > 0:
        top -= 1
        k = st_k[top]
        code = st_code[top]
        if code == 1:
            cap_a[ei[k]] += 1
            cap_b[ej[k]] += 1
            continue
        hi = st_hi[top]
        lo = st_lo[top]
        mask = st_mask[top]
        if hi > best_hi or (hi == best_hi and lo > best_lo):
            best_hi = hi
            best_lo = lo
            best_mask = mask
        # the guard keeps the prune safe against the float error in
        # suffix[]; it only costs visiting a few near-tie branches
        guard = 1e-12 * (1.0 + best_hi)
        if k >= m or hi + suffix[k] + guard <= best_hi:
            continue
        # skip branch below, take branch on top so it is explored first
        st_k[top] = k + 1
        st_hi[top] = hi
        st_lo[top] = lo
        st_mask[top] = mask
        st_code[top] = 0
        top += 1
        if cap_a[ei[k]] > 0 and cap_b[ej[k]] > 0:
            cap_a[ei[k]] -= 1
            cap_b[ej[k]] -= 1
            st_k[top] = k
            st_code[top] = 1
            top += 1
            # two-sum of w onto (hi, lo), then renormalize
            w = ew[k]
            s = hi + w
            bv = s - hi
            err = (hi - (s - bv)) + (w - bv)
            nl = lo + err
            nh = s + nl
            nl = nl - (nh - s)
            st_k[top] = k + 1
            st_hi[top] = nh
            st_lo[top] = nl
            st_mask[top] = mask | (np.int64(1) << k)
            st_code[top] = 0
            top += 1
    return best_hi, best_mask


def brute_force(g: BipartiteGraph) -> OracleResult:
    """Exact optimum by enumerating feasible edge subsets.

    Only for small instances; refuses anything over
    BRUTE_FORCE_MAX_EDGES edges.
    """
    if g.m > BRUTE_FORCE_MAX_EDGES:
        raise InstanceTooLargeError(
            f"brute_force enumerates subsets of at most "
            f"{BRUTE_FORCE_MAX_EDGES} edges, got m={g.m}"
        )
    if g.m == 0:
        return OracleResult(0.0, np.empty(0, dtype=np.int64), "brute")
    order = _heavy_first_order(g)
    _, mask = _brute_kernel(
        g.edge_bidder[order], g.edge_object[order], g.edge_weight[order],
        g.b_a.copy(), g.b_b.copy(),
    )
    ids = sorted(int(order[k]) for k in range(g.m) if (int(mask) >> k) & 1)
    ids = np.asarray(ids, dtype=np.int64)
    return OracleResult(_canonical_weight(g, ids), ids, "brute")


def greedy_half(g: BipartiteGraph) -> OracleResult:
    """Heavy-first greedy; guarantees at least half the optimum.

    Scans edges by descending weight (ties by edge id) and takes an edge
    whenever both endpoints still have spare capacity.
    """
    rem_a = g.b_a.copy()
    rem_b = g.b_b.copy()
    taken = []
    for e in _heavy_first_order(g):
        i = int(g.edge_bidder[e])
        j = int(g.edge_object[e])
        if rem_a[i] > 0 and rem_b[j] > 0:
            rem_a[i] -= 1
            rem_b[j] -= 1
            taken.append(int(e))
    taken.sort()
    ids = np.asarray(taken, dtype=np.int64)
    return OracleResult(_canonical_weight(g, ids), ids, "greedy")


def flow_exact(g: BipartiteGraph) -> OracleResult:
    """Exact optimum via successive heaviest augmenting paths.

    Unit-capacity matching arcs sit between a source tier (capacity
    b(i)) and a sink tier (capacity b(j)).  Each round finds the maximum
    weight residual source-sink path with Dijkstra over reduced costs,
    Johnson potentials keeping them nonnegative, and augments one unit;
    path gains never increase, so the first nonpositive gain is the stop
    signal.
    """
    n_a, n_b, m = g.n_a, g.n_b, g.m
    if m == 0:
        return OracleResult(0.0, np.empty(0, dtype=np.int64), "flow")
    n = n_a + n_b + 2
    src = 0
    snk = n - 1

    arc_to: list[int] = []
    arc_cap: list[int] = []
    arc_cost: list[float] = []
    adj: list[list[int]] = [[] for _ in range(n)]

    def add_arc(u: int, v: int, cap: int, cost: float) -> int:
        a = len(arc_to)
        arc_to.append(v)
        arc_cap.append(cap)
        arc_cost.append(cost)
        adj[u].append(a)
        arc_to.append(u)
        arc_cap.append(0)
        arc_cost.append(-cost)
        adj[v].append(a + 1)
        return a

    for i in range(n_a):
        if g.b_a[i] > 0:
            add_arc(src, 1 + i, int(g.b_a[i]), 0.0)
    edge_arc = np.empty(m, dtype=np.int64)
    for e in range(m):
        edge_arc[e] = add_arc(
            1 + int(g.edge_bidder[e]),
            1 + n_a + int(g.edge_object[e]),
            1,
            -float(g.edge_weight[e]),
        )
    for j in range(n_b):
        if g.b_b[j] > 0:
            add_arc(1 + n_a + j, snk, int(g.b_b[j]), 0.0)

    w_max = float(g.edge_weight.max())
    gain_floor = 1e-12 * max(1.0, w_max)
    # potentials that make all initial reduced costs nonnegative
    phi = [0.0] * n
    phi[src] = w_max
    for i in range(n_a):
        phi[1 + i] = w_max

    inf = math.inf
    while True:
        dist = [inf] * n
        prev = [-1] * n
        dist[src] = 0.0
        heap = [(0.0, src)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            for a in adj[u]:
                if arc_cap[a] <= 0:
                    continue
                v = arc_to[a]
                rc = arc_cost[a] + phi[u] - phi[v]
                if rc < 0.0:
                    rc = 0.0
                nd = d + rc
                if nd < dist[v]:
                    dist[v] = nd
                    prev[v] = a
                    heapq.heappush(heap, (nd, v))
        if dist[snk] == inf:
            break
        gain = phi[src] - phi[snk] - dist[snk]
        if gain <= gain_floor:
            break
        # bottleneck and augmentation along the path
        bott = None
        v = snk
        while v != src:
            a = prev[v]
            bott = arc_cap[a] if bott is None else min(bott, arc_cap[a])
            v = arc_to[a ^ 1]
        v = snk
        while v != src:
            a = prev[v]
            arc_cap[a] -= bott
            arc_cap[a ^ 1] += bott
            v = arc_to[a ^ 1]
        dt = dist[snk]
        for v in range(n):
            phi[v] += min(dist[v], dt)

    ids = np.nonzero(np.asarray([arc_cap[a] == 0 for a in edge_arc]))[0]
    ids = ids.astype(np.int64)
    return OracleResult(_canonical_weight(g, ids), ids, "flow")
