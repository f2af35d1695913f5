"""Weighted bipartite graphs with per-vertex capacities.

A graph holds two vertex sides, "bidders" (side A) and "objects" (side B),
a list of weighted edges between them, and one capacity b(v) per vertex.
A b-matching may use a vertex v in at most b(v) of its matched edges.

Vertices are 0-based everywhere in this package; the on-disk formats in
:mod:`bbmatch.fileio` are 1-based and convert at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    """Raised when graph construction input is malformed."""


@dataclass(frozen=True)
class BipartiteGraph:
    """Immutable bipartite instance.

    Edges keep their input position as their identity: edge e is the e-th
    triple passed to :func:`build_graph`.  All derived structure (degrees,
    adjacency, effective capacities) is computed once at build time.
    """

    n_a: int
    n_b: int
    edge_bidder: np.ndarray  # int64, shape (m,)
    edge_object: np.ndarray  # int64, shape (m,)
    edge_weight: np.ndarray  # float64, shape (m,)
    b_a: np.ndarray  # int64, effective capacity per bidder (post clamp)
    b_b: np.ndarray  # int64, effective capacity per object
    deg_a: np.ndarray  # int64, degree per bidder
    deg_b: np.ndarray  # int64, degree per object
    # CSR adjacency: edge ids grouped by endpoint, ascending edge id inside
    # each group.
    adj_a_off: np.ndarray = field(repr=False, default=None)
    adj_a_edge: np.ndarray = field(repr=False, default=None)
    adj_b_off: np.ndarray = field(repr=False, default=None)
    adj_b_edge: np.ndarray = field(repr=False, default=None)
    clamped: int = 0  # how many requested capacities were reduced

    @property
    def m(self) -> int:
        return int(self.edge_weight.shape[0])

    @property
    def max_degree(self) -> int:
        if self.n_a + self.n_b == 0:
            return 0
        da = int(self.deg_a.max()) if self.n_a else 0
        db = int(self.deg_b.max()) if self.n_b else 0
        return max(da, db)

    @property
    def max_b(self) -> int:
        if self.n_a + self.n_b == 0:
            return 0
        ba = int(self.b_a.max()) if self.n_a else 0
        bb = int(self.b_b.max()) if self.n_b else 0
        return max(ba, bb)

    @property
    def b_total(self) -> int:
        return int(self.b_a.sum()) + int(self.b_b.sum())

    def bidder_edges(self, i: int) -> np.ndarray:
        """Edge ids incident to bidder i, ascending."""
        return self.adj_a_edge[self.adj_a_off[i]:self.adj_a_off[i + 1]]

    def object_edges(self, j: int) -> np.ndarray:
        """Edge ids incident to object j, ascending."""
        return self.adj_b_edge[self.adj_b_off[j]:self.adj_b_off[j + 1]]

    def bidder_adjacency(self, i: int) -> list[tuple[int, int]]:
        """(object, edge id) pairs for bidder i."""
        es = self.bidder_edges(i)
        return [(int(self.edge_object[e]), int(e)) for e in es]

    def object_adjacency(self, j: int) -> list[tuple[int, int]]:
        """(bidder, edge id) pairs for object j."""
        es = self.object_edges(j)
        return [(int(self.edge_bidder[e]), int(e)) for e in es]

    def edge_tuples(self) -> list[tuple[int, int, float]]:
        return [
            (int(i), int(j), float(w))
            for i, j, w in zip(self.edge_bidder, self.edge_object, self.edge_weight)
        ]


def _as_capacity_array(b, n: int, side: str) -> np.ndarray:
    if isinstance(b, (int, np.integer)):
        arr = np.full(n, int(b), dtype=np.int64)
    else:
        arr = np.asarray(b, dtype=np.int64)
        if arr.shape != (n,):
            raise GraphError(
                f"capacity list for side {side} has length {arr.shape}, expected {n}"
            )
        arr = arr.copy()
    return arr


def _normalize_edges(edges) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # Accept a list of (i, j, w) triples, an (m, 3) array, or a triple of
    # parallel arrays (bidders, objects, weights).
    if isinstance(edges, tuple) and len(edges) == 3 and all(
        isinstance(x, np.ndarray) for x in edges
    ):
        ei = np.asarray(edges[0], dtype=np.int64)
        ej = np.asarray(edges[1], dtype=np.int64)
        ew = np.asarray(edges[2], dtype=np.float64)
        if not (ei.shape == ej.shape == ew.shape) or ei.ndim != 1:
            raise GraphError("edge arrays must be one-dimensional and equal length")
        return ei.copy(), ej.copy(), ew.copy()
    rows = list(edges)
    m = len(rows)
    ei = np.empty(m, dtype=np.int64)
    ej = np.empty(m, dtype=np.int64)
    ew = np.empty(m, dtype=np.float64)
    for e, row in enumerate(rows):
        if len(row) != 3:
            raise GraphError(f"edge {e} is not an (i, j, w) triple: {row!r}")
        ei[e] = int(row[0])
        ej[e] = int(row[1])
        ew[e] = float(row[2])
    return ei, ej, ew


def _csr(endpoint: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    off = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(endpoint, minlength=n), out=off[1:])
    order = np.argsort(endpoint, kind="stable").astype(np.int64)
    return off, order


def build_graph(n_a: int, n_b: int, edges, b_a=1, b_b=1) -> BipartiteGraph:
    """Validate input and construct an immutable bipartite instance.

    Parameters
    ----------
    n_a, n_b
        Number of bidders and of objects (each >= 0).
    edges
        Weighted edges as (bidder, object, weight) triples with 0-based
        indices, or a triple of parallel numpy arrays.  The position in
        this sequence becomes the edge id.
    b_a, b_b
        Requested capacity per bidder / per object; a single int is
        broadcast to the whole side.  Every requested capacity must be
        >= 1.  Effective capacities are clamped to the vertex degree, so
        isolated vertices end up with b = 0.

    Raises
    ------
    GraphError
        On a duplicate edge, an endpoint out of range, a negative or
        non-finite weight, or a non-positive requested capacity.  The
        message names the offending edge or vertex.
    """
    if n_a < 0 or n_b < 0:
        raise GraphError(f"vertex counts must be nonnegative, got ({n_a}, {n_b})")
    n_a = int(n_a)
    n_b = int(n_b)
    ei, ej, ew = _normalize_edges(edges)
    m = ei.shape[0]

    if m:
        bad = np.nonzero((ei < 0) | (ei >= n_a))[0]
        if bad.size:
            e = int(bad[0])
            raise GraphError(
                f"edge {e}: bidder index {int(ei[e])} out of range [0, {n_a})"
            )
        bad = np.nonzero((ej < 0) | (ej >= n_b))[0]
        if bad.size:
            e = int(bad[0])
            raise GraphError(
                f"edge {e}: object index {int(ej[e])} out of range [0, {n_b})"
            )
        bad = np.nonzero(~np.isfinite(ew) | (ew < 0))[0]
        if bad.size:
            e = int(bad[0])
            raise GraphError(f"edge {e}: weight {ew[e]!r} is negative or not finite")
        key = ei * n_b + ej
        order = np.argsort(key, kind="stable")
        dup = np.nonzero(np.diff(key[order]) == 0)[0]
        if dup.size:
            e = int(order[dup[0] + 1])
            raise GraphError(
                f"edge {e}: duplicate of edge ({int(ei[e])}, {int(ej[e])})"
            )

    req_a = _as_capacity_array(b_a, n_a, "A")
    req_b = _as_capacity_array(b_b, n_b, "B")
    bad = np.nonzero(req_a < 1)[0]
    if bad.size:
        v = int(bad[0])
        raise GraphError(f"bidder {v}: requested capacity {int(req_a[v])} is not >= 1")
    bad = np.nonzero(req_b < 1)[0]
    if bad.size:
        v = int(bad[0])
        raise GraphError(f"object {v}: requested capacity {int(req_b[v])} is not >= 1")

    deg_a = np.bincount(ei, minlength=n_a).astype(np.int64)
    deg_b = np.bincount(ej, minlength=n_b).astype(np.int64)
    eff_a = np.minimum(req_a, deg_a)
    eff_b = np.minimum(req_b, deg_b)
    clamped = int(np.count_nonzero(eff_a < req_a)) + int(
        np.count_nonzero(eff_b < req_b)
    )

    adj_a_off, adj_a_edge = _csr(ei, n_a)
    adj_b_off, adj_b_edge = _csr(ej, n_b)

    return BipartiteGraph(
        n_a=n_a,
        n_b=n_b,
        edge_bidder=ei,
        edge_object=ej,
        edge_weight=ew,
        b_a=eff_a,
        b_b=eff_b,
        deg_a=deg_a,
        deg_b=deg_b,
        adj_a_off=adj_a_off,
        adj_a_edge=adj_a_edge,
        adj_b_off=adj_b_off,
        adj_b_edge=adj_b_edge,
        clamped=clamped,
    )


def stats(g: BipartiteGraph) -> tuple[int, int, int, int]:
    """(edge count, max degree, max effective capacity, total capacity)."""
    return (g.m, g.max_degree, g.max_b, g.b_total)
