"""Reading and writing instances.

The native format is line-oriented and 1-based:

    c free-text comment
    p bbm <n_bidders> <n_objects> <n_edges>
    a <bidder> <capacity>
    o <object> <capacity>
    e <bidder> <object> <weight>

Vertices without an ``a``/``o`` line get requested capacity 1.  Edges
keep file order as their edge id.  Matrix Market coordinate files can
be ingested too: rows become bidders, columns objects, all capacities 1
unless a separate capacity file supplies one integer per vertex,
bidders first.
"""

from __future__ import annotations

import numpy as np

from .graph import BipartiteGraph, build_graph


class FormatError(ValueError):
    """Raised on malformed input files; messages carry line numbers."""


def _fail(line_no: int, msg: str):
    raise FormatError(f"line {line_no}: {msg}")


def _int_field(tok: str, line_no: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        _fail(line_no, f"{what} {tok!r} is not an integer")


def _float_field(tok: str, line_no: int, what: str) -> float:
    try:
        return float(tok)
    except ValueError:
        _fail(line_no, f"{what} {tok!r} is not a number")


def parse_bbm(text: str) -> BipartiteGraph:
    """Parse the native format into a graph.

    Structural problems (unknown records, bad counts, indices outside
    the declared ranges, duplicate edges or capacity lines) raise
    FormatError with the offending line number; semantic validation is
    delegated to graph construction.
    """
    n_a = n_b = m = -1
    cap_a: dict[int, int] = {}
    cap_b: dict[int, int] = {}
    ei: list[int] = []
    ej: list[int] = []
    ew: list[float] = []
    seen: set[tuple[int, int]] = set()

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        fields = line.split()
        kind = fields[0]
        if kind == "p":
            if n_a >= 0:
                _fail(line_no, "second problem line")
            if len(fields) != 5 or fields[1] != "bbm":
                _fail(line_no, f"malformed problem line {line!r}")
            n_a = _int_field(fields[2], line_no, "bidder count")
            n_b = _int_field(fields[3], line_no, "object count")
            m = _int_field(fields[4], line_no, "edge count")
            if n_a < 0 or n_b < 0 or m < 0:
                _fail(line_no, "problem line counts must be nonnegative")
            continue
        if n_a < 0:
            _fail(line_no, f"record {kind!r} before the problem line")
        if kind == "a" or kind == "o":
            if len(fields) != 3:
                _fail(line_no, f"capacity line needs 2 fields: {line!r}")
            side = n_a if kind == "a" else n_b
            v = _int_field(fields[1], line_no, "vertex index")
            b = _int_field(fields[2], line_no, "capacity")
            if not (1 <= v <= side):
                _fail(line_no, f"vertex index {v} out of range [1, {side}]")
            store = cap_a if kind == "a" else cap_b
            if v - 1 in store:
                _fail(line_no, f"second capacity line for vertex {v}")
            store[v - 1] = b
        elif kind == "e":
            if len(fields) != 4:
                _fail(line_no, f"edge line needs 3 fields: {line!r}")
            i = _int_field(fields[1], line_no, "bidder index")
            j = _int_field(fields[2], line_no, "object index")
            w = _float_field(fields[3], line_no, "weight")
            if not (1 <= i <= n_a):
                _fail(line_no, f"bidder index {i} out of range [1, {n_a}]")
            if not (1 <= j <= n_b):
                _fail(line_no, f"object index {j} out of range [1, {n_b}]")
            if (i, j) in seen:
                _fail(line_no, f"duplicate edge ({i}, {j})")
            seen.add((i, j))
            ei.append(i - 1)
            ej.append(j - 1)
            ew.append(w)
        else:
            _fail(line_no, f"unknown record type {kind!r}")

    if n_a < 0:
        raise FormatError("missing problem line")
    if len(ei) != m:
        raise FormatError(f"problem line declares {m} edges, file has {len(ei)}")

    req_a = np.ones(n_a, dtype=np.int64)
    req_b = np.ones(n_b, dtype=np.int64)
    for v, b in cap_a.items():
        req_a[v] = b
    for v, b in cap_b.items():
        req_b[v] = b
    edges = (
        np.asarray(ei, dtype=np.int64),
        np.asarray(ej, dtype=np.int64),
        np.asarray(ew, dtype=np.float64),
    )
    return build_graph(n_a, n_b, edges, req_a, req_b)


def write_bbm(g: BipartiteGraph, comment: str | None = None) -> str:
    """Serialize a graph; parsing the output reproduces it exactly.

    Capacity lines are written only where the effective capacity
    differs from the default 1; isolated vertices (capacity 0) need no
    line because the degree clamp restores them on the next parse.
    Weights use repr, which round-trips float64.
    """
    out: list[str] = []
    if comment:
        for part in comment.splitlines():
            out.append(f"c {part}")
    out.append(f"p bbm {g.n_a} {g.n_b} {g.m}")
    for i in range(g.n_a):
        if g.b_a[i] > 1:
            out.append(f"a {i + 1} {int(g.b_a[i])}")
    for j in range(g.n_b):
        if g.b_b[j] > 1:
            out.append(f"o {j + 1} {int(g.b_b[j])}")
    for e in range(g.m):
        out.append(
            f"e {int(g.edge_bidder[e]) + 1} {int(g.edge_object[e]) + 1} "
            f"{float(g.edge_weight[e])!r}"
        )
    return "\n".join(out) + "\n"


def parse_mtx(text: str, capacities: str | None = None) -> BipartiteGraph:
    """Parse a Matrix Market coordinate file as a bipartite instance.

    Rows map to bidders and columns to objects.  ``capacities``, when
    given, is the text of a side file with one requested capacity per
    line, all bidders first, then all objects.
    """
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty matrix file")
    header = lines[0].lower().split()
    if (len(header) < 4 or not header[0].startswith("%%matrixmarket")
            or header[1] != "matrix" or header[2] != "coordinate"):
        raise FormatError("line 1: not a coordinate MatrixMarket header")
    if "pattern" in header or "complex" in header:
        raise FormatError("line 1: need real or integer values")

    n_a = n_b = m = -1
    ei: list[int] = []
    ej: list[int] = []
    ew: list[float] = []
    for line_no, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        fields = line.split()
        if n_a < 0:
            if len(fields) != 3:
                _fail(line_no, f"malformed size line {line!r}")
            n_a = _int_field(fields[0], line_no, "row count")
            n_b = _int_field(fields[1], line_no, "column count")
            m = _int_field(fields[2], line_no, "entry count")
            continue
        if len(fields) != 3:
            _fail(line_no, f"malformed entry {line!r}")
        i = _int_field(fields[0], line_no, "row")
        j = _int_field(fields[1], line_no, "column")
        w = _float_field(fields[2], line_no, "value")
        if not (1 <= i <= n_a):
            _fail(line_no, f"row {i} out of range [1, {n_a}]")
        if not (1 <= j <= n_b):
            _fail(line_no, f"column {j} out of range [1, {n_b}]")
        ei.append(i - 1)
        ej.append(j - 1)
        ew.append(w)
    if n_a < 0:
        raise FormatError("missing size line")
    if len(ei) != m:
        raise FormatError(f"size line declares {m} entries, file has {len(ei)}")

    req_a = np.ones(n_a, dtype=np.int64)
    req_b = np.ones(n_b, dtype=np.int64)
    if capacities is not None:
        vals = [
            _int_field(tok, k + 1, "capacity")
            for k, tok in enumerate(capacities.split())
        ]
        if len(vals) != n_a + n_b:
            raise FormatError(
                f"capacity file has {len(vals)} entries, expected "
                f"{n_a + n_b} (bidders first, then objects)"
            )
        req_a = np.asarray(vals[:n_a], dtype=np.int64)
        req_b = np.asarray(vals[n_a:], dtype=np.int64)

    edges = (
        np.asarray(ei, dtype=np.int64),
        np.asarray(ej, dtype=np.int64),
        np.asarray(ew, dtype=np.float64),
    )
    return build_graph(n_a, n_b, edges, req_a, req_b)
