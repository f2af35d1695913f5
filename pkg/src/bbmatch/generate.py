"""Seeded random instance generation.

The generator is pinned to splitmix64 so a (config, seed) pair yields
the same instance everywhere, independent of platform or numpy version.
Draw order is part of the contract: first m draws pick the edge cells
(Floyd's sampling over the nA x nB grid), then one draw per edge for
weights in cell-sorted order (skipped entirely for unit weights), then
one per bidder and one per object for requested capacities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import BipartiteGraph, build_graph

_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK = (1 << 64) - 1

WEIGHT_TAGS = ("uniform", "unit")


class SplitMix64:
    """splitmix64 with the standard constants; 64-bit outputs."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def next_below(self, n: int) -> int:
        """Uniform-ish draw in [0, n) by 64-bit modulo."""
        return self.next_u64() % n

    def next_unit(self) -> float:
        """Uniform draw in the half-open interval (0, 1]."""
        return ((self.next_u64() >> 11) + 1) * 2.0 ** -53

    def next_array(self, count: int) -> np.ndarray:
        """The next `count` outputs at once (advances the state)."""
        ks = np.arange(1, count + 1, dtype=np.uint64)
        z = np.uint64(self.state) + ks * np.uint64(_GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        z = z ^ (z >> np.uint64(31))
        self.state = (self.state + count * _GOLDEN) & _MASK
        return z


@dataclass
class GenConfig:
    n_a: int
    n_b: int
    m: int | None = None
    avg_deg: float | None = None
    b_max: int = 1
    weights: str = "uniform"
    w_max: float = 10.0
    seed: int = 0

    def edge_count(self) -> int:
        if (self.m is None) == (self.avg_deg is None):
            raise ValueError("specify exactly one of m and avg_deg")
        if self.m is not None:
            return int(self.m)
        return int(round(self.avg_deg * min(self.n_a, self.n_b)))


def generate(cfg: GenConfig) -> BipartiteGraph:
    """Build a random instance from the config and its seed.

    Edge cells are distinct, edges are emitted in (bidder, object)
    order, and requested capacities are uniform on [1, b_max] before the
    usual degree clamp at graph build.
    """
    n_a, n_b = cfg.n_a, cfg.n_b
    if n_a < 0 or n_b < 0:
        raise ValueError("vertex counts must be nonnegative")
    m = cfg.edge_count()
    cells_total = n_a * n_b
    if m < 0 or m > cells_total:
        raise ValueError(
            f"cannot place {m} distinct edges in a {n_a} x {n_b} grid"
        )
    if cfg.b_max < 1:
        raise ValueError(f"b_max must be >= 1, got {cfg.b_max}")
    if cfg.weights not in WEIGHT_TAGS:
        raise ValueError(
            f"unknown weight tag {cfg.weights!r}, expected one of {WEIGHT_TAGS}"
        )
    if not (cfg.w_max > 0):
        raise ValueError(f"w_max must be positive, got {cfg.w_max!r}")

    rng = SplitMix64(cfg.seed)

    # Floyd's sampling: exactly one draw per selected cell
    chosen: set[int] = set()
    if m:
        draws = rng.next_array(m)
        base = cells_total - m
        for k in range(m):
            cell = int(draws[k]) % (base + k + 1)
            if cell in chosen:
                cell = base + k
            chosen.add(cell)
    cells = np.sort(np.fromiter(chosen, dtype=np.int64, count=m))
    ei = cells // n_b if n_b else cells
    ej = cells % n_b if n_b else cells

    if cfg.weights == "unit":
        ew = np.ones(m, dtype=np.float64)
    else:
        u = rng.next_array(m)
        ew = (((u >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0 ** -53
              ) * cfg.w_max

    if cfg.b_max == 1:
        req_a = np.ones(n_a, dtype=np.int64)
        req_b = np.ones(n_b, dtype=np.int64)
        # capacity draws are still consumed so instances with different
        # b_max share their edge sets for equal seeds
        rng.next_array(n_a + n_b)
    else:
        ua = rng.next_array(n_a)
        ub = rng.next_array(n_b)
        req_a = (ua % np.uint64(cfg.b_max)).astype(np.int64) + 1
        req_b = (ub % np.uint64(cfg.b_max)).astype(np.int64) + 1

    return build_graph(n_a, n_b, (ei, ej, ew), req_a, req_b)
