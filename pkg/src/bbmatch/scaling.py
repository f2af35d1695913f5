"""Weight pruning, scaling, and rounding to powers of (1 + eps).

The solver trades a factor (1 - eps_prime) of matching weight for speed.
Half of that budget pays for dropping edges too light to matter, the
other half for rounding weights down to integer powers of (1 + eps) with
eps = eps_prime / 2.  After preprocessing every kept edge carries an
integer exponent r with table(r) <= scaled weight < table(r + 1).

All powers of (1 + eps) used anywhere downstream come from one shared
table built by repeated multiplication (and division, below 1), so
threshold comparisons in the auction and in the certifier are performed
against bit-identical values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import BipartiteGraph

# Hard cap for the exponent search loops; reached only for absurd inputs.
_MAX_EXPONENT = 50_000_000


def _check_eps(eps: float) -> None:
    # 0.5 itself is admitted: the auction arithmetic stays sound there and
    # it makes the numbers in small worked examples round.
    if not (0.0 < eps <= 0.5):
        raise ValueError(f"eps must lie in (0, 0.5], got {eps!r}")


def compute_smin(eps: float) -> int:
    """Smallest integer s with (1 + eps)^-s <= eps.

    Uses the same division chain as the power table so the boundary
    agrees with table values exactly.
    """
    _check_eps(eps)
    base = 1.0 + eps
    p = 1.0
    s = 0
    while p > eps:
        s += 1
        p /= base
        if s > _MAX_EXPONENT:
            raise ValueError(f"no admissible s_min for eps={eps!r}")
    return s


def ilog(x: float, eps: float) -> int:
    """floor(log base (1 + eps) of x) for x >= 1.

    A float log estimate is corrected against powers built by repeated
    multiplication, the same arithmetic the power table uses, so the
    returned k satisfies pow(k) <= x < pow(k + 1) for table powers.
    """
    _check_eps(eps)
    if not (x >= 1.0) or not math.isfinite(x):
        raise ValueError(f"ilog requires x >= 1, got {x!r}")
    base = 1.0 + eps
    k0 = int(math.floor(math.log(x) / math.log1p(eps)))
    k0 = max(k0, 0)
    hi = k0 + 2
    if hi > _MAX_EXPONENT:
        raise ValueError(f"ilog({x!r}, {eps!r}) exceeds the exponent cap")
    powers = np.empty(hi + 1, dtype=np.float64)
    powers[0] = 1.0
    for k in range(1, hi + 1):
        powers[k] = powers[k - 1] * base
    k = k0
    while k > 0 and powers[k] > x:
        k -= 1
    while k + 1 <= hi and powers[k + 1] <= x:
        k += 1
    return k


def compute_smax(eps: float, b_total: int) -> int:
    """Largest exponent a scaled weight can take: ilog of b_total/(2 eps)."""
    _check_eps(eps)
    if b_total < 1:
        raise ValueError(f"b_total must be >= 1, got {b_total}")
    return ilog(b_total / (2.0 * eps), eps)


def build_power_table(eps: float, s_min: int, s_max: int) -> tuple[np.ndarray, int]:
    """Powers (1 + eps)^r for r in [-s_min - 1, s_max + 2].

    Returns (table, offset) with table[offset] == 1.0 exactly; entry for
    exponent r sits at table[r + offset].  Positive exponents are built
    by repeated multiplication, negative ones by repeated division, so
    adjacent entries are consistent to within one rounding.
    """
    _check_eps(eps)
    base = 1.0 + eps
    offset = s_min + 1
    table = np.empty(s_min + s_max + 4, dtype=np.float64)
    table[offset] = 1.0
    for k in range(1, s_max + 3):
        table[offset + k] = table[offset + k - 1] * base
    for k in range(1, s_min + 2):
        table[offset - k] = table[offset - k + 1] / base
    return table, offset


@dataclass
class ScaledInstance:
    """Preprocessed instance: prune threshold, scale, exponents, table.

    Treated as immutable once built.  Edge-indexed arrays cover only the
    kept edges; ``kept_pos`` maps an original edge id to its position in
    those arrays (-1 if the edge was pruned).
    """

    eps_prime: float
    eps: float
    w_max: float
    prune_threshold: float
    sigma: float
    s_min: int
    s_max: int
    kept: np.ndarray  # bool, shape (m,)
    kept_ids: np.ndarray  # int64, original edge id per kept edge
    kept_pos: np.ndarray  # int64, shape (m,), -1 for pruned edges
    r_exp: np.ndarray  # int64, exponent per kept edge
    scaled: np.ndarray  # float64, scaled weight per kept edge
    power_table: np.ndarray
    table_offset: int
    w_tilde: np.ndarray = field(default=None, repr=False)  # table[r_exp]

    def __post_init__(self):
        if self.w_tilde is None:
            self.w_tilde = self.power_table[self.r_exp + self.table_offset]

    @property
    def n_kept(self) -> int:
        return int(self.kept_ids.shape[0])

    @property
    def pruned_count(self) -> int:
        return int(self.kept.shape[0]) - self.n_kept

    def power(self, r):
        """(1 + eps)^r from the shared table; r may be an array."""
        return self.power_table[r + self.table_offset]


def _empty_instance(g: BipartiteGraph, eps_prime: float, eps: float,
                    w_max: float) -> ScaledInstance:
    b_eff = max(g.b_total, 1)
    s_min = compute_smin(eps)
    s_max = compute_smax(eps, b_eff)
    table, offset = build_power_table(eps, s_min, s_max)
    m = g.m
    return ScaledInstance(
        eps_prime=eps_prime,
        eps=eps,
        w_max=w_max,
        prune_threshold=0.0,
        sigma=0.0,
        s_min=s_min,
        s_max=s_max,
        kept=np.zeros(m, dtype=bool),
        kept_ids=np.empty(0, dtype=np.int64),
        kept_pos=np.full(m, -1, dtype=np.int64),
        r_exp=np.empty(0, dtype=np.int64),
        scaled=np.empty(0, dtype=np.float64),
        power_table=table,
        table_offset=offset,
    )


def preprocess(g: BipartiteGraph, eps_prime: float) -> ScaledInstance:
    """Prune light edges, scale, and round weights down to table powers.

    Edges with weight strictly below (eps_prime / b_total) * w_max are
    dropped; survivors are scaled by b_total / (eps_prime * w_max) so the
    heaviest becomes b_total / eps_prime and every kept weight is >= 1.
    Each kept edge gets the exponent r of the largest table power not
    exceeding its scaled weight.

    An instance whose maximum weight is zero (or that has no edges at
    all) comes back empty: everything pruned, nothing to match.
    """
    if not (0.0 < eps_prime < 1.0):
        raise ValueError(f"eps_prime must lie in (0, 1), got {eps_prime!r}")
    eps = eps_prime / 2.0
    m = g.m
    w_max = float(g.edge_weight.max()) if m else 0.0
    if m == 0 or w_max <= 0.0:
        return _empty_instance(g, eps_prime, eps, w_max)

    b_total = g.b_total
    threshold = (eps_prime / b_total) * w_max
    kept = g.edge_weight >= threshold
    kept_ids = np.nonzero(kept)[0].astype(np.int64)
    kept_pos = np.full(m, -1, dtype=np.int64)
    kept_pos[kept_ids] = np.arange(kept_ids.shape[0], dtype=np.int64)

    sigma = b_total / (eps_prime * w_max)
    # Rounding in the two divisions above can push a borderline kept edge
    # a hair below 1; the exponent range starts at 0, so pin it there.
    scaled = np.maximum(g.edge_weight[kept_ids] * sigma, 1.0)

    s_min = compute_smin(eps)
    s_max = compute_smax(eps, b_total)
    table, offset = build_power_table(eps, s_min, s_max)

    r = np.floor(np.log(scaled) / math.log1p(eps)).astype(np.int64)
    np.clip(r, 0, s_max, out=r)
    for _ in range(2):
        over = (r > 0) & (table[r + offset] > scaled)
        if not over.any():
            break
        r[over] -= 1
    for _ in range(2):
        under = (r < s_max) & (table[r + 1 + offset] <= scaled)
        if not under.any():
            break
        r[under] += 1
    if (table[r + offset] > scaled).any() or (
        (r < s_max) & (table[r + 1 + offset] <= scaled)
    ).any():
        raise AssertionError("exponent correction failed to converge")

    return ScaledInstance(
        eps_prime=eps_prime,
        eps=eps,
        w_max=w_max,
        prune_threshold=threshold,
        sigma=sigma,
        s_min=s_min,
        s_max=s_max,
        kept=kept,
        kept_ids=kept_ids,
        kept_pos=kept_pos,
        r_exp=r,
        scaled=scaled,
        power_table=table,
        table_offset=offset,
    )
