"""Feasibility, happiness, and duality checks for auction output.

The auction's guarantee can be verified after the fact, without
trusting the engine: prices and the matching induce a dual solution,
and when relaxed complementary slackness holds, scaling the duals by
1/(1 - eps) yields a feasible LP dual whose objective upper-bounds any
b-matching under the rounded weights.  The ratio of achieved rounded
weight to that bound certifies the approximation on this instance.

All checks run on the rounded weights w~ from the shared power table;
:func:`verify_approximation` alone speaks about original weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .auction import AuctionResult
from .graph import BipartiteGraph

DEFAULT_TOL = 1e-9


class CertificationError(RuntimeError):
    """Raised when a certificate is requested from failing premises."""


@dataclass
class FeasibilityReport:
    ok: bool
    errors: list[str] = field(default_factory=list)


@dataclass
class StrongHappinessReport:
    ok: bool
    n_happy: int
    n_bidders: int
    # (bidder, shortfall) for matched-utility violations,
    # (bidder, excess) for unsaturated bidders with positive duals
    failures: list[tuple[int, float]] = field(default_factory=list)


@dataclass
class RelaxedCSReport:
    bidders_ok: bool
    objects_ok: bool
    matched_ok: bool
    unmatched_ok: bool
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.bidders_ok and self.objects_ok and self.matched_ok
                and self.unmatched_ok)


@dataclass
class DualSolution:
    """Vertex duals and edge slacks induced by the final prices."""

    pi: np.ndarray  # per bidder
    p: np.ndarray  # per object: cheapest copy price
    z: np.ndarray  # per kept edge: max(w~ - pi - p, 0)
    eps: float


@dataclass
class CertReport:
    feasible: bool
    strong_happy: bool
    relaxed_cs: bool
    cs_flags: RelaxedCSReport
    upper_bound: float
    ratio_lower: float
    tolerance: float
    feasibility: FeasibilityReport
    happiness: StrongHappinessReport

    @property
    def ok(self) -> bool:
        return self.feasible and self.strong_happy and self.relaxed_cs

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "strong_happy": self.strong_happy,
            "relaxed_cs": self.relaxed_cs,
            "upper_bound": self.upper_bound,
            "ratio_lower": self.ratio_lower,
        }


def check_feasible(edge_ids, g: BipartiteGraph) -> FeasibilityReport:
    """Is this edge set a b-matching of g?"""
    errors: list[str] = []
    ids = np.asarray(edge_ids, dtype=np.int64)
    if ids.size:
        if int(ids.min()) < 0 or int(ids.max()) >= g.m:
            errors.append("edge id out of range")
        elif np.unique(ids).size != ids.size:
            errors.append("repeated edge id")
        else:
            use_a = np.bincount(g.edge_bidder[ids], minlength=g.n_a)
            use_b = np.bincount(g.edge_object[ids], minlength=g.n_b)
            over = np.nonzero(use_a > g.b_a)[0]
            if over.size:
                v = int(over[0])
                errors.append(
                    f"bidder {v} used {int(use_a[v])} times, capacity "
                    f"{int(g.b_a[v])}"
                )
            over = np.nonzero(use_b > g.b_b)[0]
            if over.size:
                v = int(over[0])
                errors.append(
                    f"object {v} used {int(use_b[v])} times, capacity "
                    f"{int(g.b_b[v])}"
                )
    return FeasibilityReport(ok=not errors, errors=errors)


def _matched_counts(res: AuctionResult) -> tuple[np.ndarray, np.ndarray]:
    g = res.graph
    ids = res.matched_edges
    use_a = np.bincount(g.edge_bidder[ids], minlength=g.n_a).astype(np.int64)
    use_b = np.bincount(g.edge_object[ids], minlength=g.n_b).astype(np.int64)
    return use_a, use_b


def _min_prices(res: AuctionResult) -> np.ndarray:
    g = res.graph
    p = np.zeros(g.n_b, dtype=np.float64)
    off = res.copy_off
    have = np.nonzero(np.diff(off) > 0)[0]
    if have.size:
        p[have] = np.minimum.reduceat(res.copy_price, off[have])
    return p


def _best_alternative(res: AuctionResult, eps: float,
                      p_min: np.ndarray) -> np.ndarray:
    """Per bidder: best discounted utility over unmatched kept edges.

    The maximum over copies of an object is attained at its cheapest
    copy, so the object-level minimum price is enough.
    """
    g = res.graph
    s = res.instance
    ke_bidder = g.edge_bidder[s.kept_ids]
    ke_object = g.edge_object[s.kept_ids]
    alt = np.full(g.n_a, -math.inf, dtype=np.float64)
    unmatched = res.matched_copy < 0
    if unmatched.any():
        vals = (1.0 - eps) * s.w_tilde[unmatched] - p_min[ke_object[unmatched]]
        np.maximum.at(alt, ke_bidder[unmatched], vals)
    return alt


def check_strong_happiness(res: AuctionResult, eps: float | None = None,
                           tol: float = DEFAULT_TOL) -> StrongHappinessReport:
    """Certify every bidder against its own per-copy prices.

    A bidder passes when each of its matched edges earns at least the
    best discounted utility available on its unmatched neighbor copies
    (within tol * max rounded weight), and, if unsaturated, that best
    alternative is nonpositive within the same slack.
    """
    g = res.graph
    s = res.instance
    if eps is None:
        eps = s.eps
    slack = tol * (float(s.w_tilde.max()) if s.n_kept else 0.0)
    p_min = _min_prices(res)
    alt = _best_alternative(res, eps, p_min)
    use_a, _ = _matched_counts(res)
    ke_bidder = g.edge_bidder[s.kept_ids]

    bad = np.zeros(g.n_a, dtype=bool)
    failures: list[tuple[int, float]] = []
    for e in res.matched_kept:
        i = int(ke_bidder[e])
        pi_i = max(alt[i], 0.0)
        utility = float(s.w_tilde[e]) - float(res.copy_price[res.matched_copy[e]])
        if utility < pi_i - slack:
            if not bad[i]:
                bad[i] = True
                failures.append((i, pi_i - utility))
    for i in range(g.n_a):
        if use_a[i] < g.b_a[i] and alt[i] > slack:
            if not bad[i]:
                bad[i] = True
                failures.append((int(i), float(alt[i])))
    n_happy = g.n_a - int(bad.sum())
    return StrongHappinessReport(ok=not failures, n_happy=n_happy,
                                 n_bidders=g.n_a, failures=failures)


def derive_duals(res: AuctionResult, eps: float | None = None) -> DualSolution:
    """Duals from the final prices.

    p(j) is the cheapest copy price of j; pi(i) is the bidder's best
    discounted utility over unmatched kept edges, floored at zero; the
    edge slack z makes (pi, p, z) cover every kept edge's rounded
    weight.
    """
    g = res.graph
    s = res.instance
    if eps is None:
        eps = s.eps
    p = _min_prices(res)
    alt = _best_alternative(res, eps, p)
    pi = np.maximum(alt, 0.0)
    ke_bidder = g.edge_bidder[s.kept_ids]
    ke_object = g.edge_object[s.kept_ids]
    z = np.maximum(s.w_tilde - pi[ke_bidder] - p[ke_object], 0.0)
    return DualSolution(pi=pi, p=p, z=z, eps=eps)


def check_relaxed_cs(duals: DualSolution, res: AuctionResult,
                     tol: float = DEFAULT_TOL) -> RelaxedCSReport:
    """Relaxed complementary slackness of (duals, matching).

    Four conditions: unsaturated bidders and unsaturated objects carry
    zero duals; matched edges are covered tightly from below
    (pi + p <= w~ (1 + tol)); unmatched kept edges are covered up to the
    discount (pi + p >= (1 - eps) w~ (1 - tol)).
    """
    g = res.graph
    s = res.instance
    eps = duals.eps
    slack = tol * (float(s.w_tilde.max()) if s.n_kept else 0.0)
    use_a, use_b = _matched_counts(res)
    failures: list[str] = []

    unsat = np.nonzero((use_a < g.b_a) & (duals.pi > slack))[0]
    bidders_ok = unsat.size == 0
    if unsat.size:
        v = int(unsat[0])
        failures.append(f"unsaturated bidder {v} has dual {duals.pi[v]!r}")

    unsat = np.nonzero((use_b < g.b_b) & (duals.p > slack))[0]
    objects_ok = unsat.size == 0
    if unsat.size:
        v = int(unsat[0])
        failures.append(f"unsaturated object {v} has dual {duals.p[v]!r}")

    ke_bidder = g.edge_bidder[s.kept_ids]
    ke_object = g.edge_object[s.kept_ids]
    cover = duals.pi[ke_bidder] + duals.p[ke_object]
    matched = res.matched_copy >= 0

    hi = np.nonzero(matched & (cover > s.w_tilde * (1.0 + tol)))[0]
    matched_ok = hi.size == 0
    if hi.size:
        e = int(hi[0])
        failures.append(
            f"matched edge {int(s.kept_ids[e])} overcovered: "
            f"{cover[e]!r} > w~={s.w_tilde[e]!r}"
        )

    lo = np.nonzero(~matched
                    & (cover < (1.0 - eps) * s.w_tilde * (1.0 - tol)))[0]
    unmatched_ok = lo.size == 0
    if lo.size:
        e = int(lo[0])
        failures.append(
            f"unmatched edge {int(s.kept_ids[e])} undercovered: "
            f"{cover[e]!r} < (1-eps) w~={(1.0 - eps) * s.w_tilde[e]!r}"
        )

    return RelaxedCSReport(bidders_ok=bidders_ok, objects_ok=objects_ok,
                           matched_ok=matched_ok, unmatched_ok=unmatched_ok,
                           failures=failures)


def certified_upper_bound(duals: DualSolution, res: AuctionResult,
                          cs: RelaxedCSReport) -> float:
    """Dual objective bounding any b-matching under rounded weights.

    Scaling pi and p by 1/(1 - eps) and re-deriving edge slacks gives a
    feasible dual, so its objective is a true upper bound; relaxed
    complementary slackness is required because it is what keeps this
    bound within 1/(1 - eps) of the achieved weight.
    """
    if not cs.ok:
        raise CertificationError(
            "certified_upper_bound needs a passing relaxed-CS verdict"
        )
    g = res.graph
    s = res.instance
    scale = 1.0 / (1.0 - duals.eps)
    # The dual solution the bound is computed FROM is the scaled duals
    # as concrete floats.  Edge slacks are re-derived against exactly
    # those floats with an exactly-rounded three-term sum, bumped one
    # ulp upward when positive, so coverage holds in real arithmetic.
    # The objective is then an fsum of exact per-unit terms; exact
    # rounding is monotone, so the returned float can never fall below
    # the exactly-summed weight of any b-matching.
    y = duals.pi * scale
    q = duals.p * scale
    terms: list[float] = []
    for i in np.nonzero(y > 0.0)[0]:
        terms.extend([float(y[i])] * int(g.b_a[i]))
    for j in np.nonzero(q > 0.0)[0]:
        terms.extend([float(q[j])] * int(g.b_b[j]))
    if s.n_kept:
        ke_bidder = g.edge_bidder[s.kept_ids]
        ke_object = g.edge_object[s.kept_ids]
        rough = s.w_tilde - (y[ke_bidder] + q[ke_object])
        for e in np.nonzero(rough > -1e-6 * s.w_tilde)[0]:
            r = math.fsum(
                (
                    float(s.w_tilde[e]),
                    -float(y[ke_bidder[e]]),
                    -float(q[ke_object[e]]),
                )
            )
            if r > 0.0:
                terms.append(math.nextafter(r, math.inf))
    return math.fsum(terms)


def verify_approximation(edge_ids, g: BipartiteGraph, eps_prime: float,
                         opt_weight: float, tol: float = DEFAULT_TOL) -> bool:
    """Does the matching reach (1 - eps_prime) of opt_weight?

    Compares original weights: fsum over the matching against
    (1 - eps_prime) * opt_weight - tol * opt_weight.
    """
    w = math.fsum(float(g.edge_weight[e]) for e in np.asarray(edge_ids))
    return w >= (1.0 - eps_prime) * opt_weight - tol * opt_weight


def certify(res: AuctionResult, tol: float = DEFAULT_TOL) -> CertReport:
    """Run all checks and assemble the certificate."""
    feas = check_feasible(res.matched_edges, res.graph)
    strong = check_strong_happiness(res, tol=tol)
    duals = derive_duals(res)
    cs = check_relaxed_cs(duals, res, tol=tol)
    if cs.ok:
        ub = certified_upper_bound(duals, res, cs)
    else:
        ub = math.nan
    achieved = res.weight_rounded()
    if ub == 0.0:
        ratio = 1.0
    else:
        ratio = achieved / ub
    return CertReport(
        feasible=feas.ok,
        strong_happy=strong.ok,
        relaxed_cs=cs.ok,
        cs_flags=cs,
        upper_bound=ub,
        ratio_lower=ratio,
        tolerance=tol,
        feasibility=feas,
        happiness=strong,
    )
