"""Feasibility, strong happiness, duals, relaxed CS, and the dual bound.

Frozen numbers come from the same hand-worked eps = 0.5 traces as the
auction tests; every quantity there is an exact binary float.
"""

import numpy as np
import pytest

from bbmatch import (
    CertificationError,
    brute_force,
    build_graph,
    certified_upper_bound,
    certify,
    check_feasible,
    check_relaxed_cs,
    check_strong_happiness,
    derive_duals,
    initialize,
    preprocess,
    run,
    verify_approximation,
)
from bbmatch.certify import DualSolution

from conftest import rounded_graph, small_random, synthetic_instance


def single_edge_result(debug=False):
    g = build_graph(1, 1, [(0, 0, 3.375)], 1, 1)
    inst = synthetic_instance(g, 0.5, [3])
    return run(inst, g, debug=debug)


# --- feasibility ----------------------------------------------------------


def test_empty_set_is_feasible():
    g = build_graph(2, 2, [(0, 0, 1.0)], 1, 1)
    assert check_feasible([], g).ok


def test_capacity_excess_is_reported():
    # bidder 0 has two edges but capacity 1; using both exceeds it
    g = build_graph(1, 2, [(0, 0, 1.0), (0, 1, 2.0)], 1, 1)
    rep = check_feasible([0, 1], g)
    assert not rep.ok
    assert "bidder 0" in rep.errors[0]


def test_repeated_and_out_of_range_ids_are_reported():
    g = build_graph(1, 1, [(0, 0, 1.0)], 1, 1)
    assert not check_feasible([0, 0], g).ok
    assert not check_feasible([5], g).ok


def test_run_example_matching_is_feasible(two_by_two):
    res = run(preprocess(two_by_two, 0.1), two_by_two)
    rep = check_feasible(res.matched_edges, two_by_two)
    assert rep.ok and len(res.matched_edges) == 2


# --- strong happiness -----------------------------------------------------


def test_single_edge_final_state_is_happy():
    res = single_edge_result()
    rep = check_strong_happiness(res)
    assert rep.ok and rep.n_happy == rep.n_bidders == 1


def test_idle_bidder_with_affordable_neighbor_is_not_happy():
    # nothing matched, prices all zero, a positive-weight edge available
    g = build_graph(1, 1, [(0, 0, 3.375)], 1, 1)
    inst = synthetic_instance(g, 0.5, [3])
    st = initialize(inst, g)
    rep = check_strong_happiness(st.result())
    assert not rep.ok
    assert rep.failures[0][0] == 0  # the bidder, with its positive excess
    assert rep.failures[0][1] == pytest.approx(0.5 * 3.375)


def test_outbid_trace_final_state_is_happy():
    g = build_graph(2, 1, [(0, 0, 3.375), (1, 0, 3.375)], 1, 1)
    inst = synthetic_instance(g, 0.5, [3, 3])
    res = run(inst, g)
    rep = check_strong_happiness(res)
    # the loser's best alternative is (1-eps) * 3.375 - 2.25 < 0, so
    # being unmatched is fine
    assert rep.ok and rep.n_happy == 2


# --- duals ----------------------------------------------------------------


def test_duals_of_single_edge_trace():
    res = single_edge_result()
    d = derive_duals(res)
    assert d.p[0] == 0.84375
    assert d.pi[0] == 0.0  # no unmatched kept edges at this bidder
    assert d.z[0] == 2.53125  # 3.375 - 0 - 0.84375


def test_duals_at_fresh_state_are_discounted_best_weights():
    g = build_graph(2, 2, [(0, 0, 3.375), (0, 1, 1.5), (1, 1, 2.25)], 1, 1)
    inst = synthetic_instance(g, 0.5, [3, 1, 2])
    d = derive_duals(initialize(inst, g).result())
    assert list(d.p) == [0.0, 0.0]
    assert d.pi[0] == 0.5 * 3.375
    assert d.pi[1] == 0.5 * 2.25


def test_object_dual_is_cheapest_copy():
    g = build_graph(2, 1, [(0, 0, 3.375), (1, 0, 3.375)], 1, 2)
    inst = synthetic_instance(g, 0.5, [3, 3])
    st = initialize(inst, g)
    st.copy_price[:] = (5.0, 0.0)
    d = derive_duals(st.result())
    assert d.p[0] == 0.0


# --- relaxed complementary slackness --------------------------------------


def test_single_edge_trace_satisfies_cs():
    res = single_edge_result()
    cs = check_relaxed_cs(derive_duals(res), res)
    assert cs.ok  # 0 + 0.84375 <= 3.375 and nothing unsaturated is paid


def test_positive_price_on_unsaturated_object_fails_cs():
    g = build_graph(1, 1, [(0, 0, 3.375)], 1, 1)
    inst = synthetic_instance(g, 0.5, [3])
    st = initialize(inst, g)
    st.copy_price[0] = 5.0  # priced but never sold
    res = st.result()
    cs = check_relaxed_cs(derive_duals(res), res)
    assert not cs.objects_ok and not cs.ok
    assert cs.bidders_ok and cs.matched_ok and cs.unmatched_ok
    assert "unsaturated object 0" in cs.failures[0]


def test_undercovered_unmatched_edge_fails_cs():
    g = build_graph(1, 1, [(0, 0, 3.375)], 1, 1)
    inst = synthetic_instance(g, 0.5, [3])
    res = initialize(inst, g).result()  # nothing matched, prices zero
    d = DualSolution(
        pi=np.zeros(1), p=np.zeros(1), z=np.zeros(1), eps=0.5
    )
    cs = check_relaxed_cs(d, res)
    assert not cs.unmatched_ok
    assert "undercovered" in cs.failures[-1]


def test_overcovered_matched_edge_fails_cs():
    res = single_edge_result()
    d = DualSolution(
        pi=np.array([4.0]), p=np.array([4.0]), z=np.zeros(1), eps=0.5
    )
    cs = check_relaxed_cs(d, res)
    assert not cs.matched_ok
    assert "overcovered" in cs.failures[-1]


def test_outbid_trace_satisfies_cs():
    g = build_graph(2, 1, [(0, 0, 3.375), (1, 0, 3.375)], 1, 1)
    inst = synthetic_instance(g, 0.5, [3, 3])
    res = run(inst, g)
    cs = check_relaxed_cs(derive_duals(res), res)
    assert cs.ok, cs.failures


# --- the dual upper bound -------------------------------------------------


def test_single_edge_upper_bound_is_tight():
    res = single_edge_result()
    d = derive_duals(res)
    cs = check_relaxed_cs(d, res)
    ub = certified_upper_bound(d, res, cs)
    # 0.84375 / 0.5 + (3.375 - 1.6875) == 3.375 == the true optimum
    assert ub == 3.375
    assert brute_force(rounded_graph(res)).weight == 3.375


def test_upper_bound_requires_passing_cs():
    # zero duals on a fresh state leave the unmatched edge undercovered
    g = build_graph(1, 1, [(0, 0, 3.375)], 1, 1)
    inst = synthetic_instance(g, 0.5, [3])
    res = initialize(inst, g).result()
    d = DualSolution(
        pi=np.zeros(1), p=np.zeros(1), z=np.zeros(1), eps=0.5
    )
    cs = check_relaxed_cs(d, res)
    assert not cs.ok
    with pytest.raises(CertificationError):
        certified_upper_bound(d, res, cs)


def test_empty_graph_upper_bound_is_zero():
    g = build_graph(1, 1, [], 1, 1)
    res = run(preprocess(g, 0.3), g)
    rep = certify(res)
    assert rep.upper_bound == 0.0
    assert rep.ratio_lower == 1.0
    assert rep.ok


def test_run_example_bound_dominates_brute_force(two_by_two):
    res = run(preprocess(two_by_two, 0.1), two_by_two)
    rep = certify(res)
    assert rep.ok
    opt_rounded = brute_force(rounded_graph(res)).weight
    assert rep.upper_bound >= opt_rounded
    assert rep.upper_bound >= 5.0 * (1 - 0.1)  # sanity on the scale


def test_bound_chain_on_random_instances():
    # achieved rounded weight <= rounded optimum <= certified bound, and
    # achieved / bound >= 1 - eps: the full certification chain
    for seed in range(50):
        g = small_random(seed)
        for eps_prime in (0.1, 0.3, 0.5):
            res = run(preprocess(g, eps_prime), g)
            d = derive_duals(res)
            cs = check_relaxed_cs(d, res)
            assert cs.ok, cs.failures
            ub = certified_upper_bound(d, res, cs)
            achieved = res.weight_rounded()
            opt_rounded = brute_force(rounded_graph(res)).weight
            assert achieved <= opt_rounded <= ub
            if ub > 0:
                assert achieved / ub >= (1 - res.instance.eps) * (1 - 1e-9)


# --- certificates and the original-weight guarantee ------------------------


def test_certify_report_shape(two_by_two):
    res = run(preprocess(two_by_two, 0.1), two_by_two)
    rep = certify(res)
    d = rep.to_dict()
    assert set(d) == {
        "feasible", "strong_happy", "relaxed_cs", "upper_bound",
        "ratio_lower",
    }
    assert d["feasible"] and d["strong_happy"] and d["relaxed_cs"]
    assert rep.ratio_lower == res.weight_rounded() / rep.upper_bound


def test_verify_approximation_frozen(two_by_two):
    # matching {(a1,b2),(a2,b1)} has weight 5 = optimum: passes at 0.1
    assert verify_approximation([1, 2], two_by_two, 0.1, 5.0)
    # matching weight 4 < 0.9 * 5: fails
    assert not verify_approximation([0, 3], two_by_two, 0.1, 5.0)
    # empty instance, zero optimum: passes
    g = build_graph(1, 1, [], 1, 1)
    assert verify_approximation([], g, 0.1, 0.0)
