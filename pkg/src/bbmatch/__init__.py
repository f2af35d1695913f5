"""Approximate maximum weight bipartite b-matching.

A multiplicative-auction solver with a (1 - eps) weight guarantee,
after-the-fact certification through duals, and exact reference
solvers for validation.
"""

from .auction import AuctionResult, AuctionState, Counters, initialize, run
from .certify import (CertificationError, CertReport, DualSolution,
                      certified_upper_bound, certify, check_feasible,
                      check_relaxed_cs, check_strong_happiness, derive_duals,
                      verify_approximation)
from .fileio import FormatError, parse_bbm, parse_mtx, write_bbm
from .generate import GenConfig, SplitMix64, generate
from .graph import BipartiteGraph, GraphError, build_graph, stats
from .oracles import (BRUTE_FORCE_MAX_EDGES, InstanceTooLargeError,
                      OracleResult, brute_force, flow_exact, greedy_half)
from .scaling import (ScaledInstance, build_power_table, compute_smax,
                      compute_smin, ilog, preprocess)

__version__ = "0.1.0"

__all__ = [
    "AuctionResult",
    "AuctionState",
    "BipartiteGraph",
    "BRUTE_FORCE_MAX_EDGES",
    "CertReport",
    "CertificationError",
    "Counters",
    "DualSolution",
    "FormatError",
    "GenConfig",
    "GraphError",
    "InstanceTooLargeError",
    "OracleResult",
    "ScaledInstance",
    "SplitMix64",
    "build_graph",
    "build_power_table",
    "brute_force",
    "certified_upper_bound",
    "certify",
    "check_feasible",
    "check_relaxed_cs",
    "check_strong_happiness",
    "compute_smax",
    "compute_smin",
    "derive_duals",
    "flow_exact",
    "generate",
    "greedy_half",
    "ilog",
    "initialize",
    "parse_bbm",
    "parse_mtx",
    "preprocess",
    "run",
    "stats",
    "verify_approximation",
    "write_bbm",
]
