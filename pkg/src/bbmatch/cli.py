"""Command line interface.

Subcommands: solve (and its alias certify, which forces verification),
gen, and bench.  Exit codes: 0 success, 1 input problem, 2 invalid
parameters, 3 certification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .auction import run as run_auction
from .certify import certify
from .fileio import FormatError, parse_bbm, parse_mtx, write_bbm
from .generate import WEIGHT_TAGS, GenConfig, generate
from .graph import BipartiteGraph, GraphError
from .oracles import (BRUTE_FORCE_MAX_EDGES, InstanceTooLargeError,
                      brute_force, flow_exact, greedy_half)
from .scaling import preprocess

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_PARAMS = 2
EXIT_CERT = 3


class ParamError(ValueError):
    pass


def _debug_enabled() -> bool:
    return os.environ.get("BBM_DEBUG_INVARIANTS", "") == "1"


def _load_graph(args) -> BipartiteGraph:
    with open(args.input, "r", encoding="utf-8") as fh:
        text = fh.read()
    if args.format == "bbm":
        if args.bfile is not None:
            raise ParamError("--bfile only applies to --format mtx")
        return parse_bbm(text)
    caps = None
    if args.bfile is not None:
        with open(args.bfile, "r", encoding="utf-8") as fh:
            caps = fh.read()
    return parse_mtx(text, caps)


def _check_eps(eps: float) -> float:
    if not (0.0 < eps < 1.0):
        raise ParamError(f"--eps must lie strictly between 0 and 1, got {eps}")
    return eps


def _write_out(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _solve_doc(args, force_certify: bool) -> tuple[dict, bool]:
    g = _load_graph(args)
    eps_prime = _check_eps(args.eps)
    oracle_tag = args.oracle
    if oracle_tag == "brute" and g.m > BRUTE_FORCE_MAX_EDGES:
        raise ParamError(
            f"--oracle brute handles at most {BRUTE_FORCE_MAX_EDGES} edges, "
            f"input has {g.m}"
        )

    t0 = time.perf_counter()
    inst = preprocess(g, eps_prime)
    res = run_auction(inst, g, debug=_debug_enabled())
    wall_ms = (time.perf_counter() - t0) * 1000.0

    doc = {
        "n_a": g.n_a,
        "n_b": g.n_b,
        "m": g.m,
        "epsilon_prime": eps_prime,
        "matching": [
            {"i": i + 1, "j": j + 1, "w": w}
            for i, j, w in res.matching_pairs()
        ],
        "weight": res.weight(),
        "stats": {
            "pops": res.counters.pops,
            "bids": res.counters.bids,
            "outbids": res.counters.outbids,
            "pruned": inst.pruned_count,
            "s_min": inst.s_min,
            "s_max": inst.s_max,
            "wall_ms": wall_ms,
        },
    }

    cert_failed = False
    if force_certify or args.certify:
        report = certify(res, tol=args.tol)
        doc["cert"] = report.to_dict()
        cert_failed = not report.ok

    if oracle_tag != "none":
        oracle = brute_force(g) if oracle_tag == "brute" else flow_exact(g)
        doc["oracle"] = {"method": oracle.method, "weight": oracle.weight}
        opt = oracle.weight
        achieved = doc["weight"]
        doc["approx_ok"] = bool(
            achieved >= (1.0 - eps_prime) * opt - args.tol * opt
        )

    if args.baseline != "none":
        base = greedy_half(g)
        doc["baseline"] = {"method": base.method, "weight": base.weight}

    return doc, cert_failed


def _cmd_solve(args, force_certify: bool = False) -> int:
    doc, cert_failed = _solve_doc(args, force_certify)
    _write_out(json.dumps(doc, indent=2) + "\n", args.output)
    if not args.quiet:
        n = len(doc["matching"])
        print(
            f"matched {n} edges, weight {doc['weight']}, "
            f"{doc['stats']['pops']} pops",
            file=sys.stderr,
        )
    return EXIT_CERT if cert_failed else EXIT_OK


def _cmd_certify(args) -> int:
    return _cmd_solve(args, force_certify=True)


def _cmd_gen(args) -> int:
    cfg = GenConfig(
        n_a=args.na,
        n_b=args.nb,
        m=args.m,
        avg_deg=args.avg_deg,
        b_max=args.bmax,
        weights=args.weights,
        w_max=args.wmax,
        seed=args.seed,
    )
    try:
        g = generate(cfg)
    except ValueError as exc:
        raise ParamError(str(exc)) from exc
    _write_out(write_bbm(g, comment=f"seed {args.seed}"), args.output)
    return EXIT_OK


def _cmd_bench(args) -> int:
    eps_prime = _check_eps(args.eps)
    try:
        sizes = [int(tok) for tok in args.sizes.split(",") if tok.strip()]
    except ValueError as exc:
        raise ParamError(f"bad --sizes list {args.sizes!r}") from exc
    if any(s < 1 for s in sizes):
        raise ParamError("--sizes entries must be >= 1")

    # warm the compiled kernels so rows time the algorithm, not the JIT
    tiny = generate(GenConfig(n_a=8, n_b=8, m=16, b_max=2, seed=1))
    run_auction(preprocess(tiny, eps_prime), tiny)

    rows = ["m,beta,s_min,pops,wall_ms"]
    for idx, size in enumerate(sizes):
        n = max(1, size // 10)
        cfg = GenConfig(n_a=n, n_b=n, m=size, b_max=args.bmax,
                        weights="uniform", seed=args.seed + idx)
        try:
            g = generate(cfg)
        except ValueError as exc:
            raise ParamError(str(exc)) from exc
        t0 = time.perf_counter()
        inst = preprocess(g, eps_prime)
        res = run_auction(inst, g)
        wall_ms = (time.perf_counter() - t0) * 1000.0
        pops = res.counters.pops
        budget = g.m * (inst.s_min + 1)
        if pops > budget:
            raise AssertionError(
                f"pop budget exceeded at m={g.m}: {pops} > {budget}"
            )
        rows.append(
            f"{g.m},{g.max_b},{inst.s_min},{pops},{wall_ms:.3f}"
        )
    _write_out("\n".join(rows) + "\n", args.output)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bbmatch",
        description="approximate maximum weight bipartite b-matching",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_solve_opts(p):
        p.add_argument("--input", "-i", required=True, help="instance file")
        p.add_argument("--format", choices=("bbm", "mtx"), default="bbm")
        p.add_argument("--bfile", default=None,
                       help="capacity side file for mtx input")
        p.add_argument("--eps", type=float, default=0.1,
                       help="weight fraction to trade for speed (0, 1)")
        p.add_argument("--oracle", choices=("none", "brute", "flow"),
                       default="none", help="compare against an exact solver")
        p.add_argument("--baseline", choices=("none", "greedy"),
                       default="none", help="also report a greedy baseline")
        p.add_argument("--tol", type=float, default=1e-9,
                       help="relative tolerance for certification checks")
        p.add_argument("--output", "-o", default=None,
                       help="write JSON here instead of stdout")
        p.add_argument("--quiet", "-q", action="store_true")

    p_solve = sub.add_parser("solve", help="solve one instance")
    add_solve_opts(p_solve)
    p_solve.add_argument("--certify", action="store_true",
                         help="verify happiness, slackness, and the dual bound")
    p_solve.set_defaults(func=_cmd_solve)

    p_cert = sub.add_parser("certify",
                            help="solve and always verify the result")
    add_solve_opts(p_cert)
    p_cert.set_defaults(func=_cmd_certify, certify=True)

    p_gen = sub.add_parser("gen", help="generate a random instance")
    p_gen.add_argument("--na", type=int, required=True)
    p_gen.add_argument("--nb", type=int, required=True)
    group = p_gen.add_mutually_exclusive_group(required=True)
    group.add_argument("--m", type=int, default=None, help="edge count")
    group.add_argument("--avg-deg", type=float, default=None,
                       help="average degree of the smaller side")
    p_gen.add_argument("--bmax", type=int, default=1,
                       help="requested capacities are uniform on [1, bmax]")
    p_gen.add_argument("--weights", choices=WEIGHT_TAGS, default="uniform")
    p_gen.add_argument("--wmax", type=float, default=10.0,
                       help="uniform weights fall in (0, wmax]")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--output", "-o", default=None)
    p_gen.set_defaults(func=_cmd_gen)

    p_bench = sub.add_parser("bench", help="time a series of random instances")
    p_bench.add_argument("--sizes", required=True,
                         help="comma-separated edge counts")
    p_bench.add_argument("--eps", type=float, default=0.1)
    p_bench.add_argument("--bmax", type=int, default=4)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--output", "-o", default=None)
    p_bench.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except InstanceTooLargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except (FormatError, GraphError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
