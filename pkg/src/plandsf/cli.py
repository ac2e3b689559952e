"""Command-line entry point: generation, solving, oracles, verification,
proof replay, and batch benchmarks with reproducible outputs."""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from .graph import GraphError
from .harness import HarnessError, existence_replay
from .instance import (GenerationError, Instance, ParseError, Solution,
                       gen_grid, gen_layered_random, parse_instance,
                       parse_solution, serialize_instance, serialize_solution,
                       validate)
from .junction import JunctionError, density_ledger, min_density_search
from .lp import LpError
from .oracle import (OracleError, brute_force_dsf,
                     brute_force_min_density_junction, exact_dst)
from .pipeline import PipelineError, ratio_report, solve_dsf, verify_solution
from .rational import Q, rat_str
from .report import render_bench_figures, write_bench_csv

DOMAIN_ERRORS = (ParseError, GenerationError, GraphError, OracleError,
                 LpError, JunctionError, PipelineError, HarnessError,
                 OSError, KeyError, ValueError)


def _jsonable(value):
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(_jsonable(v) for v in value)
    if isinstance(value, dict):
        return {str(key): _jsonable(v) for key, v in value.items()}
    return rat_str(value)  # exact rationals


def _dump(doc, path):
    text = json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _read_instance(path) -> Instance:
    with open(path) as fh:
        return parse_instance(fh.read())


def _read_solution(path) -> Solution:
    with open(path) as fh:
        return parse_solution(fh.read())


def _tree_doc(tree):
    return {
        "root": tree.root,
        "edges": sorted(tree.edges),
        "covered": sorted(tree.covered),
        "cost": rat_str(tree.cost),
        "density": rat_str(tree.density),
    }


def _parse_seeds(spec: str):
    seeds = []
    for part in spec.split(","):
        if ".." in part:
            lo, hi = part.split("..", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        else:
            seeds.append(int(part))
    if not seeds:
        raise ValueError("empty seed specification")
    return seeds


def _default_parallel() -> int:
    return max(int(os.environ.get("PLANDSF_PARALLEL", "1")), 1)


def _generate(args, seed_override=None):
    if args.gen == "grid":
        return gen_grid(
            args.rows, args.cols,
            orientation_seed=(seed_override if seed_override is not None
                              else args.orientation_seed),
            cost_range=(args.cost_min, args.cost_max), k=args.k,
            pair_seed=(seed_override + 7919 if seed_override is not None
                       else args.pair_seed))
    return gen_layered_random(
        width=args.width, layers=args.layers, density=args.density,
        graph_seed=(seed_override if seed_override is not None
                    else args.graph_seed),
        pair_seed=(seed_override + 7919 if seed_override is not None
                   else args.pair_seed),
        k=args.k)


def _cmd_gen(args) -> int:
    inst = _generate(args)
    text = serialize_instance(inst)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return 0


def _cmd_solve(args) -> int:
    inst = _read_instance(args.infile)
    feas = validate(inst)
    if not feas.feasible:
        raise PipelineError(
            f"instance infeasible for pairs {feas.unreachable_pairs}")
    sol, trace = solve_dsf(inst, args.dst_strategy, args.parallel)
    text = serialize_solution(sol)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    if args.trace:
        _dump({
            "iterations": [{
                "index": it.index,
                "tree": _tree_doc(it.tree),
                "remaining_before": it.remaining_before,
                "covered": sorted(it.newly_covered),
            } for it in trace.iterations],
            "total_cost": rat_str(trace.total_cost),
        }, args.trace)
    if args.oracle:
        opt = brute_force_dsf(inst, edge_budget=args.edge_budget)
        rep = ratio_report(inst, sol, trace, opt.opt_cost)
        _dump({
            "cost": rat_str(rep.cost),
            "opt": rat_str(opt.opt_cost),
            "ratio": rat_str(rep.ratio),
            "accounted_cost": rat_str(rep.accounted_cost),
            "accounting_ok": rep.accounting_ok,
            "harmonic_k": rat_str(rep.harmonic_k),
        }, args.report)
    return 0


def _cmd_junction(args) -> int:
    inst = _read_instance(args.infile)
    state, _states = min_density_search(inst, args.dst_strategy, args.parallel)
    doc = {
        "tree": _tree_doc(state.tree),
        "ledger": density_ledger(state, inst.k),
    }
    _dump(doc, args.out)
    return 0


def _cmd_oracle(args) -> int:
    inst = _read_instance(args.infile)
    if args.mode == "dsf":
        res = brute_force_dsf(inst, edge_budget=args.edge_budget)
        _dump({
            "opt_cost": rat_str(res.opt_cost),
            "edges": sorted(res.witness.edge_ids),
            "explored": res.explored,
        }, args.out)
    elif args.mode == "density":
        res = brute_force_min_density_junction(
            inst, edge_budget=args.edge_budget)
        _dump({
            "root": res.root,
            "covered": sorted(res.covered),
            "edges": sorted(res.edges),
            "cost": rat_str(res.cost),
            "density": rat_str(res.density),
        }, args.out)
    else:  # dst
        if not args.root or not args.terminals:
            raise ValueError("--root and --terminals are required for dst")
        terminals = args.terminals.split(",")
        res = exact_dst(inst.graph, args.root, terminals)
        _dump({
            "opt_cost": rat_str(res.cost),
            "edges": sorted(res.edge_ids),
        }, args.out)
    return 0


def _cmd_verify(args) -> int:
    inst = _read_instance(args.infile)
    sol = _read_solution(args.solution)
    rep = verify_solution(inst, sol)
    _dump({"ok": rep.ok, "problems": list(rep.problems)}, args.out)
    return 0 if rep.ok else 1


def _cmd_replay(args) -> int:
    inst = _read_instance(args.infile)
    sol = _read_solution(args.solution)
    tree, ledger = existence_replay(inst, sol)
    _dump({"tree": _tree_doc(tree), "ledger": ledger}, args.out)
    return 0 if ledger["ok"] else 1


def _bench_one(args, seed):
    inst = _generate(args, seed_override=seed)
    sol, trace = solve_dsf(inst, args.dst_strategy, 1)
    verified = verify_solution(inst, sol).ok
    row = {
        "seed": seed,
        "generator": args.gen,
        "vertices": len(inst.graph.vertices),
        "edges": len(inst.graph.edges),
        "k": inst.k,
        "cost": sol.cost,
        "iterations": len(trace.iterations),
        "verified": verified,
        "opt": None,
        "ratio": None,
        "replay_ok": None,
    }
    if args.oracle:
        opt = brute_force_dsf(inst, edge_budget=args.edge_budget)
        row["opt"] = opt.opt_cost
        row["ratio"] = sol.cost / opt.opt_cost
        _best, ledger = existence_replay(inst, opt.witness)
        row["replay_ok"] = bool(ledger["ok"])
    return row


def _cmd_bench(args) -> int:
    seeds = _parse_seeds(args.seeds)
    if args.parallel > 1:
        with ProcessPoolExecutor(max_workers=args.parallel) as pool:
            rows = list(pool.map(_bench_one, [args] * len(seeds), seeds))
    else:
        rows = [_bench_one(args, seed) for seed in seeds]
    write_bench_csv(rows, args.out_csv)
    fig_dir = args.fig_dir or os.path.join(
        os.path.dirname(os.path.abspath(args.out_csv)), "figures")
    figures = render_bench_figures(rows, fig_dir)
    _dump({
        "csv": args.out_csv,
        "figures": figures,
        "instances": len(rows),
        "all_verified": all(r["verified"] for r in rows),
    }, None)
    return 0 if all(r["verified"] for r in rows) else 1


def _add_gen_flags(sub, require_seeds=True):
    sub.add_argument("--gen", choices=("grid", "layered"), required=True)
    sub.add_argument("--rows", type=int, default=3)
    sub.add_argument("--cols", type=int, default=3)
    sub.add_argument("--width", type=int, default=3)
    sub.add_argument("--layers", type=int, default=3)
    sub.add_argument("--density", type=float, default=0.6)
    sub.add_argument("--cost-min", type=int, default=1)
    sub.add_argument("--cost-max", type=int, default=9)
    sub.add_argument("--k", type=int, default=3)
    if require_seeds:
        sub.add_argument("--orientation-seed", type=int)
        sub.add_argument("--graph-seed", type=int)
        sub.add_argument("--pair-seed", type=int, required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plandsf",
        description="Directed Steiner forest solver for planar digraphs: "
                    "greedy junction-tree covering with exact-rational LP "
                    "machinery, brute-force oracles, and a proof-replay "
                    "harness.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("gen", help="generate an instance")
    _add_gen_flags(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_gen)

    p = subs.add_parser("solve", help="solve an instance end to end")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--trace", default=None)
    p.add_argument("--dst-strategy", default="exact-fpt",
                   choices=("exact-fpt", "shortest-path-union"))
    p.add_argument("--parallel", type=int, default=_default_parallel())
    p.add_argument("--oracle", action="store_true")
    p.add_argument("--report", default=None)
    p.add_argument("--edge-budget", type=int, default=20)
    p.set_defaults(func=_cmd_solve)

    p = subs.add_parser("junction", help="single min-density junction search")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--dst-strategy", default="exact-fpt",
                   choices=("exact-fpt", "shortest-path-union"))
    p.add_argument("--parallel", type=int, default=_default_parallel())
    p.set_defaults(func=_cmd_junction)

    p = subs.add_parser("oracle", help="brute-force reference results")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--mode", choices=("dsf", "density", "dst"),
                   default="dsf")
    p.add_argument("--edge-budget", type=int, default=18)
    p.add_argument("--root", default=None)
    p.add_argument("--terminals", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_oracle)

    p = subs.add_parser("verify", help="audit a solution independently")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--solution", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_verify)

    p = subs.add_parser("replay-proof",
                        help="replay the existence argument on a solution")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--solution", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_replay)

    p = subs.add_parser("bench", help="batch run over a seed range")
    _add_gen_flags(p, require_seeds=False)
    p.add_argument("--seeds", required=True,
                   help="e.g. 1..30 or a comma list")
    p.add_argument("--oracle", action="store_true")
    p.add_argument("--dst-strategy", default="exact-fpt",
                   choices=("exact-fpt", "shortest-path-union"))
    p.add_argument("--parallel", type=int, default=_default_parallel())
    p.add_argument("--edge-budget", type=int, default=20)
    p.add_argument("--out-csv", required=True)
    p.add_argument("--fig-dir", default=None)
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "gen":
            if args.gen == "grid" and args.orientation_seed is None:
                parser.error("--orientation-seed is required for grid "
                             "generation")
            if args.gen == "layered" and args.graph_seed is None:
                parser.error("--graph-seed is required for layered "
                             "generation")
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry():  # console-script hook
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
