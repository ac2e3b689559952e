"""End-to-end solver: repeatedly buy the cheapest-per-pair junction tree
until every terminal pair is routed, then verify and account for the cost.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .graph import path_cost, reachable_set, shortest_dipath
from .instance import Instance, Solution
from .junction import JunctionTree, min_density_search
from .rational import ONE, Q, ZERO


class PipelineError(RuntimeError):
    pass


@dataclass(frozen=True)
class CoverIteration:
    index: int
    tree: JunctionTree
    remaining_before: int
    newly_covered: frozenset


@dataclass(frozen=True)
class CoverTrace:
    iterations: tuple  # tuple[CoverIteration]

    @property
    def total_cost(self):
        return sum((it.tree.cost for it in self.iterations), ZERO)


def _certificate(g, edges, pair, root) -> tuple:
    """s -> root -> t walk inside the bought edge set, hop-minimal per leg."""
    sub = g.subgraph(edges)
    leg1 = shortest_dipath(sub, pair.s, root, metric="hops")
    leg2 = shortest_dipath(sub, root, pair.t, metric="hops")
    if leg1 is None or leg2 is None:
        raise PipelineError(
            f"junction tree at {root!r} does not route pair {pair.id!r}")
    return tuple(leg1) + tuple(leg2)


def solve_dsf(inst: Instance, strategy: str = "exact-fpt",
              parallel: int = 1) -> tuple:
    """Greedy junction cover. Returns (Solution, CoverTrace).

    Each round finds the minimum-density junction tree over the pairs still
    uncovered, buys its edges, and records routing certificates through its
    root. Terminates because every round covers at least one pair.
    """
    remaining = list(inst.pairs)
    bought = set()
    certificates = {}
    iterations = []
    index = 0
    while remaining:
        sub_inst = inst.with_pairs(remaining)
        state, _ = min_density_search(sub_inst, strategy, parallel)
        tree = state.tree
        if not tree.covered:
            raise PipelineError("junction search returned an empty cover")
        for pid in sorted(tree.covered):
            pair = inst.pair_by_id(pid)
            certificates[pid] = _certificate(inst.graph, tree.edges, pair,
                                             tree.root)
        iterations.append(CoverIteration(index, tree, len(remaining),
                                         tree.covered))
        bought |= tree.edges
        remaining = [p for p in remaining if p.id not in tree.covered]
        index += 1
    cost = path_cost(inst.graph, bought)
    return Solution(frozenset(bought), cost, certificates), CoverTrace(
        tuple(iterations))


@dataclass(frozen=True)
class VerificationReport:
    ok: bool
    problems: tuple

    def __bool__(self):
        return self.ok


def verify_solution(inst: Instance, sol: Solution) -> VerificationReport:
    """Independent audit: edge ids exist, cost re-sums, every pair's sink is
    reachable from its source inside the bought edges, and each certificate
    is a genuine s->t walk using only bought edges."""
    problems = []
    g = inst.graph
    unknown = sorted(e for e in sol.edge_ids if e not in g.edge_by_id)
    if unknown:
        problems.append(f"unknown edge ids: {unknown}")
        return VerificationReport(False, tuple(problems))
    if path_cost(g, sol.edge_ids) != sol.cost:
        problems.append(
            f"cost mismatch: stated {sol.cost}, edges sum to "
            f"{path_cost(g, sol.edge_ids)}")
    sub = g.subgraph(sol.edge_ids)
    for p in inst.pairs:
        if p.s not in sub.vertices or p.t not in reachable_set(
                sub, {p.s}, "forward"):
            problems.append(f"pair {p.id}: {p.t} unreachable from {p.s}")
    for pid, walk in sol.certificates.items():
        try:
            pair = inst.pair_by_id(pid)
        except KeyError:
            problems.append(f"certificate for unknown pair {pid}")
            continue
        at = pair.s
        ok = True
        for eid in walk:
            e = g.edge_by_id.get(eid)
            if e is None or eid not in sol.edge_ids or e.tail != at:
                problems.append(f"certificate for {pid} breaks at {eid}")
                ok = False
                break
            at = e.head
        if ok and at != pair.t:
            problems.append(f"certificate for {pid} ends at {at}, not {pair.t}")
    return VerificationReport(not problems, tuple(problems))


def harmonic(n: int):
    return sum((ONE / i for i in range(1, n + 1)), ZERO)


@dataclass(frozen=True)
class RatioReport:
    cost: object
    accounted_cost: object       # sum over rounds of |covered| * density
    per_round: tuple             # (round, covered, density, charge)
    harmonic_k: object
    opt_cost: object = None      # exact optimum when available
    ratio: object = None

    @property
    def accounting_ok(self) -> bool:
        return self.cost <= self.accounted_cost


def ratio_report(inst: Instance, sol: Solution, trace: CoverTrace,
                 opt_cost=None) -> RatioReport:
    """Greedy accounting: the bought cost never exceeds the per-round charge
    sum, and each round's charge is its cover size times its density."""
    rows = []
    accounted = ZERO
    for it in trace.iterations:
        charge = Q(len(it.newly_covered)) * it.tree.density
        assert charge == it.tree.cost
        accounted += charge
        rows.append((it.index, len(it.newly_covered), it.tree.density, charge))
    ratio = None
    if opt_cost is not None and opt_cost > 0:
        ratio = sol.cost / opt_cost
    return RatioReport(sol.cost, accounted, tuple(rows), harmonic(inst.k),
                       opt_cost, ratio)
