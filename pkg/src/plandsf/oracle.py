"""Exact ground-truth solvers for desk-scale instances.

These are deliberately brute force (subset enumeration, subset DP) and are
used as the reference point for approximation-ratio and density checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .graph import Digraph, path_cost, reachable_set, shortest_dipath
from .instance import Instance, Solution, solution_from_edges, validate
from .rational import Q, ZERO


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleResult:
    opt_cost: object
    witness: Solution
    explored: int


@dataclass(frozen=True)
class DensityOracleResult:
    root: str
    covered: frozenset  # pair ids
    cost: object
    density: object
    edges: frozenset = frozenset()  # witness edge ids


def _subset_reach(adj, sources):
    seen = set(sources)
    stack = list(sources)
    while stack:
        v = stack.pop()
        for w in adj.get(v, ()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def _adjacency(edges):
    adj = {}
    for e in edges:
        if not e.is_loop:
            adj.setdefault(e.tail, []).append(e.head)
    return adj


def brute_force_dsf(inst: Instance, edge_budget: int = 20) -> OracleResult:
    """Exact minimum-cost feasible edge subset by enumeration.

    Subsets are scanned in nondecreasing cardinality with running-cost
    pruning; ties resolve to the first subset found (smallest cardinality,
    then lexicographically smallest edge-id tuple).
    """
    g = inst.graph
    edges = sorted(g.edges, key=lambda e: e.id)
    if len(edges) > edge_budget:
        raise OracleError(
            f"instance has {len(edges)} edges, over the budget of {edge_budget}")
    report = validate(inst)
    if not report.feasible:
        raise OracleError(
            f"infeasible instance; unreachable pairs {report.unreachable_pairs}")
    best_cost = None
    best_edges = None
    explored = 0
    targets = [(p.s, p.t) for p in inst.pairs]
    for size in range(1, len(edges) + 1):
        for combo in combinations(edges, size):
            explored += 1
            cost = sum((e.cost for e in combo), ZERO)
            if best_cost is not None and cost >= best_cost:
                continue
            adj = _adjacency(combo)
            if all(t in _subset_reach(adj, {s}) for s, t in targets):
                best_cost = cost
                best_edges = combo
    assert best_edges is not None  # feasibility checked above
    witness_ids = frozenset(e.id for e in best_edges)
    sub = g.subgraph(witness_ids)
    certs = {}
    for p in inst.pairs:
        walk = shortest_dipath(sub, p.s, p.t, "hops")
        assert walk is not None
        certs[p.id] = tuple(walk)
    return OracleResult(best_cost, Solution(witness_ids, best_cost, certs), explored)


def exact_dst(g: Digraph, root: str, terminals, terminal_budget: int = 16) -> Solution:
    """Optimal directed Steiner tree via Dreyfus-Wagner on the metric closure.

    A minimal feasible DST solution is an out-arborescence, so subset DP over
    terminal sets with a single closure-relaxation pass per set is exact.
    """
    terminals = sorted(set(terminals) - {root})
    if len(terminals) > terminal_budget:
        raise OracleError(
            f"{len(terminals)} terminals exceed the budget of {terminal_budget}")
    if not terminals:
        return Solution(frozenset(), ZERO, {})
    fwd = reachable_set(g, {root}, "forward")
    for t in terminals:
        if t not in fwd:
            raise OracleError(f"terminal {t!r} is not reachable from the root")

    dist = _metric_closure(g)
    verts = g.sorted_vertices
    full = (1 << len(terminals)) - 1
    INF = None
    # dp[mask][v]: cheapest arborescence rooted at v covering terminal mask
    dp = {}
    choice = {}
    for i, t in enumerate(terminals):
        mask = 1 << i
        dp[mask] = {v: dist[v].get(t) for v in verts}
        choice[mask] = {v: ("leaf", t) for v in verts}
    for mask in range(1, full + 1):
        if mask in dp:
            continue
        merged = {}
        pick = {}
        sub = (mask - 1) & mask
        while sub:
            rest = mask ^ sub
            if sub < rest or (sub == rest):  # visit each split once
                for v in verts:
                    a, b = dp[sub][v], dp[rest][v]
                    if a is None or b is None:
                        continue
                    cand = a + b
                    if v not in merged or cand < merged[v]:
                        merged[v] = cand
                        pick[v] = ("merge", sub)
            sub = (sub - 1) & mask
        row = {}
        ch = {}
        for v in verts:
            best = merged.get(v)
            how = pick.get(v)
            for u in verts:
                d = dist[v].get(u)
                m = merged.get(u)
                if d is None or m is None or u == v:
                    continue
                cand = d + m
                if best is None or cand < best:
                    best = cand
                    how = ("ext", u)
            row[v] = best
            ch[v] = how
        dp[mask] = row
        choice[mask] = ch

    edge_ids = set()

    def expand(mask, v):
        how = choice[mask][v]
        kind = how[0]
        if kind == "leaf":
            t = how[1]
            if t != v:
                edge_ids.update(shortest_dipath(g, v, t, "cost"))
        elif kind == "merge":
            sub = how[1]
            expand(sub, v)
            expand(mask ^ sub, v)
        else:  # ext
            u = how[1]
            edge_ids.update(shortest_dipath(g, v, u, "cost"))
            expand(mask, u)

    opt = dp[full][root]
    assert opt is not None
    expand(full, root)
    cost = path_cost(g, edge_ids)
    assert cost == opt, "expanded tree cost must equal the DP optimum"
    return Solution(frozenset(edge_ids), cost, {})


def _metric_closure(g: Digraph):
    """All-pairs shortest dipath costs; dist[u][v] absent when unreachable."""
    if "_closure" in g.__dict__:
        return g.__dict__["_closure"]
    dist = {u: {u: ZERO} for u in g.vertices}
    for e in g.edges:
        if e.is_loop:
            continue
        row = dist[e.tail]
        if e.head not in row or e.cost < row[e.head]:
            row[e.head] = e.cost
    for w in g.sorted_vertices:
        dw = dist[w]
        for u in g.sorted_vertices:
            du = dist[u]
            duw = du.get(w)
            if duw is None or u == w:
                continue
            for v, dwv in dw.items():
                cand = duw + dwv
                if v not in du or cand < du[v]:
                    du[v] = cand
    g.__dict__["_closure"] = dist
    return dist


def brute_force_min_density_junction(inst: Instance, edge_budget: int = 18) -> DensityOracleResult:
    """Exact minimum density over all (edge subset, root) junction structures.

    Ties: smaller density, then larger covered set, then lexicographically
    smallest edge-id set, then smallest root id.
    """
    g = inst.graph
    edges = sorted(g.edges, key=lambda e: e.id)
    if len(edges) > edge_budget:
        raise OracleError(
            f"instance has {len(edges)} edges, over the budget of {edge_budget}")
    k = inst.k
    best = None  # (density, -covered, edge ids, root, cost, covered set)
    for size in range(1, len(edges) + 1):
        for combo in combinations(edges, size):
            cost = sum((e.cost for e in combo), ZERO)
            if best is not None and cost / k > best[0]:
                continue
            adj = _adjacency(combo)
            radj = {}
            roots = set()
            for e in combo:
                if not e.is_loop:
                    radj.setdefault(e.head, []).append(e.tail)
                    roots.add(e.tail)
                    roots.add(e.head)
            for r in sorted(roots):
                fwd = _subset_reach(adj, {r})
                back = _subset_reach(radj, {r})
                covered = frozenset(
                    p.id for p in inst.pairs if p.s in back and p.t in fwd)
                if not covered:
                    continue
                density = cost / len(covered)
                key = (density, -len(covered),
                       tuple(sorted(e.id for e in combo)), r)
                if best is None or key < best[:4]:
                    best = (*key, cost, covered)
    if best is None:
        raise OracleError("no root covers any pair with the available edges")
    density, _negcov, edge_ids, root, cost, covered = best
    return DensityOracleResult(root, covered, cost, density,
                               frozenset(edge_ids))


def dst_lp_lower_bound(g: Digraph, root: str, terminals):
    """Optimal value of the cut-based DST relaxation; a lower bound on exact_dst."""
    from .lp import solve_dst_lp

    return solve_dst_lp(g, root, terminals).objective
