"""Pluggable rooted Steiner tree solver with LP-bound accounting.

Two strategies: "exact-fpt" (subset DP, optimal, terminal budget 16) and
"shortest-path-union" (union of shortest root paths, a |terminals|-
approximation fallback for larger terminal sets). Every result records the
cut-relaxation lower bound and the measured approximation factor; the bound
is computed lazily because most callers only need it for the winning root.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .graph import Digraph, path_cost, reachable_set, reverse, shortest_dipath
from .oracle import OracleError, exact_dst
from .rational import ONE, ZERO

STRATEGIES = ("exact-fpt", "shortest-path-union")


@dataclass
class DstResult:
    edges: frozenset
    cost: object
    strategy: str
    graph: Digraph          # graph the solve ran on (already reversed for in-trees)
    root: str
    terminals: frozenset

    @cached_property
    def lp_bound(self):
        from .lp import solve_dst_lp

        return solve_dst_lp(self.graph, self.root, self.terminals).objective

    @cached_property
    def alpha(self):
        if self.lp_bound == 0:
            assert self.cost == 0
            return ONE
        return self.cost / self.lp_bound


def dst_solve(g: Digraph, root: str, terminals, strategy: str = "exact-fpt") -> DstResult:
    terminals = frozenset(terminals)
    if not terminals:
        raise OracleError("dst_solve requires at least one terminal")
    if strategy not in STRATEGIES:
        raise OracleError(f"unknown strategy {strategy!r}")
    fwd = reachable_set(g, {root}, "forward")
    missing = sorted(t for t in terminals if t not in fwd)
    if missing:
        raise OracleError(f"terminals not reachable from root: {missing}")
    if strategy == "exact-fpt":
        sol = exact_dst(g, root, terminals)
        edges = sol.edge_ids
    else:
        edges = set()
        for t in sorted(terminals - {root}):
            edges.update(shortest_dipath(g, root, t, "cost"))
        edges = frozenset(edges)
    return DstResult(edges, path_cost(g, edges), strategy, g, root, terminals)


def dst_solve_reversed(g: Digraph, root: str, sources, strategy: str = "exact-fpt") -> DstResult:
    """In-arborescence union: every source reaches the root over the result.

    Equivalent to dst_solve on the reversed graph; edge ids are shared with
    g, so the edge set reads directly as an in-tree of g.
    """
    return dst_solve(reverse(g), root, sources, strategy)
