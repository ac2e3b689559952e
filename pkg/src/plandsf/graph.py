"""Directed weighted multigraph and the primitive algorithms built on it.

Vertices and edges carry stable string identifiers. Parallel edges are
legal; self-loops are accepted on input but ignored by all connectivity
logic. Digraph values are immutable and safe to share.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

from .rational import Q, ZERO


class GraphError(ValueError):
    """Invalid input to a graph operation."""


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    cost: object  # exact rational

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head


@dataclass(frozen=True)
class Digraph:
    vertices: frozenset
    edges: tuple
    labels: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for e in self.edges:
            if e.id in seen:
                raise GraphError(f"duplicate edge id {e.id!r}")
            seen.add(e.id)
            if e.tail not in self.vertices or e.head not in self.vertices:
                raise GraphError(f"edge {e.id!r} references undeclared vertex")
            if e.cost < 0:
                raise GraphError(f"edge {e.id!r} has negative cost")

    @staticmethod
    def build(vertices: Iterable[str], edges: Iterable[tuple], labels=None) -> "Digraph":
        """edges: iterable of (id, tail, head, cost); cost coerced via Q."""
        es = tuple(Edge(i, t, h, Q(c) if not isinstance(c, str) else Q(c))
                   for (i, t, h, c) in edges)
        return Digraph(frozenset(vertices), es, labels or {})

    @cached_property
    def edge_by_id(self) -> dict:
        return {e.id: e for e in self.edges}

    @cached_property
    def out_edges(self) -> dict:
        """vertex -> non-loop out-edges, sorted by edge id."""
        adj = {v: [] for v in self.vertices}
        for e in sorted(self.edges, key=lambda e: e.id):
            if not e.is_loop:
                adj[e.tail].append(e)
        return adj

    @cached_property
    def in_edges(self) -> dict:
        adj = {v: [] for v in self.vertices}
        for e in sorted(self.edges, key=lambda e: e.id):
            if not e.is_loop:
                adj[e.head].append(e)
        return adj

    @cached_property
    def sorted_vertices(self) -> tuple:
        return tuple(sorted(self.vertices))

    def total_cost(self):
        return sum((e.cost for e in self.edges), ZERO)

    def subgraph(self, edge_ids: Iterable[str]) -> "Digraph":
        """Graph induced by an edge subset (vertices = endpoints)."""
        es = tuple(self.edge_by_id[i] for i in sorted(set(edge_ids)))
        verts = set()
        for e in es:
            verts.add(e.tail)
            verts.add(e.head)
        return Digraph(frozenset(verts), es)

    def induced(self, verts: Iterable[str]) -> "Digraph":
        """Graph induced by a vertex subset (keeps edges with both ends inside)."""
        vs = frozenset(verts)
        es = tuple(e for e in self.edges if e.tail in vs and e.head in vs)
        return Digraph(vs, es)


@dataclass(frozen=True)
class Cut:
    side: frozenset          # vertex set containing the source side
    crossing_edges: frozenset  # delta^+(side)
    capacity: object         # exact rational


def reachable_set(g: Digraph, sources, direction: str = "forward") -> frozenset:
    """All vertices reachable from (forward) / able to reach (backward) sources."""
    sources = set(sources)
    unknown = sources - g.vertices
    if unknown:
        raise GraphError(f"unknown vertex ids {sorted(unknown)}")
    if direction == "forward":
        adj = g.out_edges
        step = lambda e: e.head
    elif direction == "backward":
        adj = g.in_edges
        step = lambda e: e.tail
    else:
        raise GraphError(f"unknown direction {direction!r}")
    seen = set(sources)
    stack = list(sources)
    while stack:
        v = stack.pop()
        for e in adj[v]:
            w = step(e)
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return frozenset(seen)


def min_cut(g: Digraph, capacities: Mapping[str, object], s: str, t: str) -> Cut:
    """Minimum-capacity s-t cut via Edmonds-Karp on exact rationals.

    The returned side is the set of vertices reachable from s in the final
    residual graph; capacity equals the max-flow value.
    """
    if s == t:
        raise GraphError("min_cut requires s != t")
    if s not in g.vertices or t not in g.vertices:
        raise GraphError("min_cut endpoints must be declared vertices")
    flow = {}
    for e in g.edges:
        cap = capacities.get(e.id, ZERO)
        if cap < 0:
            raise GraphError(f"negative capacity on edge {e.id!r}")
        flow[e.id] = ZERO

    def residual(e):
        return capacities.get(e.id, ZERO) - flow[e.id]

    total = ZERO
    while True:
        # BFS over residual edges; parent[v] = (edge, forward?)
        parent = {s: None}
        queue = [s]
        qi = 0
        while qi < len(queue) and t not in parent:
            v = queue[qi]
            qi += 1
            for e in g.out_edges[v]:
                if e.head not in parent and residual(e) > 0:
                    parent[e.head] = (e, True)
                    queue.append(e.head)
            for e in g.in_edges[v]:
                if e.tail not in parent and flow[e.id] > 0:
                    parent[e.tail] = (e, False)
                    queue.append(e.tail)
        if t not in parent:
            break
        # trace path, find bottleneck
        path = []
        v = t
        while v != s:
            e, fwd = parent[v]
            path.append((e, fwd))
            v = e.tail if fwd else e.head
        bottleneck = min(residual(e) if fwd else flow[e.id] for e, fwd in path)
        for e, fwd in path:
            flow[e.id] = flow[e.id] + bottleneck if fwd else flow[e.id] - bottleneck
        total += bottleneck

    side = set([s])
    stack = [s]
    while stack:
        v = stack.pop()
        for e in g.out_edges[v]:
            if e.head not in side and residual(e) > 0:
                side.add(e.head)
                stack.append(e.head)
        for e in g.in_edges[v]:
            if e.tail not in side and flow[e.id] > 0:
                side.add(e.tail)
                stack.append(e.tail)
    crossing = frozenset(e.id for e in g.edges
                         if not e.is_loop and e.tail in side and e.head not in side)
    return Cut(frozenset(side), crossing, total)


def contract(g: Digraph, block, new_id: str) -> Digraph:
    """Merge a vertex block into a single vertex; drop resulting self-loops."""
    block = set(block)
    if not block:
        raise GraphError("cannot contract an empty block")
    if not block <= g.vertices:
        raise GraphError("block contains undeclared vertices")
    if new_id in g.vertices - block:
        raise GraphError(f"new vertex id {new_id!r} collides with an existing vertex")

    def rename(v):
        return new_id if v in block else v

    verts = frozenset(rename(v) for v in g.vertices)
    es = []
    for e in g.edges:
        tail, head = rename(e.tail), rename(e.head)
        if tail == head == new_id and (e.tail in block and e.head in block):
            continue  # became a loop through the contraction
        es.append(Edge(e.id, tail, head, e.cost))
    return Digraph(verts, tuple(es))


def reverse(g: Digraph) -> Digraph:
    es = tuple(Edge(e.id, e.head, e.tail, e.cost) for e in g.edges)
    return Digraph(g.vertices, es, g.labels)


def weak_components(g: Digraph) -> list:
    """Partition of the vertices by connectivity in the undirected version,
    ordered by smallest member vertex id."""
    seen = set()
    comps = []
    neigh = {v: set() for v in g.vertices}
    for e in g.edges:
        if not e.is_loop:
            neigh[e.tail].add(e.head)
            neigh[e.head].add(e.tail)
    for v in g.sorted_vertices:
        if v in seen:
            continue
        comp = {v}
        stack = [v]
        seen.add(v)
        while stack:
            u = stack.pop()
            for w in neigh[u]:
                if w not in seen:
                    seen.add(w)
                    comp.add(w)
                    stack.append(w)
        comps.append(frozenset(comp))
    return comps


def shortest_dipath(g: Digraph, u: str, v: str, metric: str = "cost") -> Optional[list]:
    """Minimum-metric dipath u -> v as a list of edge ids, or None.

    Ties are broken toward the lexicographically smallest edge-id sequence.
    Label-setting search on labels (dist, edge-id tuple): appending an edge
    strictly increases the label, so the first time a vertex is popped its
    label is final.
    """
    if u not in g.vertices or v not in g.vertices:
        raise GraphError("shortest_dipath endpoints must be declared vertices")
    if metric not in ("cost", "hops"):
        raise GraphError(f"unknown metric {metric!r}")
    start = (ZERO, (), u)
    heap = [start]
    done = set()
    while heap:
        dist, ids, w = heapq.heappop(heap)
        if w in done:
            continue
        done.add(w)
        if w == v:
            return list(ids)
        for e in g.out_edges[w]:
            if e.head in done:
                continue
            step = e.cost if metric == "cost" else Q(1)
            heapq.heappush(heap, (dist + step, ids + (e.id,), e.head))
    return None


def path_cost(g: Digraph, edge_ids: Sequence[str]):
    return sum((g.edge_by_id[i].cost for i in edge_ids), ZERO)
