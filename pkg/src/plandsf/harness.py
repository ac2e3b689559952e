"""Mechanical replay of the structural argument behind the junction-tree
approach: alternating layering of a solution subgraph, explicit witnesses
for 2-layered spanning trees, balanced tree-path separators with recursive
partitioning, the single-path interval construction, and the assembled
existence chain with every inequality evaluated in exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Mapping, Optional, Sequence

from .graph import (Digraph, Edge, contract, path_cost, reachable_set,
                    shortest_dipath, weak_components)
from .instance import Instance, Pair, Solution
from .junction import JunctionTree
from .rational import ONE, Q, ZERO


class HarnessError(RuntimeError):
    pass


def floor_log2(n: int) -> int:
    return max(n, 1).bit_length() - 1


def ceil_log2(n: int) -> int:
    return max(n - 1, 0).bit_length()


def _fresh(taken, base: str) -> str:
    name = base
    while name in taken:
        name += "#"
    return name


# ---------------------------------------------------------------------------
# Dipaths and 2-layered spanning trees


@dataclass(frozen=True)
class Dipath:
    """A directed path, stored as its vertex sequence and edge-id sequence."""
    vertices: tuple
    edges: tuple


@dataclass(frozen=True)
class TwoLayeredTree:
    """Spanning tree of the undirected support whose every root-to-vertex
    path is a concatenation of at most two dipaths of the digraph."""
    graph: Digraph
    root: str
    # vertex -> (parent vertex, edge id, orientation); orientation "away"
    # means the edge is directed parent->child, "toward" child->parent
    parent: Mapping[str, tuple]

    @property
    def tree_edges(self) -> frozenset:
        return frozenset(eid for (_p, eid, _o) in self.parent.values())

    def tree_path_vertices(self, v: str) -> tuple:
        """Vertices of the unique tree path from the root to v."""
        path = [v]
        while path[-1] != self.root:
            path.append(self.parent[path[-1]][0])
        return tuple(reversed(path))

    def decomposition(self, v: str) -> tuple:
        """The root-to-v tree path as <= 2 dipaths of the underlying digraph."""
        steps = []
        cur = v
        while cur != self.root:
            pv, eid, orient = self.parent[cur]
            steps.append((pv, cur, eid, orient))
            cur = pv
        steps.reverse()
        segments = []
        for pv, cv, eid, orient in steps:
            if segments and segments[-1][0] == orient:
                segments[-1][1].append((pv, cv, eid))
            else:
                segments.append((orient, [(pv, cv, eid)]))
        if len(segments) > 2:
            raise HarnessError(
                f"tree path to {v!r} needs {len(segments)} dipaths")
        out = []
        for orient, run in segments:
            verts = [run[0][0]] + [cv for (_p, cv, _e) in run]
            eids = [e for (_p, _c, e) in run]
            if orient == "toward":
                verts.reverse()
                eids.reverse()
            out.append(Dipath(tuple(verts), tuple(eids)))
        return tuple(out)

    def root_dipaths(self, v: str) -> tuple:
        """Dipaths of the root-to-v path with the root vertex removed."""
        out = []
        for dp in self.decomposition(v):
            verts, eids = list(dp.vertices), list(dp.edges)
            if verts and verts[0] == self.root:
                verts, eids = verts[1:], eids[1:]
            elif verts and verts[-1] == self.root:
                verts, eids = verts[:-1], eids[:-1]
            if verts:
                out.append(Dipath(tuple(verts), tuple(eids)))
        return tuple(out)


def _grow_tree(g: Digraph, root: str, first: str) -> Optional[dict]:
    """Two-phase witness construction.

    Phase 1 grows a single-orientation arborescence from the root (`first`
    is "away" for an out-arborescence, "toward" for an in-arborescence);
    phase 2 repeatedly attaches remaining vertices with edges of the
    opposite orientation to the already-built tree. Returns the parent map,
    or None if the two phases do not span the graph.
    """
    parent = {}
    assigned = {root}
    frontier = [root]
    while frontier:
        nxt = []
        for v in frontier:
            if first == "away":
                steps = [(e.head, e) for e in g.out_edges[v]]
            else:
                steps = [(e.tail, e) for e in g.in_edges[v]]
            for w, e in steps:
                if w not in assigned:
                    assigned.add(w)
                    parent[w] = (v, e.id, first)
                    nxt.append(w)
        frontier = nxt
    second = "toward" if first == "away" else "away"
    changed = True
    while changed and assigned != g.vertices:
        changed = False
        for v in sorted(g.vertices - assigned):
            if second == "toward":
                hooks = [e for e in g.out_edges[v] if e.head in assigned]
            else:
                hooks = [e for e in g.in_edges[v] if e.tail in assigned]
            if hooks:
                e = min(hooks, key=lambda e: e.id)
                w = e.head if second == "toward" else e.tail
                parent[v] = (w, e.id, second)
                assigned.add(v)
                changed = True
    return parent if assigned == g.vertices else None


def _validate_two_layered(tree: TwoLayeredTree) -> None:
    g = tree.graph
    if set(tree.parent) != g.vertices - {tree.root}:
        raise HarnessError("witness tree does not span the graph")
    for v in g.sorted_vertices:
        pv_eid = tree.parent.get(v)
        if pv_eid is not None:
            pv, eid, orient = pv_eid
            e = g.edge_by_id[eid]
            want = (pv, v) if orient == "away" else (v, pv)
            if (e.tail, e.head) != want:
                raise HarnessError(f"tree edge {eid!r} orientation mismatch")
        tree.decomposition(v)  # raises if more than 2 dipaths


def build_two_layered_tree(g_j: Digraph, r_j: str) -> TwoLayeredTree:
    """Explicit 2-layered spanning-tree witness.

    Tries the out-arborescence-plus-reverse-attachment form first, then its
    mirror (in-arborescence plus forward attachment). Both layer graphs and
    every contracted sub-instance of the separator recursion are of one of
    these two forms, so one of the attempts always spans.
    """
    if r_j not in g_j.vertices:
        raise HarnessError(f"root {r_j!r} not in graph")
    for first in ("away", "toward"):
        parent = _grow_tree(g_j, r_j, first)
        if parent is not None:
            tree = TwoLayeredTree(g_j, r_j, parent)
            _validate_two_layered(tree)
            return tree
    raise HarnessError(
        f"no 2-layered spanning tree witness found at root {r_j!r}")


# ---------------------------------------------------------------------------
# Layering


@dataclass(frozen=True)
class Layering:
    base: str
    graph: Digraph
    layers: tuple        # tuple of frozensets, disjoint, exhaustive
    layer_graphs: tuple  # tuple of (Digraph, root vertex id)

    @property
    def synthetic_ids(self) -> frozenset:
        """Vertex/edge ids added for the index-0 layer graph's root."""
        ids = set()
        g0, r0 = self.layer_graphs[0]
        ids.add(r0)
        for e in g0.edges:
            if e.tail == r0:
                ids.add(e.id)
        return frozenset(ids)


def compute_layering(e_star: Digraph, v0: str) -> Layering:
    """Alternating reachability layers of a weakly connected digraph.

    Layer 0 is everything reachable from v0; odd layers collect unassigned
    vertices that can reach the previous layer, even layers those reachable
    from it. Layer graph j keeps layers up to j+1 and contracts layers
    below j into a root; for j = 0 a synthetic zero-cost root edge into v0
    stands in for the (empty) contracted part so every layer graph has a
    root disjoint from the pairs' routing.
    """
    if v0 not in e_star.vertices:
        raise HarnessError(f"base vertex {v0!r} not in graph")
    if len(weak_components(e_star)) != 1:
        raise HarnessError(
            "input is not weakly connected; layer each component separately")
    layers = [frozenset(reachable_set(e_star, {v0}, "forward"))]
    assigned = set(layers[0])
    j = 1
    while assigned != set(e_star.vertices):
        direction = "backward" if j % 2 == 1 else "forward"
        cand = frozenset(reachable_set(e_star, layers[-1], direction)) - assigned
        if not cand:
            raise HarnessError("layering stalled before exhausting vertices")
        layers.append(frozenset(cand))
        assigned |= cand
        j += 1
    ell = len(layers) - 1
    layer_graphs = []
    for j in range(max(ell, 1)):
        keep = set()
        for i in range(min(j + 2, len(layers))):
            keep |= layers[i]
        sub = e_star.induced(keep)
        if j == 0:
            root = _fresh(e_star.vertices, "__root0")
            eid = _fresh(set(e_star.edge_by_id), "__root0e")
            g_j = Digraph(sub.vertices | {root},
                          sub.edges + (Edge(eid, root, v0, ZERO),))
        else:
            root = _fresh(e_star.vertices, f"__root{j}")
            block = set()
            for i in range(j):
                block |= layers[i]
            g_j = contract(sub, block, root)
        layer_graphs.append((g_j, root))
    return Layering(v0, e_star, tuple(layers), tuple(layer_graphs))


@dataclass(frozen=True)
class LayeringReport:
    partition_ok: bool
    multiplicity: Mapping[str, int]
    multiplicity_ok: bool
    total_layer_cost: object
    cost_bound: object
    cost_ok: bool
    witnesses: Mapping[str, Optional[int]]  # pair id -> smallest valid j
    pairs_ok: bool

    @property
    def ok(self) -> bool:
        return (self.partition_ok and self.multiplicity_ok and self.cost_ok
                and self.pairs_ok)


def verify_layering(e_star: Digraph, layering: Layering,
                    pairs: Sequence[Pair]) -> LayeringReport:
    """Audits the two layering claims exactly: every original edge shows up
    in at most two layer graphs (so their cost sum is at most twice the
    solution cost), and every pair routes inside two consecutive layers."""
    assigned = set()
    partition_ok = True
    for layer in layering.layers:
        if layer & assigned:
            partition_ok = False
        assigned |= layer
    partition_ok = partition_ok and assigned == set(e_star.vertices)

    synthetic = layering.synthetic_ids
    mult = {e.id: 0 for e in e_star.edges}
    total = ZERO
    for g_j, _root in layering.layer_graphs:
        for e in g_j.edges:
            total += e.cost
            if e.id in mult:
                mult[e.id] += 1
    multiplicity_ok = all(c <= 2 for c in mult.values())
    bound = 2 * e_star.total_cost()

    witnesses = {}
    layers = layering.layers
    spans = []
    for j in range(len(layering.layer_graphs)):
        keep = set(layers[j])
        if j + 1 < len(layers):
            keep |= layers[j + 1]
        spans.append(e_star.induced(keep))
    for p in pairs:
        witnesses[p.id] = None
        for j, span in enumerate(spans):
            if (p.s in span.vertices and p.t in span.vertices
                    and p.t in reachable_set(span, {p.s}, "forward")):
                witnesses[p.id] = j
                break
    pairs_ok = all(w is not None for w in witnesses.values())
    return LayeringReport(partition_ok, mult, multiplicity_ok, total, bound,
                          total <= bound, witnesses, pairs_ok)


# ---------------------------------------------------------------------------
# Balanced tree-path separators and the recursion


def find_separator(g: Digraph, tree: TwoLayeredTree,
                   weights: Mapping[str, object]) -> tuple:
    """First vertex triple, in lexicographic order, whose three root-paths
    disconnect the graph into pieces of at most half the total weight.

    Repeating a vertex inside the triple expresses separators of fewer than
    three paths. Existence is guaranteed for planar inputs with a spanning
    tree; exhaustive search keeps the selection deterministic.
    """
    total = sum((Q(weights.get(v, ZERO)) for v in g.vertices), ZERO)
    half = total / 2
    verts = g.sorted_vertices
    paths = {v: frozenset(tree.tree_path_vertices(v)) for v in verts}
    neigh = {v: set() for v in g.vertices}
    for e in g.edges:
        if not e.is_loop:
            neigh[e.tail].add(e.head)
            neigh[e.head].add(e.tail)

    def balanced(removed) -> bool:
        seen = set(removed)
        for v in verts:
            if v in seen:
                continue
            weight = ZERO
            stack = [v]
            seen.add(v)
            while stack:
                u = stack.pop()
                weight += Q(weights.get(u, ZERO))
                if weight > half:
                    return False
                for w in neigh[u]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
        return True

    for u1, u2, u3 in combinations_with_replacement(verts, 3):
        if balanced(paths[u1] | paths[u2] | paths[u3]):
            return (u1, u2, u3)
    raise HarnessError(
        "no balanced tree-path separator exists; planarity or spanning-tree "
        "precondition violated")


@dataclass(frozen=True)
class ComponentRecord:
    level: int
    graph: Digraph            # sub-instance including its (contracted) root
    root: str
    vertices: frozenset       # component vertices (root excluded)
    triple: tuple
    separator: tuple          # tuple of Dipath, root removed, <= 6
    per_dipath: tuple         # pair-id frozenset routed through each dipath
    captured: frozenset       # union of per_dipath
    children: tuple           # vertex frozensets of next-level components
    weight: int               # terminal count inside this component
    child_weights: tuple


@dataclass(frozen=True)
class SeparatorLevel:
    index: int
    components: tuple  # tuple of ComponentRecord

    @property
    def captured(self) -> frozenset:
        out = set()
        for rec in self.components:
            out |= rec.captured
        return frozenset(out)


def separator_recursion(e_star: Digraph, tree: TwoLayeredTree,
                        pairs: Sequence[Pair]) -> tuple:
    """Recursive separator decomposition of a 2-layered digraph.

    Each level removes three tree root-paths from every live component,
    records which pairs route through the resulting separator dipaths, and
    recurses on sub-instances formed by contracting the separator into the
    root — which keeps every sub-instance 2-layered. Stops when every
    component holds at most one terminal.
    """
    terminals = frozenset(v for p in pairs for v in (p.s, p.t))
    levels = []
    work = [(e_star, tree)]
    level = 0
    cap = ceil_log2(max(len(terminals), 1)) + 4
    while work:
        if level > cap:
            raise HarnessError("separator recursion exceeded its depth bound")
        records = []
        next_work = []
        work.sort(key=lambda item: min(item[0].vertices - {item[1].root}))
        for cg, ct in work:
            root = ct.root
            comp_vertices = frozenset(cg.vertices - {root})
            weights = {v: (ONE if v in terminals else ZERO)
                       for v in cg.vertices}
            weights[root] = ZERO
            weight = sum(1 for v in comp_vertices if v in terminals)
            triple = find_separator(cg, ct, weights)
            sep_paths = []
            sep_path_vertices = set()
            for u in sorted(set(triple)):
                sep_path_vertices |= set(ct.tree_path_vertices(u))
                sep_paths.extend(ct.root_dipaths(u))
            if len(sep_paths) > 6:
                raise HarnessError("separator produced more than 6 dipaths")
            inner = cg.induced(comp_vertices)
            comp_pairs = [p for p in pairs
                          if p.s in comp_vertices and p.t in comp_vertices]
            per_dipath = []
            for dp in sep_paths:
                hits = set()
                for p in comp_pairs:
                    rs = reachable_set(inner, {p.s}, "forward")
                    rt = reachable_set(inner, {p.t}, "backward")
                    if any(x in rs and x in rt for x in dp.vertices):
                        hits.add(p.id)
                per_dipath.append(frozenset(hits))
            captured = frozenset().union(*per_dipath) if per_dipath else frozenset()
            remaining = comp_vertices - sep_path_vertices
            children = weak_components(cg.induced(remaining)) if remaining else []
            child_weights = tuple(sum(1 for v in c if v in terminals)
                                  for c in children)
            records.append(ComponentRecord(
                level, cg, root, comp_vertices, triple, tuple(sep_paths),
                tuple(per_dipath), captured, tuple(children), weight,
                child_weights))
            for child, cw in zip(children, child_weights):
                if cw >= 2:
                    block = (sep_path_vertices | {root}) & cg.vertices
                    sub = contract(cg, block, root).induced(child | {root})
                    next_work.append((sub, build_two_layered_tree(sub, root)))
        levels.append(SeparatorLevel(level, tuple(records)))
        work = next_work
        level += 1
    return tuple(levels)


@dataclass(frozen=True)
class SeparatorReport:
    halving_ok: bool
    depth: int
    depth_bound: int
    depth_ok: bool
    coverage_ok: bool
    level_sizes: tuple
    best_level: int
    best_size: int
    level_bound: object      # k / (ceil(lg k) + 2)
    good_level_ok: bool

    @property
    def ok(self) -> bool:
        return (self.halving_ok and self.depth_ok and self.coverage_ok
                and self.good_level_ok)


def verify_separator_levels(levels: Sequence[SeparatorLevel],
                            pairs: Sequence[Pair]) -> SeparatorReport:
    k = len(pairs)
    halving_ok = all(
        2 * cw <= rec.weight
        for lv in levels for rec in lv.components for cw in rec.child_weights)
    depth = max(lv.index for lv in levels)
    depth_bound = ceil_log2(max(k, 1)) + 1
    sizes = tuple(len(lv.captured) for lv in levels)
    best_level = max(range(len(sizes)), key=lambda i: (sizes[i], -i))
    covered = set()
    for lv in levels:
        covered |= lv.captured
    bound = Q(k) / (ceil_log2(max(k, 1)) + 2)
    return SeparatorReport(
        halving_ok, depth, depth_bound, depth <= depth_bound,
        {p.id for p in pairs} <= covered, sizes, best_level,
        sizes[best_level], bound, Q(sizes[best_level]) >= bound)


# ---------------------------------------------------------------------------
# One-path interval construction


@dataclass(frozen=True)
class IntervalSystem:
    path: Dipath                       # compressed path
    intervals: Mapping[str, tuple]     # pair id -> (a index, b index)
    access_s: Mapping[str, tuple]      # pair id -> edge ids of s -> a path
    access_t: Mapping[str, tuple]      # pair id -> edge ids of b -> t path
    groups: Mapping[tuple, frozenset]  # (bucket j, anchor vertex) -> pair ids
    trees: Mapping[tuple, tuple]       # key -> (edge frozenset, cost, root)
    graph: Digraph                     # compressed restricted solution
    expansion: Mapping[str, tuple]     # synthetic edge -> original edge run


def _avoiding_path(g: Digraph, src: str, dst: str, avoid) -> Optional[list]:
    """Hop-shortest dipath, preferring one that dodges the given vertices."""
    if src == dst:
        return []
    keep = set(g.vertices) - (set(avoid) - {src, dst})
    restricted = g.induced(keep)
    if src in restricted.vertices and dst in restricted.vertices:
        path = shortest_dipath(restricted, src, dst, metric="hops")
        if path is not None:
            return path
    return shortest_dipath(g, src, dst, metric="hops")


def one_path_replay(e_star: Digraph, p: Dipath, pairs: Sequence[Pair]):
    """Interval construction along a dipath: reach points, compression,
    dyadic grouping by interval length with anchored overlap vertices, and
    the induced family of junction trees. Returns the interval system, the
    minimum-density tree (in original edge ids), and the claim report."""
    for i, eid in enumerate(p.edges):
        e = e_star.edge_by_id[eid]
        if (e.tail, e.head) != (p.vertices[i], p.vertices[i + 1]):
            raise HarnessError(f"path edge {eid!r} inconsistent with vertices")
    idx = {v: i for i, v in enumerate(p.vertices)}
    a, b = {}, {}
    for pr in pairs:
        rs = reachable_set(e_star, {pr.s}, "forward")
        rt = reachable_set(e_star, {pr.t}, "backward")
        ai = next((i for i, v in enumerate(p.vertices) if v in rs), None)
        bi = next((i for i in range(len(p.vertices) - 1, -1, -1)
                   if p.vertices[i] in rt), None)
        if ai is None or bi is None or ai > bi:
            raise HarnessError(
                f"pair {pr.id!r} violates the one-path precondition")
        a[pr.id], b[pr.id] = ai, bi

    # trim the path to the span actually touched by reach points
    lo = min(a.values())
    hi = max(b.values())
    t_verts = p.vertices[lo:hi + 1]
    t_edges = p.edges[lo:hi]
    pset = set(t_verts)

    # first-pass access paths, preferring ones that avoid the path interior
    acc_edges = set()
    for pr in pairs:
        va, vb = p.vertices[a[pr.id]], p.vertices[b[pr.id]]
        for src, dst in ((pr.s, va), (vb, pr.t)):
            walk = _avoiding_path(e_star, src, dst, pset)
            if walk is None:
                raise HarnessError(f"no access path for pair {pr.id!r}")
            acc_edges |= set(walk)

    restricted = e_star.subgraph(set(t_edges) | acc_edges)

    # compress runs of path vertices whose only incident edges are the two
    # path edges; reach points and branch vertices are kept
    keep_idx = {0, len(t_verts) - 1}
    keep_idx |= {a[pid] - lo for pid in a}
    keep_idx |= {b[pid] - lo for pid in b}
    terminals = {v for pr in pairs for v in (pr.s, pr.t)}
    keep_idx |= {i for i, v in enumerate(t_verts) if v in terminals}
    path_edge_set = set(t_edges)
    incident = {v: set() for v in restricted.vertices}
    for e in restricted.edges:
        incident[e.tail].add(e.id)
        incident[e.head].add(e.id)
    for i, v in enumerate(t_verts):
        if incident.get(v, set()) - path_edge_set:
            keep_idx.add(i)
    kept = sorted(keep_idx)
    cp_verts, cp_edges, expansion = [t_verts[kept[0]]], [], {}
    new_edges = []
    counter = 0
    for lo_i, hi_i in zip(kept, kept[1:]):
        run = t_edges[lo_i:hi_i]
        if len(run) == 1:
            cp_edges.append(run[0])
        else:
            eid = _fresh(set(e_star.edge_by_id), f"__p{counter}")
            counter += 1
            cost = sum((e_star.edge_by_id[r].cost for r in run), ZERO)
            new_edges.append(Edge(eid, t_verts[lo_i], t_verts[hi_i], cost))
            expansion[eid] = tuple(run)
            cp_edges.append(eid)
        cp_verts.append(t_verts[hi_i])
    off_path = tuple(e for e in restricted.edges if e.id not in path_edge_set)
    kept_verts = {t_verts[i] for i in kept}
    cg_vertices = (set(restricted.vertices) - set(t_verts)) | kept_verts
    cg = Digraph(frozenset(cg_vertices),
                 off_path + tuple(e for e in restricted.edges
                                  if e.id in set(cp_edges))
                 + tuple(new_edges))
    cp = Dipath(tuple(cp_verts), tuple(cp_edges))
    plen = len(cp.edges)

    # recompute access paths and reach points inside the compressed graph
    cidx = {v: i for i, v in enumerate(cp.vertices)}
    cpset = set(cp.vertices)
    access_s, access_t = {}, {}
    for pr in pairs:
        rs = reachable_set(cg, {pr.s}, "forward")
        rt = reachable_set(cg, {pr.t}, "backward")
        ai = next(i for i, v in enumerate(cp.vertices) if v in rs)
        bi = next(i for i in range(len(cp.vertices) - 1, -1, -1)
                  if cp.vertices[i] in rt)
        if (cp.vertices[ai], cp.vertices[bi]) != (
                p.vertices[a[pr.id]], p.vertices[b[pr.id]]):
            raise HarnessError("compression changed a reach point")
        a[pr.id], b[pr.id] = ai, bi
        access_s[pr.id] = tuple(
            _avoiding_path(cg, pr.s, cp.vertices[ai], cpset))
        access_t[pr.id] = tuple(
            _avoiding_path(cg, cp.vertices[bi], pr.t, cpset))

    # dyadic grouping: zero-length intervals anchor at their own vertex,
    # length bucket j anchors at every multiple of 2^(j-1)
    max_j = floor_log2(max(plen, 1)) + 1
    groups = {}
    for pr in pairs:
        length = b[pr.id] - a[pr.id]
        if length == 0:
            groups.setdefault((0, cp.vertices[a[pr.id]]), set()).add(pr.id)
    for j in range(1, max_j + 1):
        step = 2 ** (j - 1)
        members = [pr for pr in pairs
                   if step <= b[pr.id] - a[pr.id] < 2 * step]
        if not members:
            continue
        for ell in range(0, plen + 1, step):
            v = cp.vertices[ell]
            grp = {pr.id for pr in members if a[pr.id] <= ell <= b[pr.id]}
            if grp:
                groups[(j, v)] = grp
    groups = {key: frozenset(val) for key, val in groups.items()}

    trees = {}
    overlap_ok = True
    for (j, v), members in sorted(groups.items()):
        a_start = min(a[pid] for pid in members)
        b_end = max(b[pid] for pid in members)
        edges = set(cp.edges[a_start:b_end])
        for pid in members:
            edges |= set(access_s[pid]) | set(access_t[pid])
        h = cg.subgraph(edges) if edges else cg.induced({v})

        def _reaches(src, dst):
            if src == dst:
                return True
            if src not in h.vertices or dst not in h.vertices:
                return False
            return dst in reachable_set(h, {src}, "forward")

        for pid in sorted(members):
            pr = next(q for q in pairs if q.id == pid)
            if not (_reaches(pr.s, v) and _reaches(v, pr.t)):
                overlap_ok = False
        trees[(j, v)] = (frozenset(edges), path_cost(cg, edges), v)

    # claim report
    log_p = floor_log2(max(plen, 1))
    on_bound = 5 * log_p + 6
    off_bound = 10 * log_p + 12
    on_counts = {e: sum(1 for (_k, (edges, _c, _r)) in trees.items()
                        if e in edges) for e in cp.edges}
    off_counts = {e.id: sum(1 for (_k, (edges, _c, _r)) in trees.items()
                            if e.id in edges)
                  for e in cg.edges if e.id not in set(cp.edges)}
    grouped = set()
    for members in groups.values():
        grouped |= members
    disjoint_ok = True
    for pr in pairs:
        vs_i = {e_star_v for eid in access_s[pr.id]
                for e_star_v in (cg.edge_by_id[eid].tail,
                                 cg.edge_by_id[eid].head)} or {
            cp.vertices[a[pr.id]]}
        vt_i = {v for eid in access_t[pr.id]
                for v in (cg.edge_by_id[eid].tail, cg.edge_by_id[eid].head)
                } or {cp.vertices[b[pr.id]]}
        for qr in pairs:
            if qr.id <= pr.id:
                continue
            vs_q = {v for eid in access_s[qr.id]
                    for v in (cg.edge_by_id[eid].tail,
                              cg.edge_by_id[eid].head)} or {
                cp.vertices[a[qr.id]]}
            vt_q = {v for eid in access_t[qr.id]
                    for v in (cg.edge_by_id[eid].tail,
                              cg.edge_by_id[eid].head)} or {
                cp.vertices[b[qr.id]]}
            if vs_i & vs_q and a[pr.id] != a[qr.id]:
                disjoint_ok = False
            if vt_i & vt_q and b[pr.id] != b[qr.id]:
                disjoint_ok = False

    total_tree_cost = sum((c for (_e, c, _r) in trees.values()), ZERO)
    e_star_cost = cg.total_cost()
    best_key = min(
        trees,
        key=lambda key: (trees[key][1] / len(groups[key]), trees[key][2],
                         tuple(sorted(trees[key][0]))))
    best_edges, best_cost, best_root = trees[best_key]
    expanded = set()
    for eid in best_edges:
        expanded.update(expansion.get(eid, (eid,)))
    best = JunctionTree(best_root, frozenset(expanded), groups[best_key],
                        best_cost, best_cost / len(groups[best_key]))

    report = {
        "path_edges": plen,
        "pair_count": len(pairs),
        "compression_ok": plen <= 2 * len(pairs),
        "group_coverage_ok": grouped == {pr.id for pr in pairs},
        "overlap_ok": overlap_ok,
        "access_disjoint_ok": disjoint_ok,
        "on_path_bound": on_bound,
        "on_path_max": max(on_counts.values(), default=0),
        "on_path_ok": all(c <= on_bound for c in on_counts.values()),
        "off_path_bound": off_bound,
        "off_path_max": max(off_counts.values(), default=0),
        "off_path_ok": all(c <= off_bound for c in off_counts.values()),
        "total_tree_cost": total_tree_cost,
        "solution_cost": e_star_cost,
        "cost_sum_ok": total_tree_cost <= Q(off_bound) * e_star_cost,
        "best_density": best.density,
        "average_density": total_tree_cost / len(pairs),
        "averaging_ok": best.density <= total_tree_cost / len(pairs),
    }
    report["ok"] = all(report[key] for key in (
        "group_coverage_ok", "overlap_ok", "access_disjoint_ok",
        "on_path_ok", "off_path_ok", "cost_sum_ok", "averaging_ok"))
    system = IntervalSystem(
        cp, {pid: (a[pid], b[pid]) for pid in a}, access_s, access_t,
        groups, trees, cg, expansion)
    return system, best, report


# ---------------------------------------------------------------------------
# Full existence chain


def existence_replay(inst: Instance, e_star: Solution):
    """End-to-end replay on a concrete feasible solution: layering, choice
    of a dense layer graph, separator recursion, choice of a dense level,
    component, and dipath, then the one-path construction. Returns the
    resulting junction tree plus a ledger with every inequality of the
    chain evaluated exactly, including the fully explicit final constant."""
    g = inst.graph
    unknown = [e for e in e_star.edge_ids if e not in g.edge_by_id]
    if unknown:
        raise HarnessError(f"solution references unknown edges {unknown}")
    sol_graph = g.subgraph(e_star.edge_ids)
    for p in inst.pairs:
        if (p.s not in sol_graph.vertices
                or p.t not in reachable_set(sol_graph, {p.s}, "forward")):
            raise HarnessError(f"solution infeasible for pair {p.id!r}")
    k = inst.k
    opt_cost = sol_graph.total_cost()

    comps = weak_components(sol_graph)
    candidates = []  # (ratio, comp min vertex, j, payload)
    layer_reports = []
    for comp in comps:
        comp_graph = sol_graph.induced(comp)
        comp_pairs = [p for p in inst.pairs if p.s in comp]
        if not comp_pairs:
            continue
        if any(p.t not in comp for p in comp_pairs):
            raise HarnessError("pair straddles weak components")
        v0 = min(comp)
        layering = compute_layering(comp_graph, v0)
        rep = verify_layering(comp_graph, layering, comp_pairs)
        layer_reports.append(rep)
        buckets = {}
        for p in comp_pairs:
            j = rep.witnesses[p.id]
            if j is None:
                raise HarnessError(f"pair {p.id!r} has no two-layer witness")
            buckets.setdefault(j, []).append(p)
        for j, bucket in sorted(buckets.items()):
            g_j, root_j = layering.layer_graphs[j]
            ratio = g_j.total_cost() / len(bucket)
            candidates.append((ratio, v0, j, (g_j, root_j, tuple(bucket))))
    if not candidates:
        raise HarnessError("no terminal pairs to replay")
    ratio, _v0, j_pick, (g_j, root_j, d_j) = min(
        candidates, key=lambda c: (c[0], c[1], c[2]))
    ledger = {
        "solution_cost": opt_cost,
        "k": k,
        "layering_cost_ok": all(r.cost_ok for r in layer_reports),
        "layering_multiplicity_ok": all(
            r.multiplicity_ok for r in layer_reports),
        "layering_pairs_ok": all(r.pairs_ok for r in layer_reports),
        "layer_graph_index": j_pick,
        "layer_graph_cost": g_j.total_cost(),
        "layer_pairs": len(d_j),
        "layer_ratio": ratio,
        "layer_ratio_bound": 2 * opt_cost / k,
    }
    ledger["layer_ratio_ok"] = ratio <= ledger["layer_ratio_bound"]

    tree = build_two_layered_tree(g_j, root_j)
    levels = separator_recursion(g_j, tree, d_j)
    sep_rep = verify_separator_levels(levels, d_j)
    kd = len(d_j)
    ledger.update({
        "separator_halving_ok": sep_rep.halving_ok,
        "separator_depth": sep_rep.depth,
        "separator_depth_bound": sep_rep.depth_bound,
        "separator_depth_ok": sep_rep.depth_ok,
        "separator_coverage_ok": sep_rep.coverage_ok,
        "level_index": sep_rep.best_level,
        "level_size": sep_rep.best_size,
        "level_size_bound": sep_rep.level_bound,
        "level_size_ok": sep_rep.good_level_ok,
    })

    level = levels[sep_rep.best_level]
    d_star_level = sep_rep.best_size
    comp_candidates = []
    for rec in level.components:
        if rec.captured:
            comp_candidates.append(
                (rec.graph.induced(rec.vertices).total_cost()
                 / len(rec.captured), min(rec.vertices), rec))
    comp_ratio, _mv, rec = min(comp_candidates, key=lambda c: (c[0], c[1]))
    comp_graph = rec.graph.induced(rec.vertices)
    ledger["component_cost"] = comp_graph.total_cost()
    ledger["component_pairs"] = len(rec.captured)
    ledger["component_ratio"] = comp_ratio
    ledger["component_ratio_bound"] = (
        ledger["layer_graph_cost"] / d_star_level)
    ledger["component_ratio_ok"] = (
        comp_ratio <= ledger["component_ratio_bound"])

    qi = max(range(len(rec.separator)),
             key=lambda i: (len(rec.per_dipath[i]), -i))
    q = rec.separator[qi]
    d_star_ids = rec.per_dipath[qi]
    d_star = tuple(p for p in d_j if p.id in d_star_ids)
    ledger["dipath_pairs"] = len(d_star)
    ledger["dipath_fraction_ok"] = 6 * len(d_star) >= len(rec.captured)

    system, best, op_report = one_path_replay(comp_graph, q, d_star)
    ledger["one_path"] = op_report
    ledger["one_path_ok"] = op_report["ok"]

    # the assembled explicit constant
    const = 2 * 6 * (ceil_log2(max(k, 1)) + 2) * (
        10 * floor_log2(2 * k) + 12)
    bound = Q(const) * opt_cost / k
    ledger["final_constant"] = const
    ledger["final_bound"] = bound
    ledger["density"] = best.density
    ledger["final_ok"] = best.density <= bound

    # independent junction audit on the original graph
    h = g.subgraph(best.edges)

    def _reaches(src, dst):
        if src == dst:
            return True
        if src not in h.vertices or dst not in h.vertices:
            return False
        return dst in reachable_set(h, {src}, "forward")

    valid = all(_reaches(p.s, best.root) and _reaches(best.root, p.t)
                for p in d_star if p.id in best.covered)
    ledger["junction_valid_ok"] = valid and best.edges <= frozenset(
        e_star.edge_ids)
    ledger["ok"] = all(bool(ledger[key]) for key in (
        "layering_cost_ok", "layering_multiplicity_ok", "layering_pairs_ok",
        "layer_ratio_ok", "separator_halving_ok", "separator_depth_ok",
        "separator_coverage_ok", "level_size_ok", "component_ratio_ok",
        "dipath_fraction_ok", "one_path_ok", "final_ok", "junction_valid_ok"))
    return best, ledger
