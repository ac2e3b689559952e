"""Problem instances: data model, JSON format, validation, generators.

Instance JSON:
  { "vertices": [str],
    "edges": [{"id": str, "tail": str, "head": str, "cost": str|int}],
    "pairs": [{"id": str, "s": str, "t": str}] }
Costs are exact: integers, decimal strings, or "p/q".

Solution JSON:
  { "edges": [edge-id], "cost": str, "certificates": {pair-id: [edge-id]} }
"""

from __future__ import annotations

import json
import random
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .graph import Digraph, Edge, GraphError, path_cost, reachable_set
from .rational import Q, ZERO, rat_str


class ParseError(ValueError):
    """Malformed instance/solution document. Carries the offending field."""

    def __init__(self, message: str, field_path: str = ""):
        super().__init__(f"{field_path}: {message}" if field_path else message)
        self.field_path = field_path


class GenerationError(RuntimeError):
    """Generator could not satisfy its feasibility requirements."""


@dataclass(frozen=True)
class Pair:
    id: str
    s: str
    t: str


@dataclass(frozen=True)
class Instance:
    graph: Digraph
    pairs: tuple  # tuple[Pair]

    def __post_init__(self):
        if not self.pairs:
            raise ParseError("instance needs at least one terminal pair", "pairs")
        seen = set()
        for p in self.pairs:
            if p.id in seen:
                raise ParseError(f"duplicate pair id {p.id!r}", "pairs")
            seen.add(p.id)
            if p.s not in self.graph.vertices or p.t not in self.graph.vertices:
                raise ParseError(f"pair {p.id!r} references unknown vertex", "pairs")
            if p.s == p.t:
                raise ParseError(f"pair {p.id!r} has s == t", "pairs")

    @property
    def k(self) -> int:
        return len(self.pairs)

    def with_pairs(self, pairs) -> "Instance":
        return Instance(self.graph, tuple(pairs))

    def pair_by_id(self, pid: str) -> Pair:
        for p in self.pairs:
            if p.id == pid:
                return p
        raise KeyError(pid)


@dataclass(frozen=True)
class Solution:
    edge_ids: frozenset
    cost: object
    certificates: Mapping[str, tuple] = field(default_factory=dict)


@dataclass(frozen=True)
class FeasibilityReport:
    reachable: Mapping[str, bool]  # pair-id -> t reachable from s

    @property
    def feasible(self) -> bool:
        return all(self.reachable.values())

    @property
    def unreachable_pairs(self) -> list:
        return sorted(p for p, ok in self.reachable.items() if not ok)


def parse_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("document must be a JSON object")
    verts = doc.get("vertices")
    if not isinstance(verts, list) or not all(isinstance(v, str) for v in verts):
        raise ParseError("must be a list of strings", "vertices")
    vset = set(verts)
    edges = []
    for idx, item in enumerate(doc.get("edges", [])):
        where = f"edges[{idx}]"
        for key in ("id", "tail", "head", "cost"):
            if key not in item:
                raise ParseError(f"missing field {key!r}", where)
        if item["tail"] not in vset or item["head"] not in vset:
            raise ParseError("unknown vertex", where)
        try:
            cost = Q(item["cost"]) if not isinstance(item["cost"], int) else Q(item["cost"])
        except (ValueError, TypeError) as exc:
            raise ParseError(f"bad cost: {exc}", where) from exc
        if cost < 0:
            raise ParseError("negative cost", where)
        edges.append(Edge(item["id"], item["tail"], item["head"], cost))
    pairs = []
    for idx, item in enumerate(doc.get("pairs", [])):
        where = f"pairs[{idx}]"
        for key in ("id", "s", "t"):
            if key not in item:
                raise ParseError(f"missing field {key!r}", where)
        if item["s"] not in vset or item["t"] not in vset:
            raise ParseError("unknown vertex", where)
        if item["s"] == item["t"]:
            # trivially satisfied by the empty subgraph
            warnings.warn(f"stripping degenerate pair {item['id']!r} (s == t)")
            continue
        pairs.append(Pair(item["id"], item["s"], item["t"]))
    if not pairs:
        raise ParseError("no non-degenerate terminal pairs", "pairs")
    try:
        graph = Digraph(frozenset(vset), tuple(edges))
    except GraphError as exc:
        raise ParseError(str(exc), "edges") from exc
    return Instance(graph, tuple(pairs))


def _cost_str(cost) -> str:
    # integers as "n"; exact decimals where the denominator allows; else "p/q"
    if cost.denominator == 1:
        return str(cost.numerator)
    den = int(cost.denominator)
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den == 1:
        shift = max(twos, fives)
        scaled = int(cost.numerator) * 10 ** shift // int(cost.denominator)
        text = f"{scaled:0{shift + 1}d}"
        return f"{text[:-shift]}.{text[-shift:]}" if shift else text
    return rat_str(cost)


def serialize_instance(inst: Instance) -> str:
    doc = {
        "vertices": sorted(inst.graph.vertices),
        "edges": [
            {"id": e.id, "tail": e.tail, "head": e.head, "cost": _cost_str(e.cost)}
            for e in sorted(inst.graph.edges, key=lambda e: e.id)
        ],
        "pairs": [{"id": p.id, "s": p.s, "t": p.t} for p in inst.pairs],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def serialize_solution(sol: Solution) -> str:
    doc = {
        "edges": sorted(sol.edge_ids),
        "cost": rat_str(sol.cost),
        "certificates": {pid: list(walk) for pid, walk in sorted(sol.certificates.items())},
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def parse_solution(text: str) -> Solution:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc
    edges = frozenset(doc.get("edges", []))
    cost = Q(doc["cost"]) if not isinstance(doc.get("cost"), int) else Q(doc["cost"])
    certs = {pid: tuple(walk) for pid, walk in doc.get("certificates", {}).items()}
    return Solution(edges, cost, certs)


def validate(inst: Instance) -> FeasibilityReport:
    report = {}
    for p in inst.pairs:
        fwd = reachable_set(inst.graph, {p.s}, "forward")
        report[p.id] = p.t in fwd
    return FeasibilityReport(report)


def _sample_pairs(graph: Digraph, k: int, rng: random.Random, max_rejects: int = 50000):
    verts = sorted(graph.vertices)
    reach_cache = {}
    pairs = []
    rejects = 0
    while len(pairs) < k:
        if rejects > max_rejects:
            raise GenerationError(
                f"could not find {k} reachable pairs after {max_rejects} rejections")
        s = rng.choice(verts)
        t = rng.choice(verts)
        if s == t:
            rejects += 1
            continue
        if s not in reach_cache:
            reach_cache[s] = reachable_set(graph, {s}, "forward")
        if t not in reach_cache[s]:
            rejects += 1
            continue
        pairs.append(Pair(f"p{len(pairs)}", s, t))
    return tuple(pairs)


def gen_grid(rows: int, cols: int, orientation_seed: int, cost_range,
             k: int, pair_seed: int) -> Instance:
    """Planar grid digraph with seeded edge orientations and integer costs."""
    if rows < 2 or cols < 2:
        raise GenerationError("gen_grid needs rows, cols >= 2")
    if k < 1:
        raise GenerationError("gen_grid needs k >= 1")
    lo, hi = int(cost_range[0]), int(cost_range[1])
    rng = random.Random(orientation_seed)
    width = max(len(str(rows - 1)), len(str(cols - 1)))

    def vid(r, c):
        return f"r{r:0{width}d}c{c:0{width}d}"

    verts = [vid(r, c) for r in range(rows) for c in range(cols)]
    edges = []

    def add_directed(tail, head):
        edges.append((f"e{len(edges):04d}", tail, head, rng.randint(lo, hi)))

    for r in range(rows):
        for c in range(cols):
            for (r2, c2) in ((r, c + 1), (r + 1, c)):
                if r2 >= rows or c2 >= cols:
                    continue
                u, v = vid(r, c), vid(r2, c2)
                pick = rng.randrange(3)  # forward / backward / both
                if pick == 0:
                    add_directed(u, v)
                elif pick == 1:
                    add_directed(v, u)
                else:
                    add_directed(u, v)
                    add_directed(v, u)
    graph = Digraph.build(verts, edges)
    pairs = _sample_pairs(graph, k, random.Random(pair_seed))
    return Instance(graph, pairs)


def gen_layered_random(width: int, layers: int, density: float, graph_seed: int,
                       pair_seed: int, k: int) -> Instance:
    """Stacked alternating-direction paths with seeded connector edges.

    Planar by construction (subgraph of a grid). Row i is a dipath oriented
    left-to-right for even i, right-to-left for odd i; connectors between
    adjacent rows alternate direction by row parity, which produces the long
    forward/backward reachability chains the layering decomposition targets.
    """
    if width < 1 or layers < 1:
        raise GenerationError("gen_layered_random needs width, layers >= 1")
    if k < 1:
        raise GenerationError("gen_layered_random needs k >= 1")
    rng = random.Random(graph_seed)
    w = max(len(str(layers - 1)), len(str(width - 1)))

    def vid(i, j):
        return f"l{i:0{w}d}n{j:0{w}d}"

    verts = [vid(i, j) for i in range(layers) for j in range(width)]
    edges = []

    def add_directed(tail, head):
        edges.append((f"e{len(edges):04d}", tail, head, rng.randint(1, 10)))

    for i in range(layers):
        for j in range(width - 1):
            if i % 2 == 0:
                add_directed(vid(i, j), vid(i, j + 1))
            else:
                add_directed(vid(i, j + 1), vid(i, j))
    for i in range(layers - 1):
        picked_any = False
        for j in range(width):
            if rng.random() >= density and picked_any:
                continue
            picked_any = True
            if i % 2 == 0:
                add_directed(vid(i + 1, j), vid(i, j))
            else:
                add_directed(vid(i, j), vid(i + 1, j))
    graph = Digraph.build(verts, edges)
    pairs = _sample_pairs(graph, k, random.Random(pair_seed))
    return Instance(graph, pairs)


def solution_from_edges(graph: Digraph, edge_ids, certificates=None) -> Solution:
    edge_ids = frozenset(edge_ids)
    cost = sum((graph.edge_by_id[i].cost for i in edge_ids), ZERO)
    return Solution(edge_ids, cost, certificates or {})
