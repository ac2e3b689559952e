"""Instance model: parsing, serialization, validation, generators."""

import json

import pytest

from plandsf.instance import (GenerationError, ParseError, Solution, gen_grid,
                              gen_layered_random, parse_instance,
                              parse_solution, serialize_instance,
                              serialize_solution, solution_from_edges,
                              validate)
from plandsf.rational import Q
from tests.conftest import PATH3_JSON, TRIANGLE_JSON


def test_parse_serialize_round_trip():
    inst = parse_instance(TRIANGLE_JSON)
    again = parse_instance(serialize_instance(inst))
    assert again.graph.vertices == inst.graph.vertices
    # the serializer writes edges in id order; compare as sets
    assert sorted((e.id, e.tail, e.head, e.cost) for e in again.graph.edges) \
        == sorted((e.id, e.tail, e.head, e.cost) for e in inst.graph.edges)
    assert sorted(again.pairs, key=lambda p: p.id) == \
        sorted(inst.pairs, key=lambda p: p.id)


def test_serialize_is_deterministic():
    inst = parse_instance(TRIANGLE_JSON)
    assert serialize_instance(inst) == serialize_instance(inst)


def test_parse_accepts_rational_costs():
    doc = json.loads(PATH3_JSON)
    doc["edges"][0]["cost"] = "7/3"
    inst = parse_instance(json.dumps(doc))
    assert inst.graph.edge_by_id["e1"].cost == Q(7, 3)


def test_parse_rejects_malformed_documents():
    for mutate in (
            lambda d: d.pop("vertices"),
            lambda d: d["edges"].append(d["edges"][0]),             # dup id
            lambda d: d["pairs"].append(d["pairs"][0]),             # dup id
            lambda d: d["edges"][0].update(cost="-2"),              # negative
            lambda d: d["pairs"][0].update(s="nope"),               # unknown
    ):
        doc = json.loads(PATH3_JSON)
        mutate(doc)
        with pytest.raises(ParseError):
            parse_instance(json.dumps(doc))
    with pytest.raises(ParseError):
        parse_instance("not json at all")


def test_validate_reports_unroutable_pairs():
    doc = json.loads(PATH3_JSON)
    doc["pairs"].append({"id": "p2", "s": "w", "t": "u"})  # against the arcs
    inst = parse_instance(json.dumps(doc))
    rep = validate(inst)
    assert not rep.feasible
    assert rep.unreachable_pairs == ["p2"]
    assert rep.reachable["p1"] is True


def test_solution_round_trip_and_cost(path3):
    sol = solution_from_edges(path3.graph, ["e1", "e2"])
    assert sol.cost == Q(2)
    again = parse_solution(serialize_solution(sol))
    assert again.edge_ids == sol.edge_ids
    assert again.cost == sol.cost


def test_solution_from_edges_rejects_unknown_ids(path3):
    with pytest.raises(Exception):
        solution_from_edges(path3.graph, ["e1", "bogus"])


def test_gen_grid_deterministic_and_planar_sized():
    a = gen_grid(3, 3, orientation_seed=5, cost_range=(1, 9), k=3,
                 pair_seed=11)
    b = gen_grid(3, 3, orientation_seed=5, cost_range=(1, 9), k=3,
                 pair_seed=11)
    assert serialize_instance(a) == serialize_instance(b)
    # at least one directed edge per grid adjacency, at most both ways
    assert 12 <= len(a.graph.edges) <= 24
    assert len(a.graph.vertices) == 9
    assert a.k == 3
    assert validate(a).feasible


def test_gen_grid_different_seeds_differ():
    a = gen_grid(3, 3, orientation_seed=5, cost_range=(1, 9), k=3,
                 pair_seed=11)
    c = gen_grid(3, 3, orientation_seed=6, cost_range=(1, 9), k=3,
                 pair_seed=11)
    assert serialize_instance(a) != serialize_instance(c)


def test_gen_layered_random_deterministic_and_feasible():
    a = gen_layered_random(width=4, layers=3, density=0.5, graph_seed=2,
                           pair_seed=3, k=4)
    b = gen_layered_random(width=4, layers=3, density=0.5, graph_seed=2,
                           pair_seed=3, k=4)
    assert serialize_instance(a) == serialize_instance(b)
    assert a.k == 4
    assert validate(a).feasible


def test_generator_argument_validation():
    with pytest.raises(GenerationError):
        gen_grid(1, 3, orientation_seed=0, cost_range=(1, 9), k=1,
                 pair_seed=0)
    with pytest.raises(GenerationError):
        gen_grid(3, 3, orientation_seed=0, cost_range=(1, 9), k=0,
                 pair_seed=0)
    with pytest.raises(GenerationError):
        gen_layered_random(width=0, layers=3, density=0.5, graph_seed=0,
                           pair_seed=0, k=1)


def test_with_pairs_and_pair_by_id(triangle):
    sub = triangle.with_pairs([triangle.pair_by_id("p2")])
    assert sub.k == 1
    assert sub.pairs[0].id == "p2"
    assert sub.graph is triangle.graph
