"""Exhaustive reference solvers: full-problem optimum, rooted-tree optimum,
minimum-density structure."""

import pytest

from plandsf.instance import parse_instance, validate
from plandsf.oracle import (OracleError, brute_force_dsf,
                            brute_force_min_density_junction, exact_dst)
from plandsf.pipeline import verify_solution
from plandsf.rational import Q
from tests.conftest import tiny_suite_instance


def test_path3_optimum(path3):
    res = brute_force_dsf(path3)
    assert res.opt_cost == Q(2)
    assert res.witness.edge_ids == frozenset({"e1", "e2"})
    assert verify_solution(path3, res.witness).ok


def test_triangle_optimum(triangle):
    res = brute_force_dsf(triangle)
    assert res.opt_cost == Q(4)
    # full cycle; the a->r chord at cost 3 is never worth taking
    assert res.witness.edge_ids == frozenset({"ra", "ab", "br"})


def test_shared_prefix_optimum(shared_prefix):
    res = brute_force_dsf(shared_prefix)
    assert res.opt_cost == Q(9)  # 7 for the out-tree + both unit source arcs


def test_exact_dst_shares_prefix(shared_prefix):
    sol = exact_dst(shared_prefix.graph, "r", ["t1", "t2"])
    assert sol.cost == Q(7)
    assert sol.edge_ids == frozenset({"rm", "mt1", "mt2"})


def test_exact_dst_root_is_terminal(path3):
    sol = exact_dst(path3.graph, "u", ["u"])
    assert sol.cost == Q(0)
    assert sol.edge_ids == frozenset()


def test_min_density_junction_triangle(triangle):
    res = brute_force_min_density_junction(triangle)
    # covering p1 alone from root a via {ab} has density 1; anything
    # covering both pairs costs >= 4 for density >= 2
    assert res.density == Q(1)
    assert res.root == "a"
    assert res.covered == frozenset({"p1"})


def test_min_density_junction_path3(path3):
    res = brute_force_min_density_junction(path3)
    assert res.density == Q(2)
    assert res.covered == frozenset({"p1"})


def test_budget_guards():
    inst = tiny_suite_instance(1)
    with pytest.raises(OracleError):
        brute_force_dsf(inst, edge_budget=2)
    with pytest.raises(OracleError):
        brute_force_min_density_junction(inst, edge_budget=2)


@pytest.mark.parametrize("seed", [1, 2, 4, 5])
def test_witness_is_always_feasible(seed):
    inst = tiny_suite_instance(seed)
    assert validate(inst).feasible
    res = brute_force_dsf(inst)
    rep = verify_solution(inst, res.witness)
    assert rep.ok
    assert res.witness.cost == res.opt_cost
