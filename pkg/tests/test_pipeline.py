"""Greedy covering loop, solution verification, and cost accounting."""

import pytest

from plandsf.instance import Solution, solution_from_edges
from plandsf.oracle import brute_force_dsf
from plandsf.pipeline import (harmonic, ratio_report, solve_dsf,
                              verify_solution)
from plandsf.rational import Q, ONE
from tests.conftest import tiny_suite_instance


def test_path3_single_round(path3):
    sol, trace = solve_dsf(path3)
    assert sol.cost == Q(2)
    assert sol.edge_ids == frozenset({"e1", "e2"})
    assert len(trace.iterations) == 1
    assert trace.iterations[0].newly_covered == frozenset({"p1"})
    assert trace.total_cost == sol.cost
    assert verify_solution(path3, sol).ok


def test_triangle_two_rounds(triangle):
    sol, trace = solve_dsf(triangle)
    assert sol.cost == Q(4)
    assert len(trace.iterations) == 2
    # remaining-pair counts shrink strictly
    assert trace.iterations[0].remaining_before == 2
    assert trace.iterations[1].remaining_before == 1
    assert verify_solution(triangle, sol).ok


def test_trace_charges_cover_the_cost(triangle):
    sol, trace = solve_dsf(triangle)
    charged = sum((it.tree.cost for it in trace.iterations), Q(0))
    assert charged >= sol.cost  # union can only dedupe edges


def test_verify_rejects_missing_edge(path3):
    sol, _ = solve_dsf(path3)
    broken = solution_from_edges(path3.graph,
                                 set(sol.edge_ids) - {"e2"})
    rep = verify_solution(path3, broken)
    assert not rep.ok
    assert any("p1" in msg for msg in rep.problems)


def test_verify_rejects_unknown_edge_ids(path3):
    rep = verify_solution(path3, Solution(frozenset({"bogus"}), Q(0)))
    assert not rep.ok
    assert any("bogus" in msg for msg in rep.problems)


def test_verify_rejects_tampered_cost(path3):
    sol, _ = solve_dsf(path3)
    rep = verify_solution(path3, Solution(sol.edge_ids, sol.cost + 1,
                                          sol.certificates))
    assert not rep.ok


def test_verify_rejects_tampered_certificate(path3):
    sol, _ = solve_dsf(path3)
    if not sol.certificates:
        pytest.skip("no certificates attached")
    bad = {pid: tuple(reversed(walk)) for pid, walk in sol.certificates.items()}
    rep = verify_solution(path3, Solution(sol.edge_ids, sol.cost, bad))
    assert not rep.ok


def test_harmonic_values():
    assert harmonic(1) == ONE
    assert harmonic(2) == Q(3, 2)
    assert harmonic(4) == Q(25, 12)


def test_ratio_report_triangle(triangle):
    sol, trace = solve_dsf(triangle)
    opt = brute_force_dsf(triangle).opt_cost
    rep = ratio_report(triangle, sol, trace, opt_cost=opt)
    assert rep.ratio == ONE  # greedy is optimal on this fixture
    assert rep.accounting_ok
    assert rep.harmonic_k == Q(3, 2)
    assert rep.cost == Q(4)


@pytest.mark.parametrize("seed", [1, 2, 4])
def test_generated_instances_round_trip(seed):
    inst = tiny_suite_instance(seed)
    sol, trace = solve_dsf(inst, strategy="shortest-path-union")
    rep = verify_solution(inst, sol)
    assert rep.ok, rep
    opt = brute_force_dsf(inst).opt_cost
    assert sol.cost >= opt
    rr = ratio_report(inst, sol, trace, opt_cost=opt)
    assert rr.accounting_ok
    assert rr.ratio >= ONE


def test_pipeline_deterministic(triangle):
    a = solve_dsf(triangle)
    b = solve_dsf(triangle)
    assert a[0] == b[0]
    assert [it.tree for it in a[1].iterations] == \
        [it.tree for it in b[1].iterations]
