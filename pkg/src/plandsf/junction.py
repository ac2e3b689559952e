"""Junction-tree search: per-root density relaxation, bucketing by pair
activation value, dual rooted-tree solves, and min-density selection.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .dst import DstResult, dst_solve, dst_solve_reversed
from .graph import Digraph, path_cost, reachable_set
from .instance import Instance
from .lp import (FractionalSolution, InfeasibleRoot, LpError,
                 separate_cut_constraints, solve_den_lp)
from .oracle import _metric_closure
from .rational import ONE, Q, ZERO


class JunctionError(RuntimeError):
    pass


@dataclass(frozen=True)
class JunctionTree:
    root: str
    edges: frozenset
    covered: frozenset  # pair ids
    cost: object
    density: object

    def sort_key(self):
        return (self.density, self.root, tuple(sorted(self.edges)))


@dataclass
class JunctionSearchState:
    root: str
    fractional: FractionalSolution
    theta: int
    bucket_pairs: frozenset
    forward: DstResult   # out-tree toward the bucket's sinks
    backward: DstResult  # in-tree from the bucket's sources
    tree: JunctionTree = None
    scaled_feasibility: "ScaledFeasibilityReport" = None
    bucket_mass: object = None
    bucket_bound: object = None


@dataclass(frozen=True)
class ScaledFeasibilityReport:
    passed: bool
    violations: tuple


def floor_log2(n: int) -> int:
    return max(n, 1).bit_length() - 1


def bucket_theta(y_t, k: int):
    """Smallest bucket index whose activation mass clears 1/(2*floor(lg k)+2).

    Bucket j holds pairs with y in (1/2^(j+1), 1/2^j]; zero activations are
    never bucketed. Existence is guaranteed at this scale; a miss means the
    incoming values were not a normalized optimum.
    """
    total = sum(y_t.values(), ZERO)
    assert total == 1, "activation values must be normalized"
    log_k = floor_log2(k)
    threshold = ONE / (2 * log_k + 2)
    for j in range(log_k + 1):
        lo = Q(1, 2 ** (j + 1))
        hi = Q(1, 2 ** j)
        bucket = frozenset(pid for pid, y in y_t.items() if lo < y <= hi)
        mass = sum((y_t[p] for p in bucket), ZERO)
        if mass >= threshold:
            return j, bucket
    raise AssertionError("no bucket reached the guaranteed mass; upstream bug")


def junction_search(inst: Instance, root: str,
                    strategy: str = "exact-fpt") -> Optional[JunctionSearchState]:
    """Full per-root pipeline; None when no pair can route through the root."""
    g = inst.graph
    try:
        fractional = solve_den_lp(inst, root)
    except InfeasibleRoot:
        return None
    theta, bucket = bucket_theta(
        {p: y for p, y in fractional.y_t.items() if y > 0}, inst.k)
    pairs = [inst.pair_by_id(pid) for pid in sorted(bucket)]
    sinks = frozenset(p.t for p in pairs)
    sources = frozenset(p.s for p in pairs)
    forward = dst_solve(g, root, sinks, strategy)
    backward = dst_solve_reversed(g, root, sources, strategy)
    edges = frozenset(forward.edges | backward.edges)
    cost = path_cost(g, edges)
    tree = JunctionTree(root, edges, frozenset(bucket), cost,
                        cost / len(bucket))
    state = JunctionSearchState(root, fractional, theta, frozenset(bucket),
                                forward, backward, tree)
    state.bucket_mass = sum((fractional.y_t[p] for p in bucket), ZERO)
    state.bucket_bound = ONE / (2 * floor_log2(inst.k) + 2)
    assert state.bucket_mass >= state.bucket_bound
    state.scaled_feasibility = check_scaled_feasibility(state, g)
    return state


def build_junction_tree(inst: Instance, root: str,
                        strategy: str = "exact-fpt") -> Optional[JunctionTree]:
    state = junction_search(inst, root, strategy)
    return state.tree if state else None


def check_scaled_feasibility(state: JunctionSearchState, g: Digraph) -> ScaledFeasibilityReport:
    """The scaled fractional point 2^(theta+1) x* must satisfy every cut
    constraint of the rooted relaxation for the bucket's sinks, and of the
    reversed instance for its sources. Checked exactly via min-cuts."""
    scale = Q(2 ** (state.theta + 1))
    scaled = {e: scale * v for e, v in state.fractional.x.items()}
    sinks = sorted(state.forward.terminals)
    sources = sorted(state.backward.terminals)
    demands = [(t, ONE, "from-root") for t in sinks]
    demands += [(s, ONE, "to-root") for s in sources]
    violations = separate_cut_constraints(g, scaled, state.root, demands)
    return ScaledFeasibilityReport(not violations, tuple(violations))


def _density_floor(inst: Instance, root: str, closure) -> Optional[object]:
    """Cheap lower bound on any junction density at this root, used to prune
    root enumeration; None when no pair routes through the root."""
    inv_sum = ZERO
    any_pair = False
    for p in inst.pairs:
        ds = closure[p.s].get(root)
        dt = closure[root].get(p.t)
        if ds is None or dt is None:
            continue
        any_pair = True
        m = max(ds, dt)
        if m == 0:
            return ZERO
        inv_sum += ONE / m
    if not any_pair:
        return None
    return ONE / inv_sum


def _search_roots(inst, roots, strategy):
    states = []
    best = None
    closure = _metric_closure(inst.graph)
    floors = {}
    for root in roots:
        floor = _density_floor(inst, root, closure)
        if floor is not None:
            floors[root] = floor
    # scanning promising roots first maximizes incumbent pruning; a pruned
    # root has density >= floor > incumbent, so the outcome is order-free
    for root in sorted(floors, key=lambda r: (floors[r], r)):
        if best is not None and floors[root] > best.tree.density:
            continue
        state = junction_search(inst, root, strategy)
        if state is None:
            continue
        states.append(state)
        if best is None or state.tree.sort_key() < best.tree.sort_key():
            best = state
    return best, states


def find_min_density_junction(inst: Instance, strategy: str = "exact-fpt",
                              parallel: int = 1) -> JunctionTree:
    state, _ = min_density_search(inst, strategy, parallel)
    return state.tree


def min_density_search(inst: Instance, strategy: str = "exact-fpt",
                       parallel: int = 1):
    """Best junction state across all roots plus every state evaluated.

    Roots are scanned in vertex-id order; ties resolve to the smaller root
    id then the lexicographically smaller edge set, so the outcome does not
    depend on the degree of parallelism.
    """
    roots = list(inst.graph.sorted_vertices)
    if parallel <= 1 or len(roots) < 4:
        best, states = _search_roots(inst, roots, strategy)
    else:
        chunks = [roots[i::parallel] for i in range(parallel)]
        best, states = None, []
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            futures = [pool.submit(_search_roots, inst, chunk, strategy)
                       for chunk in chunks if chunk]
            for fut in futures:
                b, st = fut.result()
                states.extend(st)
                if b is not None and (best is None
                                      or b.tree.sort_key() < best.tree.sort_key()):
                    best = b
        states.sort(key=lambda s: s.root)
    if best is None:
        raise JunctionError("no root yields a junction structure")
    return best, states


def density_ledger(state: JunctionSearchState, k: int) -> dict:
    """Every inequality of the per-root density chain, evaluated exactly."""
    lp_opt = state.fractional.objective
    scale = Q(2 ** (state.theta + 1))
    alpha = max(state.forward.alpha, state.backward.alpha)
    log_k = floor_log2(k)
    entries = {
        "theta": state.theta,
        "bucket_mass": state.bucket_mass,
        "bucket_mass_bound": state.bucket_bound,
        "bucket_mass_ok": state.bucket_mass >= state.bucket_bound,
        "bucket_size": len(state.bucket_pairs),
        "bucket_size_bound": Q(2 ** state.theta) / (2 * log_k + 2),
        "den_lp_value": lp_opt,
        "alpha_forward": state.forward.alpha,
        "alpha_backward": state.backward.alpha,
        "alpha": alpha,
        "forward_lp_bound": state.forward.lp_bound,
        "backward_lp_bound": state.backward.lp_bound,
        "scaled_feasible": state.scaled_feasibility.passed,
    }
    entries["bucket_size_ok"] = (
        Q(len(state.bucket_pairs)) >= entries["bucket_size_bound"])
    # each rooted relaxation optimum is at most the scaled master cost
    entries["forward_lp_vs_scaled_ok"] = state.forward.lp_bound <= scale * lp_opt
    entries["backward_lp_vs_scaled_ok"] = state.backward.lp_bound <= scale * lp_opt
    entries["tree_cost"] = state.tree.cost
    entries["tree_cost_bound"] = alpha * 2 * scale * lp_opt
    entries["tree_cost_ok"] = (
        state.forward.cost + state.backward.cost <= entries["tree_cost_bound"])
    entries["density"] = state.tree.density
    entries["density_bound"] = 8 * alpha * (log_k + 1) * lp_opt
    entries["density_ok"] = state.tree.density <= entries["density_bound"]
    return entries
