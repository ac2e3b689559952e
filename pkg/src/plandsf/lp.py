"""Exact-rational linear programming and the cut-based relaxations.

The master solver is a dense two-phase tableau simplex over exact
rationals. Pivoting uses Dantzig's rule with a deterministic switch to
Bland's rule after a fixed number of iterations, which guarantees
termination while keeping typical pivot counts low. The density relaxation
and the rooted-tree relaxation are solved by cutting planes with min-cut
separation over the exponential family of cut constraints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .graph import Cut, Digraph, min_cut, reachable_set, reverse
from .instance import Instance
from .rational import Q, ZERO, ONE


class LpError(RuntimeError):
    pass


class LpInfeasible(LpError):
    pass


class LpUnbounded(LpError):
    pass


class InfeasibleRoot(LpError):
    """No terminal pair can route through the requested root."""


@dataclass
class LinearProgram:
    variables: list       # [(var_id, lower_bound)]
    objective: dict       # var_id -> coefficient (minimize)
    constraints: list     # [(coeffs: dict, relation: ">="|"==", rhs)]

    def add_constraint(self, coeffs, relation, rhs):
        self.constraints.append((dict(coeffs), relation, rhs))


@dataclass(frozen=True)
class FractionalSolution:
    x: Mapping[str, object]    # edge-id -> value (zero entries omitted)
    y_s: Mapping[str, object]  # pair-id -> value
    y_t: Mapping[str, object]
    objective: object


def solve_lp(lp: LinearProgram, bland_after: int = 2000):
    """Exact optimal basic solution of min c.x s.t. constraints, x >= lb.

    Returns (values, objective). Raises LpInfeasible / LpUnbounded.
    """
    var_ids = [v for v, _lb in lp.variables]
    lbs = {v: lb for v, lb in lp.variables}
    index = {v: i for i, v in enumerate(var_ids)}
    for v in lp.objective:
        if v not in index:
            raise LpError(f"objective references unknown variable {v!r}")
    n = len(var_ids)

    # Shift x = x' + lb so every structural variable has lower bound 0.
    rows = []  # (dense coeffs over structural vars, relation, rhs)
    for coeffs, rel, rhs in lp.constraints:
        dense = [ZERO] * n
        shift = ZERO
        for v, a in coeffs.items():
            if v not in index:
                raise LpError(f"constraint references unknown variable {v!r}")
            dense[index[v]] = dense[index[v]] + a
            shift += a * lbs[v]
        rows.append((dense, rel, rhs - shift))

    # Equality form with slack/surplus columns; artificials where needed.
    m = len(rows)
    tableau = []     # m rows of length n + extras
    basis = []
    extra_cols = []  # (kind, row) with kind in {"slack", "artificial"}

    def col_count():
        return n + len(extra_cols)

    art_rows = []
    for ri, (dense, rel, rhs) in enumerate(rows):
        row = list(dense)
        if rel == ">=":
            if rhs <= 0:
                # negate into <= with nonnegative rhs; slack is basic
                row = [-a for a in row]
                rhs = -rhs
                extra_cols.append(("slack", ri))
                basis.append(("extra", len(extra_cols) - 1))
            else:
                extra_cols.append(("surplus", ri))
                art_rows.append(ri)
                basis.append(None)
        elif rel == "==":
            if rhs < 0:
                row = [-a for a in row]
                rhs = -rhs
            art_rows.append(ri)
            basis.append(None)
        else:
            raise LpError(f"unknown relation {rel!r}")
        tableau.append((row, rhs))

    # Materialize the full tableau matrix.
    total_extra = len(extra_cols) + len(art_rows)
    T = []
    rhs_col = []
    for ri, (row, rhs) in enumerate(tableau):
        full = row + [ZERO] * total_extra
        T.append(full)
        rhs_col.append(rhs)
    for ci, (kind, ri) in enumerate(extra_cols):
        T[ri][n + ci] = ONE if kind == "slack" else -ONE
    art_base = n + len(extra_cols)
    for ai, ri in enumerate(art_rows):
        T[ri][art_base + ai] = ONE
        basis[ri] = ("art", ai)
    basis = [("extra", b[1]) if isinstance(b, tuple) and b[0] == "extra" else b
             for b in basis]

    ncols = n + total_extra

    def basis_col(b):
        if b[0] == "extra":
            return n + b[1]
        if b[0] == "art":
            return art_base + b[1]
        return b[1]  # ("var", j)

    def pivot(ri, ci):
        piv = T[ri][ci]
        inv = ONE / piv
        row = T[ri]
        if piv != ONE:
            T[ri] = row = [a * inv for a in row]
            rhs_col[ri] = rhs_col[ri] * inv
        for rj in range(m):
            if rj == ri:
                continue
            factor = T[rj][ci]
            if factor == 0:
                continue
            rowj = T[rj]
            T[rj] = [a if b == 0 else a - factor * b
                     for a, b in zip(rowj, row)]
            rhs_col[rj] = rhs_col[rj] - factor * rhs_col[ri]

    def run_simplex(cost, allowed, iter_cap=100000):
        """Minimize cost (dense over ncols) over columns in `allowed`."""
        nonlocal basis
        # reduced costs: z_j = c_j - c_B^T B^-1 A_j computed via the tableau
        red = list(cost)
        obj = ZERO
        for ri in range(m):
            cb = cost[basis_col(basis[ri])]
            if cb == 0:
                continue
            rowi = T[ri]
            red = [r - cb * a for r, a in zip(red, rowi)]
            obj += cb * rhs_col[ri]
        iters = 0
        while True:
            iters += 1
            if iters > iter_cap:
                raise LpError("simplex iteration cap exceeded")
            entering = None
            if iters <= bland_after:
                best = ZERO
                for j in allowed:
                    rj = red[j]
                    if rj < best:
                        best = rj
                        entering = j
            else:  # Bland
                for j in allowed:
                    if red[j] < 0:
                        entering = j
                        break
            if entering is None:
                return obj, red
            ratio = None
            leave = None
            for ri in range(m):
                a = T[ri][entering]
                if a > 0:
                    r = rhs_col[ri] / a
                    if ratio is None or r < ratio or (
                            r == ratio and basis_col(basis[ri]) < basis_col(basis[leave])):
                        ratio = r
                        leave = ri
            if leave is None:
                raise LpUnbounded("objective is unbounded below")
            piv_red = red[entering]
            pivot(leave, entering)
            basis[leave] = ("var", entering) if entering < n else (
                ("extra", entering - n) if entering < art_base else ("art", entering - art_base))
            row = T[leave]
            red = [r - piv_red * a for r, a in zip(red, row)]
            obj += piv_red * rhs_col[leave]

    structural_cost = [ZERO] * ncols
    for v, c in lp.objective.items():
        structural_cost[index[v]] = Q(c) if isinstance(c, int) else c

    if art_rows:
        phase1 = [ZERO] * ncols
        for ai in range(len(art_rows)):
            phase1[art_base + ai] = ONE
        allowed = list(range(art_base))  # artificials may only leave
        obj1, _ = run_simplex(phase1, list(range(ncols)))
        if obj1 > 0:
            raise LpInfeasible("no feasible solution")
        # drive remaining artificials out of the basis
        for ri in range(m):
            if basis[ri][0] != "art":
                continue
            for ci in range(art_base):
                if T[ri][ci] != 0:
                    pivot(ri, ci)
                    basis[ri] = ("var", ci) if ci < n else ("extra", ci - n)
                    break
        allowed = [j for j in range(art_base)]
        obj, _ = run_simplex(structural_cost, allowed)
    else:
        obj, _ = run_simplex(structural_cost, list(range(art_base)))

    values = {}
    for v, lb in lp.variables:
        values[v] = lb
    for ri in range(m):
        b = basis[ri]
        if b[0] == "var":
            vid = var_ids[b[1]]
            values[vid] = values[vid] + rhs_col[ri]
    objective = sum((structural_cost[index[v]] * values[v] for v in var_ids), ZERO)
    return values, objective


@dataclass(frozen=True)
class Violation:
    demand: tuple    # (vertex, required, direction)
    cut: Cut         # side contains the root; crossing edges in g's orientation
    shortfall: object
    pair_id: Optional[str] = None


def separate_cut_constraints(g: Digraph, x: Mapping[str, object], root: str,
                             demands: Sequence[tuple]) -> list:
    """Min-cut separation for rooted connectivity demands.

    demands: (vertex, required, direction) with direction "from-root" for
    root->vertex flow and "to-root" for vertex->root flow. Returns every
    demand whose min cut is below its requirement, with the exact shortfall.
    An empty result certifies feasibility of x for all listed demands.
    """
    rev = reverse(g)
    out = []
    for vertex, required, direction in demands:
        if required <= 0:
            continue
        if direction == "from-root":
            if vertex == root:
                continue
            cut = min_cut(g, x, root, vertex)
        elif direction == "to-root":
            if vertex == root:
                continue
            rcut = min_cut(rev, x, root, vertex)
            crossing = frozenset(rcut.crossing_edges)
            cut = Cut(rcut.side, crossing, rcut.capacity)
        else:
            raise LpError(f"unknown direction {direction!r}")
        if cut.capacity < required:
            out.append(Violation((vertex, required, direction), cut,
                                 required - cut.capacity))
    return out


def _useful_edges(g: Digraph, root: str, pairs):
    """Edges that can lie on some s_i->root or root->t_i dipath."""
    from_root = reachable_set(g, {root}, "forward")
    to_root = reachable_set(g, {root}, "backward")
    tset = {p.t for p in pairs}
    sset = {p.s for p in pairs}
    reach_t = reachable_set(g, tset & g.vertices, "backward") if tset else frozenset()
    reach_s = reachable_set(g, sset & g.vertices, "forward") if sset else frozenset()
    useful = set()
    for e in g.edges:
        if e.is_loop:
            continue
        if e.tail in from_root and e.head in reach_t:
            useful.add(e.id)
        elif e.tail in reach_s and e.head in to_root:
            useful.add(e.id)
    return sorted(useful)


def _float_presolve_cuts(g: Digraph, root: str, pairs, edge_ids, connectable):
    """Collect a cut pool cheaply with a floating-point master; advisory only.

    The exact loop afterwards certifies feasibility, so anything missed here
    is picked up at full precision; anything spurious is simply slack.
    """
    try:
        import numpy as np
        from scipy.optimize import linprog
    except ImportError:  # pragma: no cover
        return []
    from fractions import Fraction

    costs = {e.id: float(e.cost) for e in g.edges}
    nx = len(edge_ids)
    ny = len(connectable)
    pool = []      # (frozenset crossing ids, direction, pair_id)
    seen = set()
    c = np.array([costs[i] for i in edge_ids] + [0.0] * ny)
    e_index = {eid: i for i, eid in enumerate(edge_ids)}
    p_index = {p.id: nx + i for i, p in enumerate(connectable)}
    A_eq = np.zeros((1, nx + ny))
    A_eq[0, nx:] = 1.0
    b_eq = np.array([1.0])
    res = None
    for _ in range(400):
        if pool:
            A_ub = np.zeros((len(pool), nx + ny))
            for ri, (crossing, _direction, pid) in enumerate(pool):
                # edges outside the useful set carry zero capacity, so the
                # cut inequality restricted to useful edges is still valid
                for eid in crossing:
                    if eid in e_index:
                        A_ub[ri, e_index[eid]] = -1.0
                A_ub[ri, p_index[pid]] = 1.0
            b_ub = np.zeros(len(pool))
            res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                          bounds=(0, None), method="highs")
        else:
            res = linprog(c, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
        if not res.success:  # pragma: no cover - masters here are always feasible
            break
        xs = {eid: Q(Fraction(max(res.x[e_index[eid]], 0.0)).limit_denominator(10 ** 9))
              for eid in edge_ids}
        added = False
        for p in connectable:
            yv = Q(Fraction(max(res.x[p_index[p.id]], 0.0)).limit_denominator(10 ** 9))
            if yv <= 0:
                continue
            for vertex, direction in ((p.t, "from-root"), (p.s, "to-root")):
                for vio in separate_cut_constraints(
                        g, xs, root, [(vertex, yv * Q(999, 1000), direction)]):
                    key = (vio.cut.crossing_edges, direction, p.id)
                    if key not in seen:
                        seen.add(key)
                        pool.append((vio.cut.crossing_edges, direction, p.id))
                        added = True
        if not added:
            break
    if res is not None and res.success and pool:
        # hand the exact stage only the cuts binding at the float optimum;
        # anything dropped that still matters is re-separated exactly
        tight = []
        for crossing, direction, pid in pool:
            lhs = sum(res.x[e_index[eid]] for eid in crossing if eid in e_index)
            if lhs - res.x[p_index[pid]] <= 1e-7:
                tight.append((crossing, direction, pid))
        if tight:
            return tight
    return pool


def solve_den_lp(inst: Instance, root: str, iteration_cap: Optional[int] = None,
                 collect_cuts: bool = True) -> FractionalSolution:
    """Optimal density relaxation at a fixed root via cutting planes."""
    g = inst.graph
    if root not in g.vertices:
        raise LpError(f"unknown root {root!r}")
    from_root = reachable_set(g, {root}, "forward")
    to_root = reachable_set(g, {root}, "backward")
    connectable = [p for p in inst.pairs if p.s in to_root and p.t in from_root]
    if not connectable:
        raise InfeasibleRoot(f"no pair can route through root {root!r}")
    edge_ids = _useful_edges(g, root, connectable)
    if iteration_cap is None:
        iteration_cap = 50 * max(len(g.edges), 1) * inst.k

    cuts = []   # (crossing edge ids, direction, pair_id)
    seen = set()
    if collect_cuts:
        for crossing, direction, pid in _float_presolve_cuts(
                g, root, inst.pairs, edge_ids, connectable):
            key = (crossing, direction, pid)
            seen.add(key)
            cuts.append(key)

    rounds = 0
    while True:
        rounds += 1
        if rounds > iteration_cap:
            raise LpError(
                f"cutting-plane iteration cap exceeded at root {root!r} "
                f"({len(cuts)} cuts, objective unresolved)")
        lp = LinearProgram(
            variables=[(f"x:{e}", ZERO) for e in edge_ids]
            + [(f"y:{p.id}", ZERO) for p in connectable],
            objective={f"x:{e}": g.edge_by_id[e].cost for e in edge_ids},
            constraints=[],
        )
        lp.add_constraint({f"y:{p.id}": ONE for p in connectable}, "==", ONE)
        edge_set = set(edge_ids)
        for crossing, _direction, pid in cuts:
            coeffs = {f"x:{e}": ONE for e in crossing if e in edge_set}
            coeffs[f"y:{pid}"] = coeffs.get(f"y:{pid}", ZERO) - ONE
            lp.add_constraint(coeffs, ">=", ZERO)
        values, objective = solve_lp(lp)
        xs = {e: values[f"x:{e}"] for e in edge_ids}
        ys = {p.id: values[f"y:{p.id}"] for p in connectable}
        added = False
        for p in connectable:
            yv = ys[p.id]
            if yv <= 0:
                continue
            for vertex, direction in ((p.t, "from-root"), (p.s, "to-root")):
                for vio in separate_cut_constraints(g, xs, root, [(vertex, yv, direction)]):
                    key = (vio.cut.crossing_edges, direction, p.id)
                    if key not in seen:
                        seen.add(key)
                        cuts.append(key)
                        added = True
        if not added:
            x_out = {e: v for e, v in xs.items() if v != 0}
            y_out = {p.id: ZERO for p in inst.pairs}
            y_out.update(ys)
            return FractionalSolution(x_out, dict(y_out), dict(y_out), objective)


def solve_dst_lp(g: Digraph, root: str, terminals,
                 iteration_cap: int = 10000) -> FractionalSolution:
    """Optimal value of the rooted cut relaxation (unit demand per terminal)."""
    terminals = sorted(set(terminals) - {root})
    if not terminals:
        return FractionalSolution({}, {}, {}, ZERO)
    from_root = reachable_set(g, {root}, "forward")
    for t in terminals:
        if t not in from_root:
            raise LpInfeasible(f"terminal {t!r} unreachable from root")
    edge_ids = sorted(e.id for e in g.edges
                      if not e.is_loop and e.tail in from_root)
    cuts = []
    seen = set()
    rounds = 0
    while True:
        rounds += 1
        if rounds > iteration_cap:
            raise LpError("cutting-plane iteration cap exceeded")
        lp = LinearProgram(
            variables=[(f"x:{e}", ZERO) for e in edge_ids],
            objective={f"x:{e}": g.edge_by_id[e].cost for e in edge_ids},
            constraints=[],
        )
        if not cuts:
            # seed with the trivial cut around the root
            side = frozenset({root})
            crossing = frozenset(e.id for e in g.edges
                                 if e.tail == root and e.head != root)
            cuts.append(crossing)
            seen.add(crossing)
        edge_set = set(edge_ids)
        for crossing in cuts:
            coeffs = {f"x:{e}": ONE for e in crossing if e in edge_set}
            lp.add_constraint(coeffs, ">=", ONE)
        values, objective = solve_lp(lp)
        xs = {e: values[f"x:{e}"] for e in edge_ids}
        added = False
        for t in terminals:
            for vio in separate_cut_constraints(g, xs, root, [(t, ONE, "from-root")]):
                crossing = vio.cut.crossing_edges
                if crossing not in seen:
                    seen.add(crossing)
                    cuts.append(crossing)
                    added = True
        if not added:
            return FractionalSolution(
                {e: v for e, v in xs.items() if v != 0}, {}, {}, objective)


def den_lp_from_junction(h) -> FractionalSolution:
    """The canonical fractional point induced by a junction structure:
    1/|covered| on its edges and covered pairs; objective equals its density."""
    share = ONE / len(h.covered)
    x = {e: share for e in h.edges}
    y = {pid: share for pid in h.covered}
    return FractionalSolution(x, dict(y), dict(y), h.cost * share)
