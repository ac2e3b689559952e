"""Directed Steiner forest in planar digraphs via junction trees.

Library layout:
  rational  — exact rational arithmetic (gmpy2-backed, Fraction fallback)
  graph     — directed multigraph, reachability, min-cut, shortest dipaths
  instance  — problem/solution data model, JSON formats, seeded generators
  oracle    — brute-force reference solvers (forest, density, rooted tree)
  lp        — exact simplex with cutting-plane separation for the density
              and rooted-connectivity relaxations
  dst       — rooted Steiner tree strategies with measured LP gap
  junction  — per-root search for low-density junction trees
  pipeline  — greedy covering solver, verification, ratio accounting
  harness   — mechanical replay of the existence argument
  report    — benchmark CSV and figures
  cli       — command-line front end
"""

from .graph import Digraph, Edge, GraphError
from .instance import (Instance, Pair, Solution, gen_grid,
                       gen_layered_random, parse_instance, parse_solution,
                       serialize_instance, serialize_solution, validate)
from .junction import (JunctionTree, build_junction_tree,
                       find_min_density_junction)
from .pipeline import ratio_report, solve_dsf, verify_solution
from .harness import existence_replay
from .rational import Q, rat_str

__all__ = [
    "Digraph", "Edge", "GraphError", "Instance", "Pair", "Solution",
    "JunctionTree", "Q", "build_junction_tree", "existence_replay",
    "find_min_density_junction", "gen_grid", "gen_layered_random",
    "parse_instance", "parse_solution", "rat_str", "ratio_report",
    "serialize_instance", "serialize_solution", "solve_dsf", "validate",
    "verify_solution",
]

__version__ = "0.1.0"
