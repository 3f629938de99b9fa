"""Exact and approximate solvers for the Many Visits TSP and fixed-degree
connected subgraph problems."""

from .core import (INF, FdcsInstance, InstanceError, MvtspInstance, NoSolution,
                   check_solution, cost_of, is_feasible, is_feasible_mvtsp,
                   reconstruct_tour, validate)
from .algebraic import solve_algebraic
from .approx import solve_approx
from .dp import solve_expspace
from .kernel import kernelize, lift
from .oracle import brute_force, brute_force_mvtsp
from .polyspace import solve_polyspace

__all__ = [
    "INF", "FdcsInstance", "InstanceError", "MvtspInstance", "NoSolution",
    "brute_force", "brute_force_mvtsp", "check_solution", "cost_of", "is_feasible",
    "is_feasible_mvtsp", "kernelize", "lift", "reconstruct_tour", "solve_algebraic",
    "solve_approx", "solve_expspace", "solve_polyspace", "validate",
]
