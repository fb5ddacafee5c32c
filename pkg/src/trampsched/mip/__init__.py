"""Solver layer: LP kernel, branch-and-bound and MPS interchange."""

from .bnb import (FEASIBLE, INFEASIBLE, NO_SOLUTION, OPTIMAL, UNBOUNDED, SolveResult,
                  SolverOptions, rel_gap, solve)
from .lp import LpData, LpResult, lp_solve, solve_lp
from .mps import (MpsError, coefficient_checksum, export_mps, import_mps, import_solution,
                  write_solution)

__all__ = [
    "FEASIBLE", "INFEASIBLE", "NO_SOLUTION", "OPTIMAL", "UNBOUNDED",
    "SolveResult", "SolverOptions", "rel_gap", "solve",
    "LpData", "LpResult", "lp_solve", "solve_lp",
    "MpsError", "coefficient_checksum", "export_mps", "import_mps", "import_solution",
    "write_solution",
]
