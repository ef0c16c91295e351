"""Exact branch-and-bound for box-constrained l0-penalized least squares,
with node-screening tests that fix variables and prune sub-trees early."""

from .bnb import Solution, SolverConfig, SolveStats, branch, solve, upper_bound_heuristic
from .datagen import GeneratedInstance, GenSpec, generate
from .kernels import BACKEND
from .model import Instance, Node, PivotValues, child_one, child_zero, full_objective, pivot
from .oracle import OracleConfig, box_ls, exhaustive_solve
from .relaxation import (
    RelaxationConfig,
    RelaxationResult,
    dual_from_primal,
    dual_objective,
    penalty_conjugate,
    relaxed_primal,
    solve_relaxation,
)
from .screening import ScreeningResult, apply_screening, node_screen

__version__ = "0.1.0"
