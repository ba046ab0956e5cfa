"""Mixed-integer convex minimisation with few integer variables."""

from .model import (EMPTY, INFEASIBLE, NO_FEASIBLE_POINT_LOCATED, NO_MORE_POINTS,
                    ImprovementOutcome, MixedPoint, Objective, Problem, ball, linear, quadratic)
from .bisect import KAPPA, golden_min_continuous, golden_min_integer, integer_min_exact
from .prox_mirror import mirror_descent, project_to_feasible, termination_procedure
from .oracle2d import (BestPointSet, improve_2d, kth_best_integer, kth_best_sequence,
                       minimize_2d, relaxation_min)
from .mi_solver import (FiberEvaluator, enumerate_fibers, improve_mixed_1d, improve_mixed_2d,
                        inner_min, kth_fiber, minimize_mixed_2d, solve_general)
from .cli import parse_problem, parse_problem_file, serialize

__all__ = [
    "EMPTY", "INFEASIBLE", "NO_FEASIBLE_POINT_LOCATED", "NO_MORE_POINTS",
    "ImprovementOutcome", "MixedPoint", "Objective", "Problem", "ball", "linear", "quadratic",
    "KAPPA", "golden_min_continuous", "golden_min_integer", "integer_min_exact",
    "mirror_descent", "project_to_feasible", "termination_procedure",
    "BestPointSet", "improve_2d", "kth_best_integer", "kth_best_sequence", "minimize_2d",
    "relaxation_min", "FiberEvaluator", "enumerate_fibers", "improve_mixed_1d",
    "improve_mixed_2d", "inner_min", "kth_fiber", "minimize_mixed_2d", "solve_general",
    "parse_problem", "parse_problem_file", "serialize",
]
