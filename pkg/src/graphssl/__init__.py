"""Graph-Laplacian semi-supervised learning over equal-weight integrated networks."""

from .graph import (GraphFormatError, NetworkCollection, SparseNetwork, build_affinity, degrees,
                    load_collection, load_edge_list)
from .laplacian import (OperatorKind, PropagationOperator, integrate_random_walk,
                        integrate_sym_laplacian, integrate_symmetric, integrate_unnormalized)
from .solvers import (ConvergenceWarning, SolveResult, SolverError, SolverParams,
                      objective_normalized, objective_unnormalized, propagate_clamped,
                      propagate_iterative, solve_closed_form, solve_normalized_regularized,
                      solve_unnormalized)
from .evaluation import (AnnotationSet, ConfusionCounts, EvalReport, FoldAssignment, assign_folds,
                         build_initial_labels, confusion, cross_validate, load_annotations,
                         predict)
from .synthetic import planted_partition

__version__ = "0.1.0"

__all__ = [
    "AnnotationSet", "ConfusionCounts", "ConvergenceWarning", "EvalReport", "FoldAssignment",
    "GraphFormatError", "NetworkCollection", "OperatorKind", "PropagationOperator",
    "SolveResult", "SolverError", "SolverParams", "SparseNetwork", "assign_folds",
    "build_affinity", "build_initial_labels", "confusion", "cross_validate", "degrees",
    "integrate_random_walk", "integrate_sym_laplacian", "integrate_symmetric",
    "integrate_unnormalized", "load_annotations", "load_collection", "load_edge_list",
    "objective_normalized", "objective_unnormalized", "planted_partition", "predict",
    "propagate_clamped", "propagate_iterative", "solve_closed_form",
    "solve_normalized_regularized", "solve_unnormalized",
]
