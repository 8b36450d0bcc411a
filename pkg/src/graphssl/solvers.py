"""Label propagation and closed-form solvers.

Two families share the same fixed point:

* the iteration ``F <- alpha S F + (1 - alpha) Y`` started from ``F = Y``,
  whose limit is ``(1 - alpha)(I - alpha S)^-1 Y``;
* the regularized least-squares problems, solved as sparse linear systems
  ``(L + gamma I) F = gamma Y``.

Closed-form solves run one Krylov solve per label column: conjugate gradient
for the symmetric positive definite systems and BiCGSTAB for the random-walk
system, which is not symmetric.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as spla

from .graph import NetworkCollection, degrees
from .laplacian import OperatorKind, PropagationOperator

# Krylov solves aim for LINEAR_TARGET and fail only above LINEAR_RTOL
LINEAR_RTOL = 1e-10
LINEAR_TARGET = 1e-12

_PROPAGATORS = (OperatorKind.RANDOM_WALK, OperatorKind.SYMMETRIC_NORMALIZED)


class ConvergenceWarning(UserWarning):
    """The fixed-point iteration hit ``max_iter`` before reaching ``tol``."""


class SolverError(RuntimeError):
    """A Krylov solve for one label column broke down or did not converge."""

    def __init__(self, column, info, method):
        self.column = column
        self.info = info
        super().__init__(f"{method} failed on class column {column} (info={info})")


@dataclass(frozen=True)
class SolverParams:
    alpha: float = 0.85
    gamma: float = 1.0
    tol: float = 1e-9
    max_iter: int = 10000

    def __post_init__(self):
        _check_alpha(self.alpha)
        _check_gamma(self.gamma)
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError(f"max_iter must be a positive integer, got {self.max_iter}")


@dataclass(frozen=True)
class SolveResult:
    """Estimated label matrix plus solver diagnostics.

    ``iterations`` is 0 for closed-form solves. ``residual`` is the last
    max-abs update for iterative solves and the worst relative linear
    residual over columns for closed-form ones.
    """

    F: np.ndarray
    iterations: int
    residual: float
    converged: bool = True


def _check_alpha(alpha):
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in the open interval (0, 1), got {alpha}")


def _check_gamma(gamma):
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")


def _as_labels(Y, n) -> tuple[np.ndarray, bool]:
    Y = np.asarray(Y, dtype=np.float64)
    vector = Y.ndim == 1
    if vector:
        Y = Y[:, None]
    if Y.ndim != 2 or Y.shape[0] != n:
        raise ValueError(f"label matrix must have {n} rows, got shape {Y.shape}")
    return Y, vector


def _shape_back(F, vector):
    return F[:, 0] if vector else F


def _require(op: PropagationOperator, kinds, name):
    if not isinstance(op, PropagationOperator):
        raise TypeError(f"{name} expects a PropagationOperator")
    if op.kind not in kinds:
        allowed = ", ".join(k.value for k in kinds)
        raise ValueError(f"{name} needs an operator of kind {allowed}; got {op.kind.value}")


def propagate_iterative(S: PropagationOperator, Y, params: SolverParams = SolverParams()) -> SolveResult:
    """Iterate ``F <- alpha S F + (1 - alpha) Y`` from ``F = Y``.

    Stops when the max-abs entrywise change is at most ``params.tol``. If
    ``params.max_iter`` is reached first the last iterate is returned with
    ``converged=False`` and a :class:`ConvergenceWarning` is issued.
    """
    _require(S, _PROPAGATORS, "propagate_iterative")
    Y, vector = _as_labels(Y, S.n)
    alpha = params.alpha
    A = S.matrix
    base = (1.0 - alpha) * Y
    F = Y.copy()
    delta = np.inf
    for it in range(1, params.max_iter + 1):
        F_new = alpha * (A @ F) + base
        delta = float(np.max(np.abs(F_new - F))) if F.size else 0.0
        F = F_new
        if delta <= params.tol:
            return SolveResult(_shape_back(F, vector), it, delta, True)
    warnings.warn(
        f"propagation did not reach tol={params.tol} in {params.max_iter} iterations "
        f"(last change {delta:.3e})", ConvergenceWarning, stacklevel=2)
    return SolveResult(_shape_back(F, vector), params.max_iter, delta, False)


def propagate_clamped(S: PropagationOperator, Y, labeled_mask,
                      params: SolverParams = SolverParams()) -> SolveResult:
    """Label propagation with labeled rows reset to ``Y`` after every step.

    Equivalent to ``F <- I_a S F + (I - I_a) Y`` where the diagonal of
    ``I_a`` is 0 on labeled nodes and 1 elsewhere. ``params.alpha`` and
    ``params.gamma`` are not used.
    """
    _require(S, (OperatorKind.RANDOM_WALK,), "propagate_clamped")
    Y, vector = _as_labels(Y, S.n)
    mask = np.asarray(labeled_mask, dtype=bool)
    if mask.shape != (S.n,):
        raise ValueError(f"labeled_mask must have length {S.n}")
    if not mask.any():
        raise ValueError("labeled_mask marks no labeled nodes")
    free = ~mask
    A = S.matrix[free]
    F = Y.copy()
    delta = np.inf
    for it in range(1, params.max_iter + 1):
        upd = A @ F
        delta = float(np.max(np.abs(upd - F[free]))) if upd.size else 0.0
        F[free] = upd
        if delta <= params.tol:
            return SolveResult(_shape_back(F, vector), it, delta, True)
    warnings.warn(
        f"clamped propagation did not reach tol={params.tol} in {params.max_iter} iterations "
        f"(last change {delta:.3e})", ConvergenceWarning, stacklevel=2)
    return SolveResult(_shape_back(F, vector), params.max_iter, delta, False)


def _solve_columns(A, B, symmetric, precondition=False) -> tuple[np.ndarray, float]:
    n = A.shape[0]
    X = np.zeros_like(B)
    worst = 0.0
    M = None
    if precondition:
        diag = A.diagonal()
        M = sparse.diags(np.where(diag != 0, 1.0 / diag, 1.0))
    method = spla.cg if symmetric else spla.bicgstab
    name = "conjugate gradient" if symmetric else "BiCGSTAB"
    for j in range(B.shape[1]):
        b = B[:, j]
        bnorm = np.linalg.norm(b)
        if bnorm == 0:
            continue
        x, info = method(A, b, rtol=LINEAR_TARGET, atol=0.0, maxiter=10 * n, M=M)
        if info < 0 or not np.all(np.isfinite(x)):
            raise SolverError(j, info, name)
        rel = float(np.linalg.norm(b - A @ x) / bnorm)
        if rel > LINEAR_RTOL:
            raise SolverError(j, info, name)
        X[:, j] = x
        worst = max(worst, rel)
    return X, worst


def solve_closed_form(S: PropagationOperator, Y, alpha: float = 0.85,
                      precondition: bool = False) -> SolveResult:
    """Limit of the propagation iteration, ``(1 - alpha)(I - alpha S)^-1 Y``."""
    _require(S, _PROPAGATORS, "solve_closed_form")
    _check_alpha(alpha)
    Y, vector = _as_labels(Y, S.n)
    A = sparse.csr_matrix(sparse.identity(S.n, format="csr") - alpha * S.matrix)
    symmetric = S.kind is OperatorKind.SYMMETRIC_NORMALIZED
    F, res = _solve_columns(A, (1.0 - alpha) * Y, symmetric, precondition)
    return SolveResult(_shape_back(F, vector), 0, res, True)


def _solve_regularized(L, Y, gamma, precondition):
    Y, vector = _as_labels(Y, L.n)
    A = sparse.csr_matrix(L.matrix + gamma * sparse.identity(L.n, format="csr"))
    F, res = _solve_columns(A, gamma * Y, True, precondition)
    return SolveResult(_shape_back(F, vector), 0, res, True)


def solve_unnormalized(L_avg: PropagationOperator, Y, gamma: float = 1.0,
                       precondition: bool = False) -> SolveResult:
    """Minimizer of the un-normalized objective: ``gamma (L_avg + gamma I)^-1 Y``."""
    _require(L_avg, (OperatorKind.UNNORMALIZED_LAPLACIAN,), "solve_unnormalized")
    _check_gamma(gamma)
    return _solve_regularized(L_avg, Y, gamma, precondition)


def solve_normalized_regularized(L_sym_avg: PropagationOperator, Y, gamma: float = 1.0,
                                 precondition: bool = False) -> SolveResult:
    """``gamma (L_sym_avg + gamma I)^-1 Y``.

    Same answer as :func:`solve_closed_form` on ``S_sym`` with
    ``alpha = 1 / (1 + gamma)``.
    """
    _require(L_sym_avg, (OperatorKind.SYMMETRIC_LAPLACIAN,), "solve_normalized_regularized")
    _check_gamma(gamma)
    return _solve_regularized(L_sym_avg, Y, gamma, precondition)


# --- objectives ---------------------------------------------------------

def _fidelity(F, Y, gamma):
    return gamma * float(np.sum((F - Y) ** 2))


def _objective(F, Y, coll: NetworkCollection, gamma, normalized):
    F = np.asarray(F, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if F.ndim == 1:
        F, Y = F[:, None], Y[:, None]
    if F.shape != Y.shape or F.shape[0] != coll.n:
        raise ValueError(f"F {F.shape} and Y {Y.shape} must both have {coll.n} rows")
    smooth = 0.0
    for net in coll:
        W = net.weights.tocoo()
        G = F
        if normalized:
            d = degrees(net)
            scale = np.zeros_like(d)
            scale[d > 0] = 1.0 / np.sqrt(d[d > 0])
            G = F * scale[:, None]
        diff = G[W.row] - G[W.col]
        # every undirected edge appears twice in W, as in the double sum over i, j
        smooth += float(np.sum(W.data * np.sum(diff**2, axis=1)))
    return smooth / (2.0 * coll.m) + _fidelity(F, Y, gamma)


def objective_normalized(F, Y, coll: NetworkCollection, gamma: float) -> float:
    """``1/(2m) sum_k sum_ij W_ij |F_i/sqrt(d_i) - F_j/sqrt(d_j)|^2 + gamma |F - Y|^2``."""
    return _objective(F, Y, coll, gamma, normalized=True)


def objective_unnormalized(F, Y, coll: NetworkCollection, gamma: float) -> float:
    """``1/(2m) sum_k sum_ij W_ij |F_i - F_j|^2 + gamma |F - Y|^2``."""
    return _objective(F, Y, coll, gamma, normalized=False)
