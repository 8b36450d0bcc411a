"""Equal-weight integration of per-network propagation operators.

Every operator is the plain average over the ``m`` networks of a per-network
term. Where a node has zero degree in network ``k`` that network contributes
nothing to the node's row and column (no division by zero).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .graph import NetworkCollection, SparseNetwork, degrees


class OperatorKind(str, enum.Enum):
    RANDOM_WALK = "random-walk"
    SYMMETRIC_NORMALIZED = "symmetric-normalized"
    UNNORMALIZED_LAPLACIAN = "unnormalized-laplacian"
    SYMMETRIC_LAPLACIAN = "symmetric-laplacian"


@dataclass(frozen=True, eq=False)
class PropagationOperator:
    kind: OperatorKind
    matrix: sparse.csr_matrix
    m: int

    def __post_init__(self):
        M = self.matrix
        for arr in (M.data, M.indices, M.indptr):
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def symmetric(self) -> bool:
        return (self.matrix != self.matrix.T).nnz == 0

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def __matmul__(self, other):
        return self.matrix @ other


def _inv_pow(d: np.ndarray, p: float) -> np.ndarray:
    out = np.zeros_like(d)
    pos = d > 0
    out[pos] = d[pos] ** (-p)
    return out


def _finish(total, m, kind) -> PropagationOperator:
    M = sparse.csr_matrix(total / m)
    M.sum_duplicates()
    M.sort_indices()
    return PropagationOperator(kind, M, m)


def random_walk_term(net: SparseNetwork) -> sparse.csr_matrix:
    """``D^-1 W`` for one network."""
    W = net.weights.tocoo()
    inv = _inv_pow(degrees(net), 1.0)
    vals = W.data * inv[W.row]
    return sparse.csr_matrix((vals, (W.row, W.col)), shape=W.shape)


def symmetric_term(net: SparseNetwork) -> sparse.csr_matrix:
    """``D^-1/2 W D^-1/2`` for one network, exactly symmetric."""
    W = net.weights.tocoo()
    s = _inv_pow(degrees(net), 0.5)
    # s_i * s_j is commutative in floating point, so (i,j) and (j,i) match bitwise
    vals = W.data * (s[W.row] * s[W.col])
    return sparse.csr_matrix((vals, (W.row, W.col)), shape=W.shape)


def laplacian_term(net: SparseNetwork) -> sparse.csr_matrix:
    """``D - W`` for one network."""
    return sparse.csr_matrix(sparse.diags(degrees(net)) - net.weights)


def _average(coll: NetworkCollection, term, kind) -> PropagationOperator:
    if coll.m < 1:
        raise ValueError("empty collection")
    total = sparse.csr_matrix((coll.n, coll.n), dtype=np.float64)
    for net in coll:
        total = total + term(net)
    return _finish(total, coll.m, kind)


def integrate_random_walk(coll: NetworkCollection) -> PropagationOperator:
    """``S_rw = (1/m) sum_k D_k^-1 W_k``.

    Rows are stochastic for nodes with positive degree everywhere; a node
    isolated in some networks gets row sum equal to the fraction of networks
    where it has neighbours.
    """
    return _average(coll, random_walk_term, OperatorKind.RANDOM_WALK)


def integrate_symmetric(coll: NetworkCollection) -> PropagationOperator:
    """``S_sym = (1/m) sum_k D_k^-1/2 W_k D_k^-1/2`` (symmetric, spectrum in [-1, 1])."""
    return _average(coll, symmetric_term, OperatorKind.SYMMETRIC_NORMALIZED)


def integrate_unnormalized(coll: NetworkCollection) -> PropagationOperator:
    """``L_avg = (1/m) sum_k (D_k - W_k)`` (symmetric positive semi-definite)."""
    return _average(coll, laplacian_term, OperatorKind.UNNORMALIZED_LAPLACIAN)


def integrate_sym_laplacian(coll: NetworkCollection) -> PropagationOperator:
    """``(1/m) sum_k (I - D_k^-1/2 W_k D_k^-1/2)``, computed as ``I - S_sym``."""
    S = integrate_symmetric(coll).matrix
    M = sparse.csr_matrix(sparse.identity(coll.n, format="csr") - S)
    M.sort_indices()
    return PropagationOperator(OperatorKind.SYMMETRIC_LAPLACIAN, M, coll.m)


def isolated_anywhere(coll: NetworkCollection) -> np.ndarray:
    """Boolean mask of nodes with zero degree in at least one network."""
    mask = np.zeros(coll.n, dtype=bool)
    for net in coll:
        mask |= degrees(net) == 0
    return mask


def operator_stats(op: PropagationOperator, coll: NetworkCollection | None = None) -> dict:
    """Summary numbers for an operator, as printed by ``graphssl integrate``.

    Row-sum extrema are taken over nodes that have neighbours in every
    network when ``coll`` is given, otherwise over all rows.
    """
    rs = np.asarray(op.matrix.sum(axis=1)).ravel()
    keep = ~isolated_anywhere(coll) if coll is not None else np.ones(op.n, dtype=bool)
    stats = {
        "kind": op.kind.value,
        "n": op.n,
        "m": op.m,
        "nnz": int(op.matrix.nnz),
        "isolated_somewhere": int((~keep).sum()),
        "row_sum_min": float(rs[keep].min()) if keep.any() else float("nan"),
        "row_sum_max": float(rs[keep].max()) if keep.any() else float("nan"),
        "symmetric": op.symmetric,
    }
    return stats
