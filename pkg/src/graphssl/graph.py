"""Sparse symmetric networks over a shared node index.

A :class:`SparseNetwork` wraps one symmetric, non-negative, loop-free weight
matrix stored in CSR form. A :class:`NetworkCollection` groups several of them
over the same node names; it is the unit the integration routines consume.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse
from scipy.spatial.distance import pdist, squareform

KERNEL_EXPONENTS = ("norm", "norm-squared")


class GraphFormatError(ValueError):
    """Raised when an edge-list or node-list file cannot be parsed."""

    def __init__(self, path, lineno, msg):
        self.path = str(path)
        self.lineno = lineno
        where = f"{self.path}:{lineno}" if lineno is not None else self.path
        super().__init__(f"{where}: {msg}")


def _canonical_csr(W) -> sparse.csr_matrix:
    W = sparse.csr_matrix(W, dtype=np.float64)
    W.sum_duplicates()
    W.eliminate_zeros()
    W.sort_indices()
    return W


@dataclass(frozen=True, eq=False)
class SparseNetwork:
    """One weighted undirected network ``W`` on ``n`` nodes.

    Validated on construction: square, symmetric (exactly), no diagonal
    entries, every stored weight strictly positive. The matrix is kept in
    canonical CSR form and marked read-only.
    """

    weights: sparse.csr_matrix

    def __post_init__(self):
        W = _canonical_csr(self.weights)
        if W.shape[0] != W.shape[1]:
            raise ValueError(f"weight matrix must be square, got {W.shape}")
        if W.nnz and not np.all(np.isfinite(W.data)):
            raise ValueError("weights must be finite")
        if W.nnz and W.data.min() < 0:
            raise ValueError("weights must be non-negative")
        if W.diagonal().any():
            raise ValueError("self-loops are not allowed")
        if (W != W.T).nnz:
            raise ValueError("weight matrix must be symmetric")
        for arr in (W.data, W.indices, W.indptr):
            arr.setflags(write=False)
        object.__setattr__(self, "weights", W)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def nnz(self) -> int:
        return self.weights.nnz

    def toarray(self) -> np.ndarray:
        return self.weights.toarray()

    def edges(self):
        """Yield ``(i, j, w)`` once per undirected edge, with ``i < j``."""
        upper = sparse.triu(self.weights, k=1).tocoo()
        order = np.lexsort((upper.col, upper.row))
        for i, j, w in zip(upper.row[order], upper.col[order], upper.data[order]):
            yield int(i), int(j), float(w)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, float]]) -> "SparseNetwork":
        """Build from undirected ``(i, j, w)`` triples; the reverse edge is implied."""
        rows, cols, vals = [], [], []
        seen = {}
        for i, j, w in edges:
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) out of range for n={n}")
            key = (min(i, j), max(i, j))
            if key in seen:
                if seen[key] != w:
                    raise ValueError(f"conflicting weights for edge {key}: {seen[key]} vs {w}")
                continue
            seen[key] = w
            if w == 0:
                continue
            rows += [i, j]
            cols += [j, i]
            vals += [w, w]
        W = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n), dtype=np.float64)
        return cls(W)

    @classmethod
    def empty(cls, n: int) -> "SparseNetwork":
        return cls(sparse.csr_matrix((n, n), dtype=np.float64))


@dataclass(frozen=True, eq=False)
class NetworkCollection:
    """``m >= 1`` networks sharing one node index."""

    networks: tuple[SparseNetwork, ...]
    node_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        nets = tuple(self.networks)
        if not nets:
            raise ValueError("a collection needs at least one network")
        n = nets[0].n
        if any(net.n != n for net in nets):
            raise ValueError("all networks in a collection must have the same node count")
        names = tuple(self.node_names) or tuple(str(i) for i in range(n))
        if len(names) != n:
            raise ValueError(f"got {len(names)} node names for {n} nodes")
        if len(set(names)) != n:
            raise ValueError("node names must be unique")
        object.__setattr__(self, "networks", nets)
        object.__setattr__(self, "node_names", names)

    @property
    def n(self) -> int:
        return self.networks[0].n

    @property
    def m(self) -> int:
        return len(self.networks)

    def __len__(self):
        return self.m

    def __iter__(self):
        return iter(self.networks)

    def __getitem__(self, k):
        return self.networks[k]

    def index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.node_names)}

    def subset(self, which: Sequence[int]) -> "NetworkCollection":
        """Collection restricted to the networks at positions ``which``."""
        return NetworkCollection(tuple(self.networks[k] for k in which), self.node_names)

    def permuted(self, perm: Sequence[int]) -> "NetworkCollection":
        """Relabel nodes so that new node ``i`` is old node ``perm[i]``."""
        perm = np.asarray(perm)
        nets = tuple(SparseNetwork(net.weights[perm][:, perm]) for net in self.networks)
        return NetworkCollection(nets, tuple(self.node_names[p] for p in perm))


def degrees(net: SparseNetwork) -> np.ndarray:
    """Row sums ``d_i = sum_j W_ij``; isolated nodes get 0."""
    return np.asarray(net.weights.sum(axis=1)).ravel()


def build_affinity(features, sigma: float, exponent: str = "norm",
                   floor: float = 1e-12) -> SparseNetwork:
    """Gaussian-type affinity network from feature vectors.

    ``W_ij = exp(-dist_ij / (2 sigma^2))`` for ``i != j`` with ``W_ii = 0``.
    ``exponent="norm"`` uses the plain Euclidean distance, ``"norm-squared"``
    its square (the usual heat kernel). Weights below ``floor`` are dropped.
    """
    X = np.asarray(features, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] < 1:
        raise ValueError("features must be an (n, p) array with n >= 1")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if exponent not in KERNEL_EXPONENTS:
        raise ValueError(f"exponent must be one of {KERNEL_EXPONENTS}, got {exponent!r}")
    n = X.shape[0]
    if n == 1:
        return SparseNetwork.empty(1)
    metric = "euclidean" if exponent == "norm" else "sqeuclidean"
    D = squareform(pdist(X, metric=metric))
    W = np.exp(-D / (2.0 * sigma**2))
    np.fill_diagonal(W, 0.0)
    W[W < floor] = 0.0
    return SparseNetwork(sparse.csr_matrix(W))


# --- file input ----------------------------------------------------------

def _data_lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            yield lineno, line


def read_edge_list(path) -> list[tuple[str, str, float]]:
    """Parse ``name<TAB>name<TAB>weight`` lines into undirected triples.

    Repeated edges with the same weight collapse to one; repeats with a
    different weight, self-loops and non-positive weights are errors.
    """
    path = Path(path)
    out = []
    seen: dict[tuple[str, str], tuple[float, int]] = {}
    for lineno, line in _data_lines(path):
        parts = line.split()
        if len(parts) != 3:
            raise GraphFormatError(path, lineno, f"expected 3 fields, got {len(parts)}")
        a, b, ws = parts
        try:
            w = float(ws)
        except ValueError:
            raise GraphFormatError(path, lineno, f"bad weight {ws!r}") from None
        if not np.isfinite(w) or w <= 0:
            raise GraphFormatError(path, lineno, f"weight must be positive and finite, got {ws}")
        if a == b:
            raise GraphFormatError(path, lineno, f"self-loop on node {a!r}")
        key = (a, b) if a < b else (b, a)
        if key in seen:
            prev, prev_line = seen[key]
            if prev != w:
                raise GraphFormatError(
                    path, lineno,
                    f"edge {a}-{b} has weight {w}, conflicting with {prev} on line {prev_line}")
            continue
        seen[key] = (w, lineno)
        out.append((a, b, w))
    return out


def read_node_list(path) -> list[str]:
    path = Path(path)
    names = []
    for lineno, line in _data_lines(path):
        if len(line.split()) != 1:
            raise GraphFormatError(path, lineno, "node names may not contain whitespace")
        names.append(line)
    if len(set(names)) != len(names):
        raise GraphFormatError(path, None, "duplicate node names")
    return names


def load_edge_list(path, node_index: dict[str, int] | None = None) -> SparseNetwork:
    """Load one network.

    With ``node_index`` given, node names are resolved against it and an
    unknown name is an error. Without it, the index is the order of first
    appearance in the file.
    """
    triples = read_edge_list(path)
    if node_index is None:
        node_index = {}
        for a, b, _ in triples:
            node_index.setdefault(a, len(node_index))
            node_index.setdefault(b, len(node_index))
    edges = []
    for a, b, w in triples:
        for name in (a, b):
            if name not in node_index:
                raise GraphFormatError(path, None, f"node {name!r} is not in the shared node index")
        edges.append((node_index[a], node_index[b], w))
    return SparseNetwork.from_edges(len(node_index), edges)


def load_collection(paths: Sequence, node_list=None) -> NetworkCollection:
    """Load several edge-list files into one collection.

    The node universe is the optional node-list file (in its order) followed
    by names from the edge files in order of first appearance. A node missing
    from some file is isolated in that network.
    """
    paths = list(paths)
    if not paths:
        raise ValueError("no network files given")
    parsed = [read_edge_list(p) for p in paths]
    index: dict[str, int] = {}
    if node_list is not None:
        for name in read_node_list(node_list):
            index.setdefault(name, len(index))
    for triples in parsed:
        for a, b, _ in triples:
            index.setdefault(a, len(index))
            index.setdefault(b, len(index))
    n = len(index)
    nets = tuple(
        SparseNetwork.from_edges(n, ((index[a], index[b], w) for a, b, w in triples))
        for triples in parsed
    )
    return NetworkCollection(nets, tuple(index))


def write_edge_list(net: SparseNetwork, path, node_names: Sequence[str] | None = None) -> None:
    names = node_names if node_names is not None else [str(i) for i in range(net.n)]
    with open(path, "w", encoding="utf-8") as fh:
        for i, j, w in net.edges():
            fh.write(f"{names[i]}\t{names[j]}\t{w!r}\n")
