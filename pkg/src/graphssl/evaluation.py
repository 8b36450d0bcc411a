"""Annotations, sign predictions, confusion counts and k-fold cross-validation."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .graph import NetworkCollection
from .laplacian import (integrate_random_walk, integrate_sym_laplacian, integrate_symmetric,
                        integrate_unnormalized)
from .solvers import (ConvergenceWarning, SolveResult, SolverParams, propagate_clamped,
                      propagate_iterative, solve_closed_form, solve_normalized_regularized,
                      solve_unnormalized)

METHODS = ("rw", "sym", "unnorm", "sym-reg", "rw-clamped")
# column order of the integrated-network comparison table
TABLE_METHODS = ("sym", "rw", "unnorm")
METHOD_TITLES = {
    "rw": "random_walk",
    "sym": "normalized",
    "unnorm": "unnormalized",
    "sym-reg": "normalized_regularized",
    "rw-clamped": "random_walk_clamped",
}


class AnnotationFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class AnnotationSet:
    """Known multi-label membership, one +1/-1 entry per (node, class)."""

    membership: np.ndarray
    class_names: tuple[str, ...]
    node_names: tuple[str, ...] = ()

    def __post_init__(self):
        M = np.array(self.membership, dtype=np.int8)
        if M.ndim != 2:
            raise ValueError("membership must be an (n, c) matrix")
        if not np.all((M == 1) | (M == -1)):
            raise ValueError("membership entries must be +1 or -1")
        names = tuple(self.class_names)
        if len(names) != M.shape[1]:
            raise ValueError(f"{len(names)} class names for {M.shape[1]} columns")
        nodes = tuple(self.node_names) or tuple(str(i) for i in range(M.shape[0]))
        if len(nodes) != M.shape[0]:
            raise ValueError(f"{len(nodes)} node names for {M.shape[0]} rows")
        M.setflags(write=False)
        object.__setattr__(self, "membership", M)
        object.__setattr__(self, "class_names", names)
        object.__setattr__(self, "node_names", nodes)

    @property
    def n(self) -> int:
        return self.membership.shape[0]

    @property
    def c(self) -> int:
        return self.membership.shape[1]

    def permuted(self, perm) -> "AnnotationSet":
        perm = np.asarray(perm)
        return AnnotationSet(self.membership[perm], self.class_names,
                             tuple(self.node_names[p] for p in perm))


@dataclass(frozen=True)
class FoldAssignment:
    k: int
    fold_of: np.ndarray
    seed: int | None = None

    @property
    def n(self) -> int:
        return len(self.fold_of)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.fold_of, minlength=self.k)


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @property
    def accuracy(self) -> float:
        if self.total == 0:
            raise ValueError("accuracy is undefined with no evaluated pairs")
        return (self.tp + self.tn) / self.total

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(self.tp + other.tp, self.tn + other.tn,
                               self.fp + other.fp, self.fn + other.fn)


@dataclass(frozen=True)
class ClassResult:
    name: str
    counts: ConfusionCounts
    Q: float


@dataclass(frozen=True)
class EvalReport:
    per_class: tuple[ClassResult, ...]
    method: str
    networks: str
    k: int
    seed: int | None
    failed_folds: tuple[int, ...] = ()
    predictions: np.ndarray | None = field(default=None, compare=False, repr=False)

    def q(self) -> np.ndarray:
        return np.array([r.Q for r in self.per_class])

    def mean_q(self) -> float:
        return float(np.mean(self.q()))


# --- label handling -------------------------------------------------------

def build_initial_labels(ann: AnnotationSet, train_mask) -> np.ndarray:
    """Initial label matrix: known +1/-1 rows on training nodes, zeros elsewhere."""
    mask = np.asarray(train_mask, dtype=bool)
    if mask.shape != (ann.n,):
        raise ValueError(f"train_mask must have length {ann.n}, got {mask.shape}")
    if not mask.any():
        raise ValueError("training mask is empty")
    Y = np.zeros((ann.n, ann.c))
    Y[mask] = ann.membership[mask]
    return Y


def predict(F) -> np.ndarray:
    """Entrywise sign with ties going to -1 (not in class)."""
    return np.where(np.asarray(F) > 0, 1, -1).astype(np.int8)


def confusion(pred, truth, eval_mask=None, class_j: int | None = None) -> ConfusionCounts:
    """Confusion counts for one class over the evaluated nodes.

    ``pred`` and ``truth`` are +1/-1 arrays, either (n,) or (n, c) with
    ``class_j`` picking the column.
    """
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if class_j is not None:
        pred, truth = pred[:, class_j], truth[:, class_j]
    if pred.shape != truth.shape or pred.ndim != 1:
        raise ValueError(f"prediction {pred.shape} and truth {truth.shape} must be equal-length vectors")
    if eval_mask is not None:
        mask = np.asarray(eval_mask, dtype=bool)
        if mask.shape != pred.shape:
            raise ValueError("eval_mask length mismatch")
        pred, truth = pred[mask], truth[mask]
    pp, tp_ = pred > 0, truth > 0
    return ConfusionCounts(
        tp=int(np.sum(pp & tp_)),
        tn=int(np.sum(~pp & ~tp_)),
        fp=int(np.sum(pp & ~tp_)),
        fn=int(np.sum(~pp & tp_)),
    )


def assign_folds(n: int, k: int, seed: int) -> FoldAssignment:
    """Shuffle node ids with a seeded PCG64 stream and deal them round-robin."""
    if k < 2:
        raise ValueError(f"need at least 2 folds, got {k}")
    if n < k:
        raise ValueError(f"cannot split {n} nodes into {k} folds")
    rng = np.random.Generator(np.random.PCG64(seed))
    order = rng.permutation(n)
    fold_of = np.empty(n, dtype=np.int64)
    fold_of[order] = np.arange(n) % k
    return FoldAssignment(k, fold_of, seed)


# --- method dispatch ---------------------------------------------------

def solve_method(coll: NetworkCollection, Y, method: str, params: SolverParams = SolverParams(),
                 train_mask=None, iterative: bool = False, precondition: bool = False) -> SolveResult:
    """Build the operator for ``method`` and run its solver on ``Y``.

    ``rw``/``sym`` use the closed form unless ``iterative`` is set;
    ``unnorm``/``sym-reg`` use ``params.gamma``; ``rw-clamped`` needs
    ``train_mask``.
    """
    if method == "rw" or method == "sym":
        op = integrate_random_walk(coll) if method == "rw" else integrate_symmetric(coll)
        if iterative:
            return propagate_iterative(op, Y, params)
        return solve_closed_form(op, Y, params.alpha, precondition=precondition)
    if method == "unnorm":
        return solve_unnormalized(integrate_unnormalized(coll), Y, params.gamma, precondition)
    if method == "sym-reg":
        return solve_normalized_regularized(integrate_sym_laplacian(coll), Y, params.gamma,
                                            precondition)
    if method == "rw-clamped":
        if train_mask is None:
            train_mask = np.any(np.asarray(Y) != 0, axis=1)
        return propagate_clamped(integrate_random_walk(coll), Y, train_mask, params)
    raise ValueError(f"unknown method {method!r}; expected one of {', '.join(METHODS)}")


def cross_validate(coll: NetworkCollection, ann: AnnotationSet, method: str,
                   params: SolverParams = SolverParams(), k: int = 3, seed: int = 42,
                   folds: FoldAssignment | None = None, iterative: bool = False,
                   networks: str | None = None) -> EvalReport:
    """k-fold cross-validated accuracy per class.

    Each fold hides its nodes' labels, solves for all classes at once, and
    scores the hidden nodes. Confusion counts are pooled over folds before
    Q is computed. Folds whose iterative solve fails to converge are left out
    and listed in ``failed_folds``.
    """
    if ann.n != coll.n:
        raise ValueError(f"annotations cover {ann.n} nodes, collection has {coll.n}")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {', '.join(METHODS)}")
    if folds is None:
        folds = assign_folds(coll.n, k, seed)
    elif folds.n != coll.n:
        raise ValueError("fold assignment does not match node count")
    k = folds.k

    totals = [ConfusionCounts() for _ in range(ann.c)]
    pred_all = np.zeros((ann.n, ann.c), dtype=np.int8)
    failed = []
    for f in range(k):
        test = folds.fold_of == f
        if not test.any():
            continue
        train = ~test
        Y = build_initial_labels(ann, train)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConvergenceWarning)
            res = solve_method(coll, Y, method, params, train_mask=train, iterative=iterative)
        if not res.converged:
            failed.append(f)
            continue
        pred = predict(res.F)
        pred_all[test] = pred[test]
        for j in range(ann.c):
            totals[j] = totals[j] + confusion(pred, ann.membership, test, j)
    if failed:
        warnings.warn(f"{len(failed)} of {k} folds did not converge and were skipped",
                      ConvergenceWarning, stacklevel=2)
    per_class = tuple(
        ClassResult(name, cnt, cnt.accuracy if cnt.total else float("nan"))
        for name, cnt in zip(ann.class_names, totals)
    )
    if networks is None:
        networks = f"integrated({coll.m})" if coll.m > 1 else "single"
    return EvalReport(per_class, method, networks, k, folds.seed, tuple(failed), pred_all)


# --- file formats -------------------------------------------------------

def _read_table(path):
    path = Path(path)
    rows = []
    header = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if header is None:
                header = parts
                if header[0] != "node" or len(header) < 2:
                    raise AnnotationFormatError(f"{path}:{lineno}: header must start with 'node' and name at least one class")
                continue
            if len(parts) != len(header):
                raise AnnotationFormatError(f"{path}:{lineno}: expected {len(header)} fields, got {len(parts)}")
            rows.append((lineno, parts))
    if header is None:
        raise AnnotationFormatError(f"{path}: empty file")
    return path, header, rows


def _parse_sign(tok, path, lineno):
    tok = tok.strip()
    if tok in ("1", "+1"):
        return 1
    if tok == "-1":
        return -1
    raise AnnotationFormatError(f"{path}:{lineno}: expected +1 or -1, got {tok!r}")


def _align(names, node_names, path):
    index = {name: i for i, name in enumerate(node_names)}
    rows = []
    for name in names:
        if name not in index:
            raise AnnotationFormatError(
                f"{path}: node {name!r} is not in the network collection (missing from --nodes?)")
        rows.append(index[name])
    return np.asarray(rows, dtype=np.int64)


def load_annotations(path, node_names: Sequence[str] | None = None) -> AnnotationSet:
    """Read a ``node<TAB>class_1...`` table of +1/-1 entries.

    With ``node_names`` the rows are reordered to that index, and every node
    must be annotated exactly once. A ``train`` column, if present, is ignored.
    """
    path, header, rows = _read_table(path)
    cols = [i for i, h in enumerate(header[1:], start=1) if h != "train"]
    class_names = tuple(header[i] for i in cols)
    names = [parts[0] for _, parts in rows]
    if len(set(names)) != len(names):
        raise AnnotationFormatError(f"{path}: duplicate node rows")
    M = np.array([[_parse_sign(parts[i], path, ln) for i in cols] for ln, parts in rows],
                 dtype=np.int8).reshape(len(rows), len(cols))
    if node_names is None:
        return AnnotationSet(M, class_names, tuple(names))
    node_names = tuple(node_names)
    where = _align(names, node_names, path)
    if len(where) != len(node_names):
        missing = sorted(set(node_names) - set(names))
        raise AnnotationFormatError(f"{path}: no annotation for {len(missing)} node(s), e.g. {missing[0]!r}")
    full = np.empty((len(node_names), len(cols)), dtype=np.int8)
    full[where] = M
    return AnnotationSet(full, class_names, node_names)


def load_training_labels(path, node_names: Sequence[str]) -> tuple[tuple[str, ...], np.ndarray, np.ndarray]:
    """Initial labels for a single train/test split.

    Rows with ``train`` = 1 (or every listed row when there is no ``train``
    column) contribute their +1/-1 entries; other rows, and nodes absent from
    the file, are unlabeled. Returns ``(class_names, Y, train_mask)``.
    """
    path, header, rows = _read_table(path)
    train_col = header.index("train") if "train" in header else None
    cols = [i for i in range(1, len(header)) if i != train_col]
    class_names = tuple(header[i] for i in cols)
    index = {name: i for i, name in enumerate(node_names)}
    Y = np.zeros((len(node_names), len(cols)))
    mask = np.zeros(len(node_names), dtype=bool)
    for ln, parts in rows:
        name = parts[0]
        if name not in index:
            raise AnnotationFormatError(f"{path}:{ln}: node {name!r} is not in the network collection")
        if train_col is not None:
            flag = parts[train_col].strip()
            if flag not in ("0", "1"):
                raise AnnotationFormatError(f"{path}:{ln}: train flag must be 0 or 1, got {flag!r}")
            if flag == "0":
                continue
        i = index[name]
        if mask[i]:
            raise AnnotationFormatError(f"{path}:{ln}: duplicate row for node {name!r}")
        mask[i] = True
        Y[i] = [_parse_sign(parts[c], path, ln) for c in cols]
    if not mask.any():
        raise AnnotationFormatError(f"{path}: no training rows")
    return class_names, Y, mask


def write_annotations(ann: AnnotationSet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("node\t" + "\t".join(ann.class_names) + "\n")
        for name, row in zip(ann.node_names, ann.membership):
            fh.write(name + "\t" + "\t".join("+1" if v > 0 else "-1" for v in row) + "\n")


def format_q(q: float) -> str:
    return "nan" if np.isnan(q) else f"{100.0 * q:.2f}"


def report_rows(report: EvalReport) -> list[str]:
    lines = ["class\ttp\ttn\tfp\tfn\tQ_percent"]
    for r in report.per_class:
        c = r.counts
        lines.append(f"{r.name}\t{c.tp}\t{c.tn}\t{c.fp}\t{c.fn}\t{format_q(r.Q)}")
    return lines


def comparison_rows(reports: dict[str, EvalReport]) -> list[str]:
    """Per-class Q (%) side by side, one column per method."""
    methods = list(reports)
    first = reports[methods[0]]
    lines = ["class\t" + "\t".join(METHOD_TITLES[m] for m in methods)]
    for j, r in enumerate(first.per_class):
        vals = [format_q(reports[m].per_class[j].Q) for m in methods]
        lines.append(r.name + "\t" + "\t".join(vals))
    return lines
