"""Command-line front end: ``graphssl {integrate,predict,evaluate,gen-synthetic}``.

Exit status is 0 on success, 1 on data or runtime errors and 2 on usage
errors. Settings come from flags, then an optional TOML config file, then
built-in defaults.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .evaluation import (METHODS, TABLE_METHODS, AnnotationFormatError, comparison_rows,
                         cross_validate, load_annotations, load_training_labels, predict,
                         report_rows, solve_method)
from .graph import (KERNEL_EXPONENTS, GraphFormatError, NetworkCollection, SparseNetwork,
                    build_affinity, read_edge_list, read_node_list)
from .laplacian import (integrate_random_walk, integrate_sym_laplacian, integrate_symmetric,
                        integrate_unnormalized, operator_stats)
from .solvers import SolverError, SolverParams
from .synthetic import planted_partition, write_dataset

OPERATORS = {
    "rw": integrate_random_walk,
    "sym": integrate_symmetric,
    "unnorm": integrate_unnormalized,
    "sym-reg": integrate_sym_laplacian,
    "rw-clamped": integrate_random_walk,
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    method: str = "sym"
    alpha: float = 0.85
    gamma: float = 1.0
    tol: float = 1e-9
    max_iter: int = 10000
    iterative: bool = False
    folds: int = 3
    seed: int = 42
    sigma: float = 1.0
    kernel_exponent: str = "norm"
    affinity_floor: float = 1e-12

    def solver_params(self) -> SolverParams:
        return SolverParams(self.alpha, self.gamma, self.tol, self.max_iter)


def resolve_config(args) -> RunConfig:
    """Merge flags over the config file over the dataclass defaults."""
    values = {}
    if getattr(args, "config", None):
        with open(args.config, "rb") as fh:
            raw = tomllib.load(fh)
        known = {f.name for f in fields(RunConfig)}
        for key, val in raw.items():
            key = key.replace("-", "_")
            if key not in known:
                raise UsageError(f"{args.config}: unknown config key {key!r}")
            values[key] = val
    for f in fields(RunConfig):
        val = getattr(args, f.name, None)
        if val is not None:
            values[f.name] = val
    cfg = RunConfig(**values)
    if cfg.method not in METHODS:
        raise UsageError(f"unknown method {cfg.method!r}")
    if cfg.kernel_exponent not in KERNEL_EXPONENTS:
        raise UsageError(f"unknown kernel exponent {cfg.kernel_exponent!r}")
    if cfg.folds < 2:
        raise UsageError(f"--folds must be at least 2, got {cfg.folds}")
    try:
        cfg.solver_params()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return cfg


# --- input assembly ------------------------------------------------------

def read_features(path):
    """Node feature table: ``node<TAB>x_1<TAB>...``; ``#`` lines skipped."""
    names, rows = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            try:
                rows.append([float(x) for x in parts[1:]])
            except ValueError:
                raise GraphFormatError(path, lineno, "non-numeric feature") from None
            names.append(parts[0])
    if not rows or len({len(r) for r in rows}) != 1:
        raise GraphFormatError(path, None, "feature rows must be non-empty and of equal length")
    return names, np.array(rows)


def load_inputs(network_paths, feature_paths=(), node_list=None, cfg: RunConfig | None = None):
    """Collection from edge lists plus affinity networks built from feature tables."""
    cfg = cfg or RunConfig()
    parsed = [read_edge_list(p) for p in network_paths]
    feats = [read_features(p) for p in feature_paths]
    if not parsed and not feats:
        raise UsageError("no input networks given")
    index: dict[str, int] = {}
    if node_list:
        for name in read_node_list(node_list):
            index.setdefault(name, len(index))
    for triples in parsed:
        for a, b, _ in triples:
            index.setdefault(a, len(index))
            index.setdefault(b, len(index))
    for names, _ in feats:
        for name in names:
            index.setdefault(name, len(index))
    n = len(index)
    nets = [SparseNetwork.from_edges(n, ((index[a], index[b], w) for a, b, w in t)) for t in parsed]
    for names, X in feats:
        local = build_affinity(X, cfg.sigma, cfg.kernel_exponent, cfg.affinity_floor)
        pos = np.array([index[name] for name in names])
        nets.append(SparseNetwork.from_edges(n, ((pos[i], pos[j], w) for i, j, w in local.edges())))
    return NetworkCollection(tuple(nets), tuple(index))


def header_block(command, cfg: RunConfig, inputs: dict) -> list[str]:
    lines = [f"# graphssl {command}"]
    for f in fields(RunConfig):
        lines.append(f"# {f.name} = {getattr(cfg, f.name)}")
    for key, val in inputs.items():
        if isinstance(val, (list, tuple)):
            val = " ".join(str(v) for v in val) if val else "-"
        lines.append(f"# {key} = {val}")
    return lines


def emit(lines, output):
    text = "".join(line + "\n" for line in lines)
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# --- subcommands -------------------------------------------------------

def cmd_integrate(args) -> int:
    cfg = resolve_config(args)
    coll = load_inputs(args.networks, args.features or (), args.nodes, cfg)
    op = OPERATORS[cfg.method](coll)
    stats = operator_stats(op, coll)
    lines = [f"{key}\t{str(val).lower() if isinstance(val, bool) else val}"
             for key, val in stats.items()]
    emit(lines, args.output)
    return 0


def cmd_predict(args) -> int:
    cfg = resolve_config(args)
    coll = load_inputs(args.networks, args.features or (), args.nodes, cfg)
    class_names, Y, mask = load_training_labels(args.labels, coll.node_names)
    res = solve_method(coll, Y, cfg.method, cfg.solver_params(), train_mask=mask,
                       iterative=cfg.iterative)
    if not res.converged:
        print(f"error: solver did not converge in {cfg.max_iter} iterations "
              f"(last change {res.residual:.3e})", file=sys.stderr)
        return 1
    pred = predict(res.F)
    lines = header_block("predict", cfg, {"networks": args.networks, "features": args.features or [],
                                          "nodes": args.nodes or "-", "labels": args.labels})
    lines.append("node\tclass\tscore\tprediction")
    for i, node in enumerate(coll.node_names):
        for j, cls in enumerate(class_names):
            lines.append(f"{node}\t{cls}\t{res.F[i, j]:.4f}\t{int(pred[i, j]):+d}")
    emit(lines, args.output)
    return 0


def cmd_evaluate(args) -> int:
    cfg = resolve_config(args)
    coll = load_inputs(args.networks, args.features or (), args.nodes, cfg)
    ann = load_annotations(args.annotations, coll.node_names)
    params = cfg.solver_params()
    methods = TABLE_METHODS if args.all_methods else (cfg.method,)
    targets = [("integrated", coll)]
    if args.each_network:
        targets += [(f"network_{k + 1}", coll.subset([k])) for k in range(coll.m)]
    lines = header_block("evaluate", cfg, {"networks": args.networks, "features": args.features or [],
                                           "nodes": args.nodes or "-",
                                           "annotations": args.annotations,
                                           "methods": list(methods)})
    failures = 0
    for label, sub in targets:
        reports = {m: cross_validate(sub, ann, m, params, k=cfg.folds, seed=cfg.seed,
                                     iterative=cfg.iterative, networks=label) for m in methods}
        for m, rep in reports.items():
            if rep.failed_folds:
                failures += 1
                lines.append(f"# {label} {m}: skipped non-converged folds "
                             + ",".join(str(f) for f in rep.failed_folds))
        lines.append(f"# network: {label}")
        if args.all_methods:
            lines += comparison_rows(reports)
        else:
            lines += report_rows(reports[cfg.method])
    emit(lines, args.output)
    return 0


def cmd_gen_synthetic(args) -> int:
    coll, ann = planted_partition(n=args.n, clusters=args.clusters, classes=args.classes,
                                  networks=args.networks, retention=args.retention,
                                  noise=args.noise, seed=args.seed)
    for p in write_dataset(coll, ann, args.out_dir):
        print(p)
    return 0


# --- parser ---------------------------------------------------------------

def _add_common(p, method_default_help="sym"):
    p.add_argument("networks", nargs="*", help="edge-list files (name<TAB>name<TAB>weight)")
    p.add_argument("--features", action="append", metavar="PATH",
                   help="feature table turned into an affinity network (repeatable)")
    p.add_argument("--nodes", metavar="PATH", help="node-list file extending the node universe")
    p.add_argument("--config", metavar="PATH", help="TOML file with default settings")
    p.add_argument("--method", choices=METHODS, default=None,
                   help=f"propagation method (default {method_default_help})")
    p.add_argument("--sigma", type=float, default=None, help="affinity kernel width (default 1)")
    p.add_argument("--kernel-exponent", dest="kernel_exponent", choices=KERNEL_EXPONENTS,
                   default=None, help="distance form in the affinity kernel (default norm)")
    p.add_argument("--affinity-floor", dest="affinity_floor", type=float, default=None,
                   help="drop affinity weights below this value (default 1e-12)")
    p.add_argument("-o", "--output", metavar="PATH", help="write to file instead of stdout")


def _add_solver(p):
    p.add_argument("--alpha", type=float, default=None, help="propagation weight (default 0.85)")
    p.add_argument("--gamma", type=float, default=None, help="regularization weight (default 1)")
    p.add_argument("--tol", type=float, default=None, help="iteration tolerance (default 1e-9)")
    p.add_argument("--max-iter", dest="max_iter", type=int, default=None,
                   help="iteration cap (default 10000)")
    p.add_argument("--iterative", action="store_true", default=None,
                   help="use fixed-point iteration instead of the closed form for rw/sym")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphssl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("integrate", help="build an integrated operator and print its statistics")
    _add_common(p)
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("predict", help="score and label every node for one train/test split")
    _add_common(p)
    _add_solver(p)
    p.add_argument("--labels", required=True, metavar="PATH",
                   help="label table; optional 'train' column marks labeled rows")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="k-fold cross-validated accuracy per class")
    _add_common(p)
    _add_solver(p)
    p.add_argument("--annotations", required=True, metavar="PATH")
    p.add_argument("--folds", type=int, default=None, help="number of folds (default 3)")
    p.add_argument("--seed", type=int, default=None, help="fold shuffling seed (default 42)")
    p.add_argument("--all-methods", action="store_true",
                   help="compare normalized, random-walk and un-normalized side by side")
    p.add_argument("--each-network", action="store_true",
                   help="also evaluate every input network on its own")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("gen-synthetic", help="write a planted-partition multi-network dataset")
    p.add_argument("--out-dir", required=True)
    p.add_argument("-n", "--nodes", dest="n", type=int, default=300)
    p.add_argument("--clusters", type=int, default=2)
    p.add_argument("--classes", type=int, default=None,
                   help="number of classes (default: one per cluster)")
    p.add_argument("--networks", type=int, default=5)
    p.add_argument("--retention", type=float, default=0.1,
                   help="probability a within-cluster pair is an edge in each network")
    p.add_argument("--noise", type=float, default=0.0,
                   help="probability a between-cluster pair is an edge in each network")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen_synthetic)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (OSError, GraphFormatError, AnnotationFormatError, SolverError, ValueError,
            tomllib.TOMLDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
