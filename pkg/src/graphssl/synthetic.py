"""Planted-partition multi-network datasets with known class labels."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .evaluation import AnnotationSet, write_annotations
from .graph import NetworkCollection, SparseNetwork, write_edge_list


def cluster_sizes(n: int, clusters: int) -> np.ndarray:
    base, extra = divmod(n, clusters)
    return np.array([base + (q < extra) for q in range(clusters)])


def class_membership(clusters: int, classes: int, rng) -> np.ndarray:
    """(clusters, classes) +1/-1 table.

    One-hot when ``classes == clusters``; otherwise each cluster joins each
    class with probability 1/2, redrawn until no class is constant.
    """
    if classes == clusters:
        return np.where(np.eye(clusters, dtype=bool), 1, -1)
    if clusters < 2:
        raise ValueError("need at least two clusters for non-constant classes")
    while True:
        table = np.where(rng.random((clusters, classes)) < 0.5, 1, -1)
        if np.all(table.max(axis=0) == 1) and np.all(table.min(axis=0) == -1):
            return table


def planted_partition(n: int = 300, clusters: int = 2, classes: int | None = None,
                      networks: int = 5, retention: float = 0.1, noise: float = 0.0,
                      seed: int = 0) -> tuple[NetworkCollection, AnnotationSet]:
    """Sparse views of a set of disjoint cliques.

    Nodes are split into ``clusters`` near-equal blocks. Each of the
    ``networks`` keeps every within-block pair independently with
    probability ``retention`` and adds every between-block pair with
    probability ``noise``. All weights are 1. Class labels are functions of
    the block (see :func:`class_membership`).
    """
    if classes is None:
        classes = clusters
    if not (1 <= clusters <= n):
        raise ValueError("need 1 <= clusters <= n")
    if classes < 1 or networks < 1:
        raise ValueError("classes and networks must be positive")
    if not (0 <= retention <= 1 and 0 <= noise <= 1):
        raise ValueError("retention and noise are probabilities")
    rng = np.random.Generator(np.random.PCG64(seed))
    block = np.repeat(np.arange(clusters), cluster_sizes(n, clusters))
    iu, ju = np.triu_indices(n, k=1)
    same = block[iu] == block[ju]
    prob = np.where(same, retention, noise)
    nets = []
    for _ in range(networks):
        keep = rng.random(len(iu)) < prob
        nets.append(SparseNetwork.from_edges(n, zip(iu[keep].tolist(), ju[keep].tolist(),
                                                    [1.0] * int(keep.sum()))))
    width = len(str(n))
    names = tuple(f"v{i:0{width}d}" for i in range(n))
    table = class_membership(clusters, classes, rng)
    ann = AnnotationSet(table[block], tuple(f"class_{j + 1}" for j in range(classes)), names)
    return NetworkCollection(tuple(nets), names), ann


def write_dataset(coll: NetworkCollection, ann: AnnotationSet, out_dir) -> list[Path]:
    """Write ``network_<k>.tsv``, ``nodes.txt`` and ``annotations.tsv``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for k, net in enumerate(coll, start=1):
        p = out / f"network_{k}.tsv"
        write_edge_list(net, p, coll.node_names)
        written.append(p)
    nodes = out / "nodes.txt"
    nodes.write_text("".join(name + "\n" for name in coll.node_names), encoding="utf-8")
    ann_path = out / "annotations.tsv"
    write_annotations(ann, ann_path)
    return written + [nodes, ann_path]
