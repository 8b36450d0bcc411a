"""
Networks from feature vectors
=============================

Two noisy feature views of the same points are turned into affinity
networks and combined. Compares the plain-distance kernel with the squared
one.
"""

import numpy as np

import graphssl as gs

rng = np.random.default_rng(3)
n = 60
labels = np.repeat([1, -1], n // 2)
centers = np.where(labels[:, None] > 0, 1.0, -1.0)
view_a = centers + rng.normal(scale=0.8, size=(n, 2))
view_b = centers * [1.0, 0.0] + rng.normal(scale=0.8, size=(n, 2))

ann = gs.AnnotationSet(labels[:, None], ("positive",))
for exponent in ("norm", "norm-squared"):
    nets = tuple(gs.build_affinity(X, sigma=0.5, exponent=exponent, floor=1e-6)
                 for X in (view_a, view_b))
    coll = gs.NetworkCollection(nets)
    for method in ("sym", "unnorm"):
        rep = gs.cross_validate(coll, ann, method, k=3, seed=0)
        print(f"{exponent:>12} {method:>7}: Q = {100 * rep.per_class[0].Q:.2f}%  "
              f"(edges per network: {[net.nnz // 2 for net in nets]})")
