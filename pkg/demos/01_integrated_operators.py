"""
Integrated propagation operators
================================

Three small networks over the same five nodes are averaged into the
random-walk, symmetric-normalized and un-normalized operators.
"""

import numpy as np

import graphssl as gs

# Each network is a list of undirected (i, j, weight) edges over 5 nodes.
# Node 4 has no edges in the second network.
edges = [
    [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0)],
    [(0, 2, 2.0), (1, 3, 0.5)],
    [(0, 4, 1.0), (1, 4, 1.0), (2, 4, 1.0)],
]
coll = gs.NetworkCollection(tuple(gs.SparseNetwork.from_edges(5, e) for e in edges))
print("degrees per network:")
for k, net in enumerate(coll, start=1):
    print(f"  W{k}:", gs.degrees(net))

S_rw = gs.integrate_random_walk(coll)
S_sym = gs.integrate_symmetric(coll)
L = gs.integrate_unnormalized(coll)

np.set_printoptions(precision=3, suppress=True)
print("\nS_rw =\n", S_rw.toarray())
# Node 4 is isolated in one of three networks, so its row sums to 2/3.
print("row sums of S_rw:", S_rw.toarray().sum(axis=1))

print("\nS_sym symmetric:", S_sym.symmetric)
print("eigenvalues of S_sym:", np.linalg.eigvalsh(S_sym.toarray()))
print("eigenvalues of L_avg:", np.linalg.eigvalsh(L.toarray()))

# The normalized Laplacian is I - S_sym by construction.
L_sym = gs.integrate_sym_laplacian(coll)
print("\nI - S_sym == L_sym:", np.array_equal(np.eye(5) - S_sym.toarray(), L_sym.toarray()))
