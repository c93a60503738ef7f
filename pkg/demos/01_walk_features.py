"""Walk-count features on tiny graphs you can check by hand.

Run: python demos/01_walk_features.py
"""

import numpy as np

from rolenet import (
    build_embedding,
    cross_layer_walk_counts,
    from_edges,
    ratio_normalize,
    walk_counts,
)

np.set_printoptions(precision=3, suppress=True)

# A 3-node chain in one layer. Node 1 can start walks of length 1 and 2,
# node 3 can only end them.
chain = from_edges([("1", "2", "repo"), ("2", "3", "repo")])
in_counts, out_counts = walk_counts(chain, 0, k_max=3)
print("chain 1->2->3")
print("  outgoing walks per order (rows k=1..3):")
print(" ", out_counts)
print("  ingoing walks per order:")
print(" ", in_counts)

# Orders >= 2 are stored as continuation ratios: walks of length k per walk
# of length k-1. That kills the serial correlation between orders.
print("  normalized outgoing block:")
print(" ", ratio_normalize(out_counts))

# A 2-cycle shows that these are walks, not simple paths: you can keep
# going around, so every order counts 1 per node.
cycle = from_edges([("a", "b", "repo"), ("b", "a", "repo")])
_, cycle_out = walk_counts(cycle, 0, k_max=4)
print("\n2-cycle a<->b, outgoing counts for k=1..4 (all ones):")
print(" ", cycle_out)

# Cross-layer walks: k steps in the first layer, then k' in the second.
# Here the only such walk is 1 -(repo)-> 2 -(unsecured)-> 3.
two = from_edges([("1", "2", "repo"), ("2", "3", "unsecured")])
orders, cross_in, cross_out = cross_layer_walk_counts(two, 0, 1, k_max=3)
print("\ncross-layer patterns (k, k') =", orders)
print("  walks starting at each node, pattern (1,1):", cross_out[0])
print("  walks ending at each node, pattern (1,1):  ", cross_in[0])

# The full embedding stacks per-layer in/out blocks (plus cross-layer
# blocks when asked). Column i is the feature vector of node i.
emb = build_embedding(two, k_max=3, include_cross=True)
print(f"\nfull embedding: {emb.n_features} features x {emb.n_nodes} nodes")
for name, row in zip(emb.column_names(), emb.values):
    print(f"  {name:22s} {row}")
