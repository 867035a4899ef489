"""The conjecture and tree Ramsey numbers where everything can be enumerated."""

import math
from fractions import Fraction

import numpy as np

from lks.catalog import free_trees, random_graph, tree_code
from lks.graphs import RootedTree
from lks.verifier import check_lks, ramsey_strategy, ramsey_trees

for n in range(2, 8):
    reps = [check_lks(n, k) for k in range(n)]
    print(f"n={n}: {sum(r.qualifying for r in reps)} qualifying graphs, "
          f"{sum(r.pairs for r in reps)} (graph, tree) pairs, "
          f"{sum(len(r.counterexamples) for r in reps)} counterexamples")

print("\nr(T1, T2) against k + m:")
for k, m in [(2, 2), (3, 2), (3, 3), (4, 2)]:
    for T1 in free_trees(k + 1):
        for T2 in free_trees(m + 1):
            r = ramsey_trees(T1, T2, k + m + 1).value
            print(f"  {tree_code(T1):14s} {tree_code(T2):14s} r = {r}  (k + m = {k + m})")

# the degree-based strategy on a random colouring
T1, T2 = RootedTree.path(9), RootedTree.star(6)
n = math.ceil(Fraction(9, 8) * 14)
res = ramsey_strategy(random_graph(n, 0.6, np.random.default_rng(3)), T1, T2)
print(f"\nstrategy on {n} vertices: colour {res.side}, {res.qualifying} qualifying vertices, "
      f"{res.method} -> {res.status}")
