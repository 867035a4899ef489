"""Even cycles and trees with a few chords: extra edges only ever join two seeds."""

from fractions import Fraction

import numpy as np

from lks.catalog import random_tree
from lks.embedder import embed_bipartite, prepare
from lks.graphs import Graph
from lks.regularity import desk_constants, gen_planted_host

G, part = gen_planted_host(16, 100, 0.8, rng_seed=1)
k = 639
c = desk_constants(Fraction(1, 10), Fraction(1, 10), k, relaxed=20)
setup = prepare(G, part, c)


def chords(n, extra, rng):
    T = random_tree(n, rng, "recursive")
    g = T.as_graph()
    add = []
    while len(add) < extra:
        u, v = map(int, rng.integers(0, n, 2))
        if (T.depth[u] - T.depth[v]) % 2 and not g.has_edge(u, v) and (u, v) not in add and (v, u) not in add:
            add.append((u, v))
    return Graph(n, list(T.edges()) + add)


rng = np.random.default_rng(0)
patterns = [("C_640", Graph(k + 1, [(i, (i + 1) % (k + 1)) for i in range(k + 1)]))]
patterns += [(f"tree + {e} chords", chords(k + 1, e, rng)) for e in (1, 2, 3)]
for name, Q in patterns:
    emb = embed_bipartite(Q, None, G, part, c, seed=1, setup=setup)
    ok = all(G.has_edge(emb.phi[u], emb.phi[v]) for u, v in emb.info["extra_edges"])
    print(f"{name:16s} seeds {emb.info['seeds']:3d} (bound {emb.info['seed_bound']:.0f}), "
          f"forced {len(emb.info['forced'])}, extra edges kept: {ok}")
