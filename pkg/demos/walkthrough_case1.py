"""From a planted host to a certified embedding of one random tree, stage by stage."""

from fractions import Fraction

import numpy as np

from lks.catalog import random_tree
from lks.decomposition import decompose
from lks.embedder import embed_tree, prepare
from lks.partition import partition_case1
from lks.regularity import desk_constants, gen_planted_host
from lks.verifier import verify_embedding

G, part = gen_planted_host(16, 100, 0.8, rng_seed=1)
k = 640
c = desk_constants(Fraction(1, 10), Fraction(1, 10), k, relaxed=20)
print(f"host: {G.n} vertices, {G.m} edges, {part.N} clusters of {part.s}")

setup = prepare(G, part, c)
st = setup.structure
print(f"G_p dropped {setup.gp.removed} edges (bound {float(setup.gp.bound):.0f})")
print(f"case {setup.case}: A = {st.A}, B = {st.B}, |M| = {len(st.M)} matching edges")

T = random_tree(k + 1, np.random.default_rng(7))
d = decompose(T, k, c.beta)
print(f"tree: {T.n} vertices; seeds {len(d.SD_A)} (A) + {len(d.SD_B)} (B); "
      f"{len(d.families)} families, largest {max(map(len, d.families))}")

mp = partition_case1(st.M, setup.H, st.A, st.B, d, c)
print(f"M split: {len(mp.M_A)} edges for A, {len(mp.M_B)} for B")

emb = embed_tree(T, G, part, c, seed=7, setup=setup)
cert = verify_embedding(T.as_graph(), G, emb.phi)
print(f"embedded in {len(emb.steps)} seed steps; verifier says {cert.to_json()['verdict']}")
used = np.bincount(part.cluster_of()[list(emb.phi.values())], minlength=part.N)
print("vertices per cluster:", used.tolist())
