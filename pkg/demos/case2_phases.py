"""A host engineered so that B leans on L' as well as on the matching: all three phases run."""

from collections import Counter
from fractions import Fraction

import numpy as np

from lks.catalog import random_tree
from lks.embedder import embed_tree, prepare
from lks.regularity import desk_constants, gen_case2_host

G, part = gen_case2_host()
c = desk_constants(Fraction(1, 10), Fraction(1, 10), 300, relaxed=20)
setup = prepare(G, part, c)
st, H = setup.structure, setup.H
print(f"case {setup.case}, structure ({st.case}): A = {st.A}, B = {st.B}, L' = {sorted(st.Lprime)}")
into_M = sum(H.w(st.B, x) for e in st.M for x in e)
into_L = sum(H.w(st.B, x) for x in st.Lprime)
print(f"B's weight: {float(into_M):.1f} into M, {float(into_L):.1f} into L'")

for seed in range(5):
    T = random_tree(301, np.random.default_rng(seed))
    emb = embed_tree(T, G, part, c, seed=seed, setup=setup)
    per_phase = Counter(s["phase"] for s in emb.steps)
    fams = Counter()
    for s in emb.steps:
        fams[s["phase"]] += sum(f["size"] for f in s["families"])
    print(f"seed {seed}: split {emb.info['split']}, steps {dict(per_phase)}, family vertices {dict(fams)}")
