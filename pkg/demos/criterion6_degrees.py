"""Why the N=8, s=200, density-0.3 host cannot take trees with k = 0.4 N s edges."""

from fractions import Fraction

import numpy as np

from lks.embedder import prepare
from lks.errors import Infeasible
from lks.regularity import desk_constants, gen_planted_host

for N, s, dens in [(8, 200, 0.3), (16, 100, 0.8)]:
    G, part = gen_planted_host(N, s, dens, rng_seed=0 if N == 8 else 1)
    k = int(0.4 * N * s)
    degs = np.array(G.degrees())
    need = 1.1 * k
    print(f"N={N} s={s} density {dens}: k={k}, degrees {degs.min()}..{degs.max()} "
          f"(mean {degs.mean():.0f}), need {need:.0f} on {int(np.ceil(1.1 * G.n / 2))} vertices, "
          f"have {(degs >= need).sum()}")
    try:
        setup = prepare(G, part, desk_constants(Fraction(1, 10), Fraction(1, 10), k, relaxed=20))
        print(f"  prepared: case {setup.case}")
    except Infeasible as e:
        print(f"  infeasible: {e}")
