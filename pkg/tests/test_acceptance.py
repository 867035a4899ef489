"""Acceptance criteria 1-11, each reported as one PASS/FAIL line."""

import math
import time
from fractions import Fraction as F

import numpy as np
import pytest

from lks.catalog import free_trees, graphs_up_to_iso, random_graph, random_tree
from lks.decomposition import decompose, switch
from lks.embedder import embed_bipartite, embed_tree, prepare
from lks.errors import Infeasible, InputError
from lks.graphs import Graph, RootedTree
from lks.matching import find_structure, gallai_edmonds, max_matching
from lks.partition import PartitionInstance, partition_numbers
from lks.regularity import (WeightedClusterGraph, build_gp, constants, desk_constants, gen_case2_host,
                            gen_planted_host)
from lks.verifier import check_lks, ramsey_trees

from oracles import (decomposition_problems, ge_problems, lemma5_problems, matching_number,
                     partition_exists_fast)

RELAXED = 20  # the desk profile used throughout the suite


def desk(k):
    return desk_constants(F(1, 10), F(1, 10), k, relaxed=RELAXED)


def faithful(pattern_edges, n_pattern, G, phi):
    img = [phi[v] for v in range(n_pattern)]
    mat = G.matrix
    return len(set(img)) == n_pattern and all(mat[img[u], img[v]] for u, v in pattern_edges)


# -- 1 -------------------------------------------------------------------------------

def test_criterion_1_matching(verdict):
    t = time.perf_counter()
    bad = graphs = 0
    per_n = []
    for n in range(9):
        per_n.append(0)
        for g in graphs_up_to_iso(n):
            per_n[n] += 1
            bad += len(max_matching(g)) != matching_number(n, g.edges())
    graphs = sum(per_n)
    rng = np.random.default_rng(1)
    for _ in range(500):
        g = random_graph(int(rng.integers(1, 13)), float(rng.random()), rng)
        bad += len(max_matching(g)) != matching_number(g.n, g.edges())
    took = time.perf_counter() - t
    # 12346 classes on eight vertices, 13599 over all n <= 8
    ok = verdict(1, per_n[8] == 12346 and bad == 0 and took < 60,
                 f"{graphs} classes (n = 8: {per_n[8]}) + 500 random, {bad} mismatches, {took:.1f}s")
    assert ok


# -- 2 -------------------------------------------------------------------------------

def test_criterion_2_gallai_edmonds(verdict):
    rng = np.random.default_rng(2)
    failures = 0
    for _ in range(1000):
        n = int(rng.integers(1, 21))
        g = random_graph(n, float(rng.uniform(0.02, 0.4)), rng)
        ge = gallai_edmonds(g)
        failures += bool(ge_problems(n, g.edges(), ge.S, ge.components, ge.witness))
    assert verdict(2, failures == 0, f"1000 graphs, {failures} failures")


# -- 3 -------------------------------------------------------------------------------

def random_weights(rng, N, dens, wmax=10):
    W = [[0] * N for _ in range(N)]
    for i in range(N):
        for j in range(i + 1, N):
            if rng.random() < dens:
                W[i][j] = W[j][i] = int(rng.integers(1, wmax + 1))
    return W


def test_criterion_3_structure(verdict):
    rng = np.random.default_rng(3)
    fails = done = 0
    while done < 500:
        N = int(rng.integers(2, 31))
        W = random_weights(rng, N, float(rng.uniform(0.05, 0.6)))
        K = sorted((sum(r) for r in W), reverse=True)[N // 2]
        if K <= 0:
            continue
        st = find_structure(WeightedClusterGraph.from_weights(W), K)
        fails += bool(lemma5_problems(W, K, st.A, st.B, st.case, st.M_full))
        done += 1
    not_a = done6 = 0
    while done6 < 200:
        N = int(rng.integers(2, 31))
        W = random_weights(rng, N, float(rng.uniform(0.3, 0.95)), wmax=1)
        K = int(rng.integers(math.ceil(N / 2), N))
        if 2 * sum(sum(r) >= K for r in W) <= N:
            continue
        st = find_structure(WeightedClusterGraph.from_weights(W), K)
        not_a += st.case != "a"
        done6 += 1
    assert verdict(3, fails == 0 and not_a == 0,
                   f"500 weighted: {fails} failures; 200 with K >= N/2: {not_a} not case (a)")


# -- 4 -------------------------------------------------------------------------------

def test_criterion_4_partition(verdict):
    rng = np.random.default_rng(4)
    feasible = fails = wrong_claims = drawn = 0
    while feasible < 200:
        drawn += 1
        size = int(rng.integers(1, 16))
        delta = F(int(rng.integers(1, 20)))
        alpha = [F(int(rng.integers(0, int(delta) * 4 + 1)), 4) for _ in range(size)]
        beta = [F(int(rng.integers(0, int(delta) * 4 + 1)), 4) for _ in range(size)]
        t = F(int(rng.integers(0, 101)), 100)
        load = F(int(rng.integers(50, 131)), 100)
        a, b = t * load * sum(alpha), (1 - t) * load * sum(beta)
        inst = PartitionInstance(a, b, delta, alpha, beta)
        exists = partition_exists_fast(alpha, beta, a, b, delta)
        if not inst.feasible():
            with pytest.raises(InputError):
                partition_numbers(inst)
            continue
        feasible += 1
        # the hypothesis holds, so a valid split must exist
        wrong_claims += not exists
        I_a, I_b = partition_numbers(inst)
        ok = (sorted(I_a + I_b) == list(range(size))
              and sum((alpha[i] for i in I_a), F(0)) > a - delta
              and sum((beta[i] for i in I_b), F(0)) >= b)
        fails += not ok
    assert verdict(4, fails == 0 and wrong_claims == 0,
                   f"200 feasible of {drawn} drawn, {fails} bad outputs, {wrong_claims} feasible without a split")


# -- 5 -------------------------------------------------------------------------------

def bar_contacts(parent, families, seeds):
    """Seeds touching each family, in one pass over the tree edges."""
    label = {}
    for i, f in enumerate(families):
        for v in f.vertices:
            label[v] = i
    out = [set() for _ in families]
    for v, p in enumerate(parent):
        if p < 0:
            continue
        if v in label and p in seeds:
            out[label[v]].add(p)
        if p in label and v in seeds:
            out[label[p]].add(v)
    return out


def test_criterion_5_decomposition(verdict):
    rng = np.random.default_rng(5)
    betas = [F(1, 100), F(5, 100), F(10, 100)]
    algo = 0.0
    fails = 0
    for i in range(10**4):
        beta = betas[i % 3]
        # k log-uniform on [100, 10^4]; beta k >= 2 pushes the floor to 200 at beta = 0.01
        lo = max(100, math.ceil(2 / beta))
        k = int(round(math.exp(rng.uniform(math.log(lo), math.log(10**4)))))
        T = random_tree(k + 1, rng, "uniform" if i % 2 else "recursive")
        t = time.perf_counter()
        d = decompose(T, k, beta)
        sd = switch(d, T)
        algo += time.perf_counter() - t
        parent = [int(p) for p in T.parent]
        fams = [(f.seed, f.vertices, f.side) for f in d.families]
        bad = decomposition_problems(parent, T.root, k, beta, d.SD_A, d.SD_B, fams, d.root_side)
        fams = [(f.seed, f.vertices, f.side) for f in sd.families]
        bad += decomposition_problems(parent, T.root, k, beta, sd.SDbar_A, sd.SD_B, fams, sd.root_side,
                                      seed_cap=8 / beta)
        bars = list(sd.trees_barA) + list(sd.trees_barB)
        seeds = sd.SDbar_A | sd.SD_B
        if any(c != {f.seed} for c, f in zip(bar_contacts(parent, bars, seeds), bars)):
            bad.append("bar adjacency")
        fails += bool(bad)
    assert verdict(5, fails == 0 and algo < 120, f"10^4 trees, {fails} failures, {algo:.1f}s decomposing")


# -- 6 -------------------------------------------------------------------------------

def end_to_end(G, part, k, trials=100):
    """Success count over seeded random trees; anything but Infeasible propagates."""
    c = desk(k)
    ok = 0
    try:
        setup = prepare(G, part, c)
    except Infeasible:
        return 0, c
    for seed in range(trials):
        T = random_tree(k + 1, np.random.default_rng(seed))
        try:
            emb = embed_tree(T, G, part, c, seed=seed, setup=setup)
        except Infeasible:
            continue
        assert faithful(T.edges(), T.n, G, emb.phi)
        ok += 1
    return ok, c


@pytest.mark.xfail(strict=True, reason="at density 0.3 on 8 clusters of 200 host degrees are about 420, "
                                       "below k = 640 = 0.4 N s, so the degree hypothesis fails on every tree")
def test_criterion_6_as_stated(verdict):
    G, part = gen_planted_host(8, 200, 0.3, rng_seed=0)
    ok, c = end_to_end(G, part, int(0.4 * 8 * 200))
    assert verdict(6, ok >= 95, f"as stated: {ok}/100 embedded, max degree {max(G.degrees())}")


def test_criterion_6_feasible_variant(verdict):
    # same k = 0.4 N s, on a host whose degrees clear (1 + eta) k
    G, part = gen_planted_host(16, 100, 0.8, rng_seed=1)
    ok, _ = end_to_end(G, part, int(0.4 * 16 * 100))
    assert verdict("6 (variant N=16, s=100, density 0.8)", ok >= 95, f"{ok}/100 embedded and verified")


# -- 7 -------------------------------------------------------------------------------

def test_criterion_7_case2(verdict):
    G, part = gen_case2_host()
    c = desk(300)
    setup = prepare(G, part, c)
    st, H = setup.structure, setup.H
    into_M = sum(H.w(st.B, x) for e in st.M for x in e)
    into_L = sum(H.w(st.B, x) for x in st.Lprime)
    assert setup.case == 2 and into_M > 0 and into_L > 0
    ok = 0
    phases = set()
    for seed in range(50):
        T = random_tree(c.k + 1, np.random.default_rng(seed))
        try:
            emb = embed_tree(T, G, part, c, seed=seed, setup=setup)
        except Infeasible:
            continue
        assert faithful(T.edges(), T.n, G, emb.phi)
        phases |= {s["phase"] for s in emb.steps}
        ok += 1
    assert verdict(7, ok >= 45 and phases == {1, 2, 3}, f"{ok}/50 embedded, phases seen {sorted(phases)}")


# -- 8 -------------------------------------------------------------------------------

def tree_plus(n, extra, rng):
    T = random_tree(n, rng, "recursive")
    g = T.as_graph()
    add = []
    while len(add) < extra:
        u, v = map(int, rng.integers(0, n, 2))
        if (T.depth[u] - T.depth[v]) % 2 and not g.has_edge(u, v) and {u, v} not in map(set, add):
            add.append((u, v))
    return Graph(n, list(T.edges()) + add)


def test_criterion_8_bipartite(verdict):
    G, part = gen_planted_host(16, 100, 0.8, rng_seed=1)
    c = desk(639)
    setup = prepare(G, part, c)
    rng = np.random.default_rng(8)
    patterns = [Graph(c.k + 1, [(i, (i + 1) % (c.k + 1)) for i in range(c.k + 1)])]
    patterns += [tree_plus(c.k + 1, extra, rng) for extra in (1, 2, 3) for _ in range(3)]
    good = 0
    for i, Q in enumerate(patterns):
        emb = embed_bipartite(Q, None, G, part, c, seed=i, setup=setup)
        good += faithful(Q.edges(), Q.n, G, emb.phi) and emb.info["seeds"] <= emb.info["seed_bound"]
    assert verdict(8, good == len(patterns), f"{good}/{len(patterns)} patterns (cycle, c = 1, 2, 3)")


# -- 9 -------------------------------------------------------------------------------

def test_criterion_9_lks(verdict):
    t = time.perf_counter()
    bad = 0
    for n in range(1, 8):
        for k in range(n):
            bad += not check_lks(n, k).passed
    took = time.perf_counter() - t
    assert verdict(9, bad == 0 and took < 600, f"n <= 7 all k, {bad} failing (n, k), {took:.1f}s")


# -- 10 ------------------------------------------------------------------------------

def test_criterion_10_ramsey(verdict):
    over = []
    pairs = 0
    for k in range(1, 6):
        for m in range(1, 7 - k):
            for T1 in free_trees(k + 1):
                for T2 in free_trees(m + 1):
                    pairs += 1
                    r = ramsey_trees(T1, T2, min(8, k + m + 1)).value
                    if r is None or r > k + m:
                        over.append((k, m, r))
    p3 = ramsey_trees(RootedTree.path(3), RootedTree.path(3), 6).value
    assert verdict(10, not over and p3 == 3, f"{pairs} pairs, {len(over)} above k+m, r(P3,P3) = {p3}")


# -- 11 ------------------------------------------------------------------------------

def _hosts():
    """Every generated host in the suite, with the constants it is pruned under."""
    full = np.ones((5, 5))
    np.fill_diagonal(full, 0)
    cut01, cut02 = full.copy(), full.copy()
    cut01[0, 1] = cut01[1, 0] = 0
    cut02[0, 2] = cut02[2, 0] = 0
    sparse = np.full((3, 3), 0.5)
    sparse[0, 1] = sparse[1, 0] = 0.002
    yield gen_planted_host(16, 100, 0.8, rng_seed=1), desk(640)
    yield gen_planted_host(16, 100, 0.8, rng_seed=1), desk(639)
    yield gen_planted_host(16, 100, 0.8, rng_seed=1), desk(700)
    yield gen_case2_host(), desk(300)
    yield gen_case2_host(), desk(299)
    yield gen_case2_host(s=20), desk(30)
    yield gen_planted_host(8, 200, 0.3, rng_seed=0), desk(640)
    yield gen_planted_host(6, 95, 0.3, v0_size=30, rng_seed=2), constants(1, 1, 500, 6, 10)
    yield gen_planted_host(3, 40, sparse, rng_seed=1), constants(1, 1, 500, 3, 10)
    for dens in (0.0, 1.0):
        yield gen_planted_host(3, 10, dens), desk(10)
    yield gen_planted_host(2, 10, 1.0), desk(10)
    yield gen_planted_host(3, 100, 0.5), desk(10)
    for seed in (0, 4):
        yield gen_planted_host(8, 100, 0.3, rng_seed=seed), desk(100)
    for dens in (full, cut01, cut02):
        yield gen_planted_host(5, 40, dens, rng_seed=0), desk(500)


def test_criterion_11_edge_loss(verdict):
    rows = []
    for (G, part), c in _hosts():
        pr = build_gp(G, part, c)
        rows.append((pr.removed, pr.bound))
    bad = [(r, str(b)) for r, b in rows if not r <= b]
    assert verdict(11, not bad, f"{len(rows)} hosts, {len(bad)} over the bound")
