import itertools
import math
from fractions import Fraction as F

import numpy as np
import pytest

from lks.catalog import free_trees, graphs_up_to_iso, random_graph
from lks.errors import Infeasible, InputError
from lks.graphs import Graph, RootedTree
from lks.verifier import (amplify, check_lks, contains_tree, degree_hypothesis, ramsey_strategy, ramsey_trees,
                          verify_embedding)

from oracles import contains_by_permutation, contains_naive, ramsey_number


def complete(n):
    return Graph(n, itertools.combinations(range(n), 2))


def test_verify_identity_and_failures():
    P = RootedTree.path(4).as_graph()
    assert verify_embedding(P, complete(4), [0, 1, 2, 3])
    cert = verify_embedding(P, complete(4), [0, 1, 1, 3])
    assert not cert and cert.details["duplicated_image"] == [[1, 2, 1]]
    cert = verify_embedding(P, Graph(4, [(0, 1), (1, 2)]), [0, 1, 2, 3])
    assert not cert and cert.details["non_edges"] == [[2, 3]]
    cert = verify_embedding(P, complete(4), {0: 0, 1: 1, 2: 7})
    assert cert.details["unmapped"] == [3] and cert.details["out_of_range"] == [2]
    assert cert.to_json()["verdict"] == "fail"


def test_contains_vs_permutation_oracle():
    rng = np.random.default_rng(0)
    for _ in range(120):
        n = int(rng.integers(1, 8))
        g = random_graph(n, float(rng.random()), rng)
        for t in range(1, min(n, 5) + 1):
            for T in free_trees(t):
                res = contains_tree(g, T)
                assert res.found == contains_by_permutation(n, g.edges(), t, T.edges())
                if res.found:
                    assert verify_embedding(T.as_graph(), g, res.phi)


def test_contains_vs_naive_oracle_on_larger_hosts():
    rng = np.random.default_rng(1)
    for _ in range(15):
        g = random_graph(15, 0.5, rng)
        for T in list(free_trees(9))[::5]:
            assert contains_tree(g, T).found == contains_naive(15, g.edges(), 9, T.edges())


def test_contains_budget():
    g = complete(9).complement()
    assert contains_tree(g, RootedTree.path(2)).status == "not-found"
    big = Graph(12, [(u, v) for u, v in itertools.combinations(range(12), 2) if (u + v) % 3])
    res = contains_tree(big, RootedTree.path(12), budget=3)
    assert res.status in ("budget-exceeded", "found")


def test_degree_hypothesis_boundary():
    # eta = 1/2, k = 2: three of four vertices need degree at least 3
    assert degree_hypothesis(complete(4), 2, F(1, 2))
    almost = Graph(4, [e for e in itertools.combinations(range(4), 2) if e != (0, 1)])
    assert not degree_hypothesis(almost, 2, F(1, 2))
    # degree exactly (1+eta)k and count exactly (1+eta)n/2 both count
    g = Graph(8, [(0, i) for i in range(1, 8)] + [(1, i) for i in range(2, 8)] + [(2, i) for i in range(3, 8)]
              + [(3, 4), (3, 5), (4, 5), (6, 7)])
    degs = g.degrees()
    assert sum(d >= 3 for d in degs) >= 6
    assert degree_hypothesis(g, 2, F(1, 2)) == (sum(d >= 3 for d in degs) >= 6)


def test_check_lks_small():
    for n, k in ((4, 2), (5, 2), (6, 3)):
        rep = check_lks(n, k)
        assert rep.passed and rep.qualifying > 0 and rep.pairs == rep.qualifying * len(list(free_trees(k + 1)))
    rep = check_lks(6, 2, scope="sampled", count=50, seed=3)
    assert rep.graphs == 50 and rep.passed
    with pytest.raises(InputError):
        check_lks(4, 2, scope="everything")


def test_check_lks_graph_counts():
    assert check_lks(4, 1).graphs == 11
    assert check_lks(5, 1).graphs == 34


@pytest.mark.parametrize("t1,t2", [(2, 2), (3, 3), (2, 4), (3, 4), (4, 4)])
def test_ramsey_paths_vs_oracle(t1, t2):
    T1, T2 = RootedTree.path(t1), RootedTree.path(t2)
    res = ramsey_trees(T1, T2, 7)
    assert res.value == ramsey_number(t1, T1.edges(), t2, T2.edges(), 7)
    if res.value > 1:
        w = res.witness
        assert w.n == res.value - 1 and res.lower_bound == res.value - 1
        assert not contains_tree(w, T1).found and not contains_tree(w.complement(), T2).found


def test_ramsey_known_values():
    assert ramsey_trees(RootedTree.path(3), RootedTree.path(3), 6).value == 3
    assert ramsey_trees(RootedTree.path(2), RootedTree.path(2), 6).value == 2
    # paths: n + floor(m/2) - 1 for n >= m >= 2
    assert ramsey_trees(RootedTree.path(5), RootedTree.path(4), 8).value == 6
    # two claws: 3 + 3 when both stars have an odd number of edges
    assert ramsey_trees(RootedTree.star(3), RootedTree.star(3), 8).value == 6


def test_ramsey_mixed_trees_vs_oracle():
    trees = list(free_trees(4))
    for T1, T2 in itertools.combinations_with_replacement(trees, 2):
        assert ramsey_trees(T1, T2, 7).value == ramsey_number(4, T1.edges(), 4, T2.edges(), 7)


def test_ramsey_monotone_in_size():
    prev = 0
    for t in range(2, 6):
        r = ramsey_trees(RootedTree.path(t), RootedTree.path(t), 8).value
        assert r >= prev
        prev = r


def test_ramsey_strategy_on_extremes():
    T1, T2 = RootedTree.path(9), RootedTree.star(8)
    n = math.ceil(F(9, 8) * 16)
    res = ramsey_strategy(complete(n), T1, T2)
    assert res.side == "A" and res.status == "embedded"
    assert verify_embedding(T1.as_graph(), complete(n), res.phi)
    res = ramsey_strategy(Graph(n), T1, T2)
    assert res.side == "B" and res.host == "complement" and res.status == "embedded"
    assert verify_embedding(T2.as_graph(), complete(n), res.phi)
    with pytest.raises(InputError):
        ramsey_strategy(Graph(n + 1), T1, T2)


def test_ramsey_strategy_random_colourings():
    rng = np.random.default_rng(5)
    T1, T2 = RootedTree.path(7), RootedTree.path(7)
    n = math.ceil(F(9, 8) * 12)
    for _ in range(10):
        G = random_graph(n, float(rng.random()), rng)
        try:
            res = ramsey_strategy(G, T1, T2)
        except Infeasible:
            continue
        host = G if res.host == "G" else G.complement()
        T = T1 if res.side == "A" else T2
        if res.status == "embedded":
            assert verify_embedding(T.as_graph(), host, res.phi)
            assert set(res.phi.values()) <= set(res.kept)


def test_amplify():
    g = Graph(3, [(0, 1), (1, 2)])
    big = amplify(g, 4)
    assert big.n == 12 and big.m == 8 and big.has_edge(10, 11) and not big.has_edge(2, 3)
    with pytest.raises(InputError):
        amplify(g, 0)


def test_graph_enumeration_feeds_lks_exhaustively():
    n = 5
    total = 0
    for g in graphs_up_to_iso(n):
        total += 1
    assert total == check_lks(n, 3).graphs
