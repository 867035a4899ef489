import itertools
import math
from dataclasses import replace
from fractions import Fraction as F

import numpy as np
import pytest

from lks.errors import InputError
from lks.graphs import Graph
from lks.regularity import (CapacityError, ConfigError, HostPartition, build_gp, check_regular_pair,
                            cluster_graph, constants, desk_constants, edge_loss_bound, gen_case2_host,
                            gen_planted_host, typical_vertices)


def exact_witness(g, X, Y, alpha, eps):
    """Every admissible pair of subsets, checked one by one."""
    mat = g.matrix
    d0 = F(int(mat[np.ix_(X, Y)].sum()), len(X) * len(Y))
    ax, ay = math.ceil(alpha * len(X)), math.ceil(alpha * len(Y))
    for kx in range(ax, len(X) + 1):
        for xs in itertools.combinations(X, kx):
            for ky in range(ay, len(Y) + 1):
                for ys in itertools.combinations(Y, ky):
                    d = F(int(mat[np.ix_(xs, ys)].sum()), kx * ky)
                    if abs(d - d0) >= eps:
                        return xs, ys
    return None


def half_complete():
    X, Y = list(range(6)), list(range(6, 12))
    return Graph(12, [(x, y) for x in X[:3] for y in Y]), X, Y


def test_constants_at_eta_q_one():
    c = constants(1, 1, 500, 1, 10)
    assert c.pi == 1 and c.epsilon == F(1, 500000) and c.p == F(1, 250) and c.m0 == 500
    assert 4 * c.epsilon + 1 / c.m0 == F(2008, 10**6) < c.p
    assert c.gap_holds()


def test_constants_at_one_tenth():
    c = constants(F(1, 10), F(1, 10), 10**12, 1, 10)
    assert c.epsilon == F(2, 10**11)
    assert c.alpha == c.pi ** 5 * c.q / (25 * 10**7)
    assert c.m0 == 500 / (c.q * c.pi ** 2)
    assert c.beta == c.epsilon / c.M0
    assert c.K == (1 + c.pi / 5) * c.k


def test_constants_reject_bad_inputs():
    with pytest.raises(ConfigError):
        constants(0, 1, 500, 1, 10)
    with pytest.raises(ConfigError):
        constants(1, 1, 499, 1, 10)
    with pytest.raises(ConfigError):
        constants(1, 1, 500, 1, 10, p=F(1, 1000))
    with pytest.raises(ConfigError):
        desk_constants(F(1, 10), F(1, 10), 100, epsilon=F(1, 100), alpha=F(1, 10))


def test_regular_trivial_pairs():
    X, Y = list(range(5)), list(range(5, 10))
    full = Graph(10, [(x, y) for x in X for y in Y])
    assert check_regular_pair(full, X, Y, 0.2, 0.01).regular
    assert check_regular_pair(Graph(10), X, Y, 0.2, 0.01).regular


def test_half_complete_pair_has_witness():
    g, X, Y = half_complete()
    assert exact_witness(g, X, Y, F(2, 5), F(3, 10)) is not None
    v = check_regular_pair(g, X, Y, 0.4, 0.3)
    assert not v.regular
    xs, ys = v.witness
    d = F(int(g.matrix[np.ix_(xs, ys)].sum()), len(xs) * len(ys))
    assert len(xs) >= 0.4 * 6 and len(ys) >= 0.4 * 6 and abs(d - F(1, 2)) >= F(3, 10)


def test_exact_mode_agrees_with_enumeration():
    rng = np.random.default_rng(3)
    for _ in range(40):
        nx_, ny = int(rng.integers(2, 6)), int(rng.integers(2, 6))
        X, Y = list(range(nx_)), list(range(nx_, nx_ + ny))
        g = Graph(nx_ + ny, [(x, y) for x in X for y in Y if rng.random() < 0.5])
        alpha, eps = F(int(rng.integers(2, 6)), 10), F(int(rng.integers(1, 4)), 10)
        assert check_regular_pair(g, X, Y, alpha, eps).regular == (exact_witness(g, X, Y, alpha, eps) is None)


def test_exact_mode_cap():
    g = Graph(50)
    with pytest.raises(CapacityError):
        check_regular_pair(g, range(25), range(25, 50), 0.5, 0.1)
    with pytest.raises(InputError):
        check_regular_pair(g, [0, 1], [1, 2], 0.5, 0.1)


def test_edge_loss_bound_on_planted_host():
    g, part = gen_planted_host(6, 95, 0.3, v0_size=30, rng_seed=2)
    assert g.n == 600
    c = constants(1, 1, 500, 6, 10)
    pr = build_gp(g, part, c)
    assert pr.bound == edge_loss_bound(600, c) == (F(1, 1000) + 2 * c.epsilon + c.p / 2) * 600 ** 2
    assert pr.removed <= pr.bound
    # the loss is exactly the V0 edges here: every pair is dense and regular
    assert pr.removed == sum(g.degree(v) for v in part.v0)


def test_build_gp_drops_sparse_pair():
    dens = np.full((3, 3), 0.5)
    dens[0, 1] = dens[1, 0] = 0.002
    g, part = gen_planted_host(3, 40, dens, rng_seed=1)
    c = constants(1, 1, 500, 3, 10)
    gp = build_gp(g, part, c).graph
    assert part.density(0, 1) < c.p
    assert not gp.matrix[:40, 40:80].any()
    assert gp.matrix[:40, 80:].sum() == g.matrix[:40, 80:].sum()


def test_all_zero_and_complete_hosts():
    c = desk_constants(F(1, 10), F(1, 10), 10)
    g, part = gen_planted_host(3, 10, 0.0)
    assert build_gp(g, part, c).graph.m == 0
    g, part = gen_planted_host(3, 10, 1.0)
    assert g.m == 3 * 100


def test_cluster_weights():
    g, part = gen_planted_host(2, 10, 1.0)
    H = cluster_graph(g, part)
    assert H.w(0, 1) == 10
    g, part = gen_planted_host(8, 100, 0.3, rng_seed=4)
    c = desk_constants(F(1, 10), F(1, 10), 100)
    H = cluster_graph(build_gp(g, part, c), part, c)
    s = 100
    sd = math.sqrt(s * s * 0.3 * 0.7) / s
    for i in range(8):
        for j in range(i + 1, 8):
            if H.w(i, j) > 0:
                assert abs(float(H.w(i, j)) - 0.3 * s) <= 3 * sd
                assert H.w(i, j) >= c.p * s


def test_typical_complete_pair():
    g, part = gen_planted_host(2, 10, 1.0)
    c = desk_constants(F(1, 10), F(1, 10), 10)
    assert typical_vertices(g, part, 0, [part.clusters[1]], c) == set(part.clusters[0])


def test_typical_on_planted_host():
    g, part = gen_planted_host(8, 100, 0.3, rng_seed=4)
    c = desk_constants(F(1, 10), F(1, 10), 100)
    s = part.s
    for X in range(8):
        for Y in range(8):
            if X != Y:
                bad = s - len(typical_vertices(g, part, X, [part.clusters[Y]], c))
                assert bad <= c.alpha * s
    # six target clusters at once
    for X in range(8):
        others = [Y for Y in range(8) if Y != X][:6]
        common = set(part.clusters[X])
        for Y in others:
            common &= typical_vertices(g, part, X, [part.clusters[Y]], c)
        assert len(common) >= s - 6 * c.alpha * s


def test_typical_excludes_few_on_exactly_regular_pairs():
    c = replace(desk_constants(F(1, 10), F(1, 10), 10), epsilon=F(2, 5), alpha=F(1, 2))
    rng = np.random.default_rng(11)
    checked = 0
    for _ in range(60):
        X, Y = list(range(8)), list(range(8, 16))
        g = Graph(16, [(x, y) for x in X for y in Y if rng.random() < 0.5])
        if not check_regular_pair(g, X, Y, c.alpha, c.epsilon).regular:
            continue
        part = HostPartition.from_graph(g, [X, Y])
        assert 8 - len(typical_vertices(g, part, 0, [Y], c)) < c.alpha * 8
        checked += 1
    assert checked > 10


def test_typical_input_errors():
    g, part = gen_planted_host(3, 100, 0.5)
    c = desk_constants(F(1, 10), F(1, 10), 10)
    with pytest.raises(InputError):
        typical_vertices(g, part, 0, [part.clusters[0]], c)
    with pytest.raises(InputError):
        typical_vertices(g, part, 0, [part.clusters[1][:5], part.clusters[1][5:]], c)
    with pytest.raises(InputError):
        typical_vertices(g, part, 0, [part.clusters[1][:2]], c, subset_form=True)


def test_sampled_regularity_on_planted_host():
    g, part = gen_planted_host(8, 100, 0.3, rng_seed=0)
    for i in range(8):
        for j in range(i + 1, 8):
            v = check_regular_pair(g, part.clusters[i], part.clusters[j], 0.25, 0.1, mode="sampled",
                                   trials=1000, seed=i * 8 + j)
            assert v.regular and v.trials == 1000
    assert part.irregular_pairs() == 0


def test_partition_json_roundtrip():
    g, part = gen_case2_host(s=20)
    again = HostPartition.from_json(part.to_json())
    assert again == part and not again.validate()
