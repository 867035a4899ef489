"""From host, partition and tree to a verified embedding."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ..decomposition import check_decomposition, check_switched, decompose, switch
from ..errors import Infeasible, InputError, InvariantViolation
from ..graphs import Graph, RootedTree
from ..matching import (MatchingStructure, check_structure, find_structure, matched_vertices,
                        max_matching_weighted_preference)
from ..partition import partition_case1, partition_case2, regime_failure, split_TB
from ..regularity import Constants, HostPartition, PrunedGraph, WeightedClusterGraph, build_gp, cluster_graph
from ..verifier import degree_hypothesis, verify_embedding
from .cases import embed_case1, embed_case2
from .engine import Embedding, Engine
from .host import HostContext

__all__ = ["Setup", "prepare", "embed_tree", "run_pattern"]


@dataclass
class Setup:
    """Everything fixed before the tree is looked at: ``G_p``, the cluster graph and the structure."""

    gp: PrunedGraph
    H: WeightedClusterGraph
    structure: MatchingStructure
    case: int
    c: Constants

    def to_json(self) -> dict:
        return {"case": self.case, "structure": self.structure.to_json(),
                "edge_loss": self.gp.removed, "edge_loss_bound": str(self.gp.bound)}


def _wdeg(H: WeightedClusterGraph, X: int, clusters: Iterable[int]) -> Fraction:
    return H.wdeg(X, set(clusters) - {X})


def _rematch(H: WeightedClusterGraph, st: MatchingStructure) -> MatchingStructure:
    """A case-(a) matching chosen inside ``H - {A, B}`` instead of stripped from one of ``H``.

    Stripping costs up to two clusters of weight, which is negligible only when
    ``N`` is large.  The replacement must still cover ``N(A u B)``; otherwise the
    stripped matching is kept.
    """
    A, B = st.A, st.B
    others = [X for X in range(H.N) if X not in (A, B)]
    need = (set(H.neighbors(A)) | set(H.neighbors(B))) - {A, B}
    sub = H.skeleton().induced(others)
    m = max_matching_weighted_preference(sub, [i for i, X in enumerate(others) if X in need])
    M = frozenset((others[u], others[v]) for u, v in m)
    VM = matched_vertices(M)
    if not need <= VM:
        return st
    old = _wdeg(H, A, matched_vertices(st.M)) + _wdeg(H, B, matched_vertices(st.M))
    if _wdeg(H, A, VM) + _wdeg(H, B, VM) <= old:
        return st
    return MatchingStructure(A, B, "a", st.M_full, M, st.L, frozenset(st.L - VM - {A, B}), st.exchanges)


def prepare(G: Graph, part: HostPartition, c: Constants, check_hypothesis: bool = True) -> Setup:
    """Prune the host, find the matching structure and decide between the two cases."""
    if part.n != G.n:
        raise InputError("partition does not cover the host")
    n, k = G.n, c.k
    if check_hypothesis:
        if not degree_hypothesis(G, k, c.eta):
            cnt = sum(1 for d in G.degrees() if d >= (1 + c.eta) * k)
            raise Infeasible("hypothesis", "(1+eta)n/2 vertices of degree >= (1+eta)k",
                             qualifying=cnt, need=(1 + c.eta) * n / 2, degree=(1 + c.eta) * k)
        if k < c.q * n:
            raise Infeasible("hypothesis", "k >= q n", k=k, qn=c.q * n)
    gp = build_gp(G, part, c)
    if not gp.within_bound:
        # guaranteed for a partition from the regularity lemma, not for an arbitrary one
        raise regime_failure(c, "setup", "|E(G - G_p)| <= (1/(2m) + 2 eps + p/2) n^2",
                             removed=gp.removed, bound=gp.bound)
    degs = gp.graph.degrees()
    strong = sum(1 for d in degs if d >= (1 + c.pi / 2) * k)
    if strong < (1 + c.pi / 2) * n / 2:
        raise regime_failure(c, "setup", "G_p has (1+pi/2)n/2 vertices of degree >= (1+pi/2)k",
                             qualifying=strong, need=(1 + c.pi / 2) * n / 2)
    H = cluster_graph(gp, part, c)
    heavy = [X for X in range(H.N) if H.wdeg(X) >= c.K]
    if 2 * len(heavy) <= H.N:
        raise regime_failure(c, "setup", "|L| > N/2", L=len(heavy), N=H.N)
    st = find_structure(H, c.K)
    bad = check_structure(H, c.K, st)
    if bad:
        raise InvariantViolation("structure", "matching structure postconditions", problems=bad)
    need = (1 + c.pi / 10) * k
    if st.case == "a" and not c.proof_regime:
        st = _rematch(H, st)
    VM = matched_vertices(st.M)
    dA, dB = _wdeg(H, st.A, VM), _wdeg(H, st.B, VM)
    if dA < dB:
        # the case-(b) asymmetry fixes the roles; a case-(a) structure is symmetric in A and B
        if st.case == "a":
            st = MatchingStructure(st.B, st.A, st.case, st.M_full, st.M, st.L, st.Lprime, st.exchanges)
            dA, dB = dB, dA
    if dA >= need and dB >= need:
        case = 1
    else:
        dBL = _wdeg(H, st.B, VM | set(st.L))
        if st.case != "b" or dA < need or dBL < need / 2:
            raise regime_failure(c, "setup", "deg_M(A), deg_M(B) >= (1+pi/10)k, or case (b) with "
                                 "deg_M(A) >= (1+pi/10)k and deg_{M u L}(B) >= (1+pi/10)k/2",
                                 case=st.case, deg_M_A=dA, deg_M_B=dB, deg_ML_B=dBL, need=need)
        hit = [e for X in H.neighbors(st.A) for e in st.M if X in e]
        if len(hit) != len(set(hit)):
            raise InvariantViolation("setup", "each cluster of N(A) meets a different edge of M",
                                     A=st.A, M=sorted(st.M))
        case = 2
    return Setup(gp, H, st, case, c)


def run_pattern(T: RootedTree, G: Graph, part: HostPartition, c: Constants, seed: int = 0,
                setup: Setup | None = None, forced: Sequence[int] = (), qadj=None,
                extra_vertices: Sequence[int] = (), alpha_sub=None, pattern: Graph | None = None,
                side_cluster_hook: bool = False) -> Embedding:
    """Embed ``T`` (and, through ``qadj``, extra edges among forced seeds) into ``G``."""
    if T.n - 1 > c.k:
        raise InputError(f"tree has {T.n - 1} edges, more than k={c.k}")
    setup = setup or prepare(G, part, c)
    st, H = setup.structure, setup.H
    d = decompose(T, c.k, c.beta, forced)
    bad = check_decomposition(T, c.k, c.beta, d)
    if bad:
        raise InvariantViolation("decompose", "conditions (I)-(VI)", failed=bad)
    ctx = HostContext(setup.gp.graph, part, c, alpha_sub)
    eng = Engine(T, ctx, c, np.random.default_rng(seed), qadj, extra_vertices)
    if setup.case == 1:
        mp = partition_case1(st.M, H, st.A, st.B, d, c)
        side = {**{r: st.A for r in d.SD_A}, **{r: st.B for r in d.SD_B}}
        emb = embed_case1(eng, H, st, d, mp, side.__getitem__ if side_cluster_hook else None)
        emb.info["seeds"] = len(d.seeds)
    else:
        sd = switch(d, T)
        bad = check_switched(T, c.k, c.beta, sd)
        if bad:
            raise InvariantViolation("switch", "conditions (I)-(IV), (V)', (VI), bar adjacency, bar-A outweighs bar-B",
                                     failed=bad)
        mp = partition_case2(st.M, st.Lprime, H, st.A, st.B, sd, c)
        split = split_TB(mp, sd.trees_barB, H, st.B, c)
        side = {**{r: st.A for r in sd.SDbar_A}, **{r: st.B for r in sd.SD_B}}
        emb = embed_case2(eng, H, st, sd, mp, split, side.__getitem__ if side_cluster_hook else None)
        emb.info["split"] = {"T_B^M": len(split[0]), "T_B^L": len(split[1])}
        emb.info["seeds"] = len(sd.seeds)
    emb.info.update({"seed": seed, "setup": setup.to_json(), "partition": mp.to_json()})
    if any(h < 0 for h in emb.phi.values()):
        raise InvariantViolation("embed", "every pattern vertex embedded",
                                 missing=[v for v, h in emb.phi.items() if h < 0])
    cert = verify_embedding(pattern if pattern is not None else T.as_graph(), G, emb.phi)
    if not cert:
        raise InvariantViolation("verify", "embedding is injective and preserves adjacency", **cert.details)
    return emb


def embed_tree(T: RootedTree, G: Graph, part: HostPartition, c: Constants, seed: int = 0,
               setup: Setup | None = None) -> Embedding:
    """Run the whole construction for one tree; the result is checked by the independent verifier."""
    return run_pattern(T, G, part, c, seed, setup)
