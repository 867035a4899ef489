"""Shared machinery of the embedding phases: seed placement, edge choice and levelwise embedding."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from ..decomposition import Family
from ..errors import InvariantViolation
from ..graphs import RootedTree
from ..partition import regime_failure
from ..regularity import Constants
from .host import HostContext

__all__ = ["Embedding", "Engine"]


@dataclass
class Embedding:
    """An injective, adjacency-preserving map from pattern vertices to host vertices."""

    phi: dict[int, int]
    case: str
    steps: list[dict] = field(default_factory=list)
    profile: str = ""
    info: dict = field(default_factory=dict)

    def image(self, v: int) -> int:
        return self.phi[v]

    def to_json(self) -> dict:
        return {"phi": [[int(v), int(h)] for v, h in sorted(self.phi.items())],
                "case": self.case, "steps": self.steps, "profile": self.profile, **self.info}


class Engine:
    """Mutable embedding state over a :class:`HostContext`.

    ``qadj`` lists, for every pattern vertex, its neighbours in the pattern
    graph; it equals the tree adjacency unless extra (non-tree) edges are
    embedded alongside, in which case those edges only join seeds.
    """

    def __init__(self, T: RootedTree, ctx: HostContext, c: Constants, rng: np.random.Generator,
                 qadj: Sequence[Iterable[int]] | None = None, extra_vertices: Iterable[int] = ()):
        self.T, self.ctx, self.c, self.rng = T, ctx, c, rng
        self.s = ctx.s
        self.phi = np.full(T.n, -1, dtype=np.int64)
        self.qadj = [tuple(a) for a in (qadj if qadj is not None else T.adjacency)]
        self.extra = frozenset(extra_vertices)
        self.alpha_s = float(c.alpha * self.s)
        self.beta_k = float(c.beta * c.k)
        self.steps: list[dict] = []

    # -- basic bookkeeping ---------------------------------------------------

    def embedded(self, v: int) -> bool:
        return self.phi[v] >= 0

    def place(self, v: int, h: int) -> None:
        if self.phi[v] >= 0:
            raise InvariantViolation("engine", "pattern vertex embedded once", vertex=v)
        if self.ctx.used[h]:
            raise InvariantViolation("engine", "injectivity", vertex=v, host=h)
        for u in self.qadj[v]:
            if self.phi[u] >= 0 and not self.ctx.mat[h, self.phi[u]]:
                raise InvariantViolation("engine", "adjacency", vertex=v, neighbour=u, host=h)
        self.phi[v] = h
        self.ctx.used[h] = True

    def pick(self, mask: np.ndarray) -> int:
        return int(self.rng.choice(np.flatnonzero(mask)))

    def used_in_edge(self, e: tuple[int, int]) -> int:
        return self.ctx.used_in(e[0]) + self.ctx.used_in(e[1])

    # -- seeds -----------------------------------------------------------------

    def common_nbhd(self, v: int, X: int) -> np.ndarray:
        """``X`` intersected with the host neighbourhoods of the embedded pattern neighbours of ``v``."""
        m = self.ctx.masks[X].copy()
        for u in self.qadj[v]:
            if self.phi[u] >= 0:
                m &= self.ctx.mat[self.phi[u]]
        return m

    def place_seed(self, r: int, X: int, masks: Sequence[np.ndarray], stage: str,
                   side_cluster: Callable[[int], int] | None = None,
                   filt: Callable[[np.ndarray], np.ndarray] | None = None) -> int:
        """Embed seed ``r`` into cluster ``X``.

        The candidate must be adjacent to every embedded pattern neighbour,
        unused, in every mask of ``masks``, and typical for the common
        neighbourhoods of its not yet embedded neighbours carrying extra edges
        (``side_cluster`` maps such a neighbour to its cluster).
        """
        p = self.T.parent[r]
        if p >= 0 and self.phi[p] < 0:
            raise InvariantViolation(stage, "seed parent embedded first", seed=r, parent=p)
        base = self.common_nbhd(r, X) & ~self.ctx.used
        cand = base.copy()
        for m in masks:
            cand &= m
        if side_cluster is not None:
            for w in self.qadj[r]:
                if w in self.extra and self.phi[w] < 0:
                    cand &= self.ctx.typical_subset(X, self.common_nbhd(w, side_cluster(w)))
        if filt is not None:
            cand = filt(cand)
        if not cand.any():
            raise regime_failure(self.c, stage, "a typical seed candidate exists", seed=r, cluster=X,
                                 adjacent_free=int(base.sum()), step=len(self.steps) + 1)
        h = self.pick(cand)
        self.place(r, h)
        return h

    # -- edges -----------------------------------------------------------------

    def edge_room(self, v_host: int, e: tuple[int, int]) -> int:
        """``deg_e(v) - |e cap U|``."""
        C, D = e
        return (self.ctx.deg(v_host, self.ctx.masks[C] | self.ctx.masks[D]) - self.used_in_edge(e))

    def choose_edge(self, v_host: int, candidates: Sequence[int], edges: Sequence[tuple[int, int]],
                    last: int, avoid_last: bool, stage: str) -> tuple[int, int, int]:
        """An edge index with enough room at ``v_host``, oriented as ``(C, D)``.

        Prefers any index other than ``last`` when ``avoid_last`` holds.
        """
        need = self.c.space(8, self.s)
        ok = [j for j in candidates if self.edge_room(v_host, edges[j]) >= need]
        if not ok:
            raise regime_failure(self.c, stage, "deg_e(v) - |e cap U| >= (8/p)(alpha s + beta k)",
                                 rooms=[self.edge_room(v_host, edges[j]) for j in candidates], need=need)
        pool = [j for j in ok if j != last] if avoid_last else []
        j = (pool or ok)[0]
        C, D = edges[j]
        ctx = self.ctx
        need_c = self.c.space(4, self.s)
        room = {X: ctx.deg(v_host, ctx.masks[X]) - ctx.used_in(X) for X in (C, D)}
        if room[C] < need_c:
            C, D = D, C
        if room[C] < need_c:
            # implied by the edge room: the two sides add up to at least twice this
            raise InvariantViolation(stage, "deg_C(v) - |C cap U| >= (4/p)(alpha s + beta k)",
                                     room_C=room[C], room_D=room[D], need=need_c)
        free_D = int(np.count_nonzero(ctx.free(D)))
        need_d = self.c.space(2, self.s, alpha_mult=2)
        if free_D < need_d:
            raise regime_failure(self.c, stage, "|D minus U| >= (2/p)(2 alpha s + beta k)",
                                 free_D=free_D, need=need_d)
        return j, C, D

    # -- subtrees --------------------------------------------------------------

    def levels(self, fam: Family) -> list[list[int]]:
        """Vertices of a family by distance from its top vertex."""
        top = min(fam.vertices, key=lambda v: (self.T.depth[v], v))
        out, cur = [], [top]
        while cur:
            out.append(cur)
            cur = [w for v in cur for w in self.T.children[v] if w in fam.vertices]
        return out

    def embed_family(self, fam: Family, v_host: int, seed_cluster: int, C: int, D: int, stage: str,
                     balance: bool = True) -> dict:
        """Levelwise embedding of one family into the edge ``CD``.

        The top vertex goes to ``C`` unless ``balance`` allows and the parity
        counts of the family favour ``D``.  Vertices two levels apart share a
        cluster; those on the top's side are typical for the seed cluster and
        the free part of the other side, the rest for the free part of the top's side.
        """
        ctx = self.ctx
        lv = self.levels(fam)
        even = sum(len(x) for x in lv[0::2])
        odd = sum(len(x) for x in lv[1::2])
        free_C, free_D = ctx.free(C), ctx.free(D)
        nC, nD = int(free_C.sum()), int(free_D.sum())
        chose = False
        P, Q = C, D
        # a top placed beforehand sits in C already
        balance = balance and self.phi[lv[0][0]] < 0
        if balance and ctx.deg(v_host, free_D) > 2 * self.alpha_s:
            chose = True
            if (odd > even and nC >= nD) or (odd < even and nC <= nD):
                P, Q = D, C
        free_P, free_Q = (free_C, free_D) if P == C else (free_D, free_C)
        typ_P = ctx.typical(P, [seed_cluster]) & ctx.typical_subset(P, free_Q)
        typ_Q = ctx.typical_subset(Q, free_P)
        root = lv[0][0]
        if self.phi[root] < 0:
            cand = ctx.mat[v_host] & free_P & typ_P
            if not cand.any():
                raise regime_failure(self.c, stage, "a typical neighbour of the seed image is free",
                                     cluster=P, free=int(free_P.sum()),
                                     nbrs=int((ctx.mat[v_host] & free_P).sum()))
            self.place(root, self.pick(cand))
        for depth, layer in enumerate(lv[1:], start=1):
            X, typ = (Q, typ_Q) if depth % 2 else (P, typ_P)
            for x in layer:
                cand = ctx.mat[self.phi[self.T.parent[x]]] & ctx.masks[X] & ~ctx.used & typ
                if not cand.any():
                    raise regime_failure(self.c, stage, "level fits in its cluster", cluster=X, level=depth,
                                         free=int(ctx.free(X).sum()), family_size=len(fam))
                self.place(x, self.pick(cand))
        return {"top": int(root), "size": len(fam), "edge": [int(C), int(D)], "top_cluster": int(P),
                "side_chosen": chose}

    # -- checks ----------------------------------------------------------------

    def check_seed_neighbours(self, vertices: Iterable[int], nbr_of_side: dict[str, frozenset[int]],
                              cluster_of_side: dict[str, int], stage: str) -> None:
        """Images of pattern neighbours of ``X``-seeds have at least ``(p/2) s`` host neighbours in ``X``."""
        need = self.c.p / 2 * self.s
        for side, nb in nbr_of_side.items():
            X = cluster_of_side[side]
            vs = [v for v in vertices if v in nb]
            if not vs:
                continue
            degs = self.ctx.mat[self.phi[vs]][:, self.ctx.masks[X]].sum(axis=1)
            for v, d in zip(vs, degs.tolist()):
                if d < need:
                    raise InvariantViolation(stage, "(ii) image has (p/2)s neighbours in its seed cluster",
                                             vertex=v, side=side, degree=d, need=need)

    def rule_a(self, v_host: int, edges: Sequence[tuple[int, int]], balanced: Iterable[int],
               stage: str) -> None:
        """Imbalance above ``beta k`` on a formerly balanced edge forces a small min-degree."""
        ctx = self.ctx
        for j in balanced:
            C, D = edges[j]
            uC, uD = ctx.used_in(C), ctx.used_in(D)
            if abs(uC - uD) > self.beta_k:
                lhs = min(ctx.deg_cluster(v_host, C), ctx.deg_cluster(v_host, D))
                rhs = min(uC, uD) + 2 * self.alpha_s + self.beta_k
                if lhs > rhs:
                    raise InvariantViolation(stage, "(a) min deg_C, deg_D <= min |C cap U|, |D cap U| + 2 alpha s + beta k",
                                             edge=[C, D], lhs=lhs, rhs=rhs, used=[uC, uD])

    def check_well_embedded(self, X: int, e: tuple[int, int], wdeg: Callable[[int, int], Fraction],
                            stage: str, label: str) -> None:
        C, D = e
        uC, uD = self.ctx.used_in(C), self.ctx.used_in(D)
        if abs(uC - uD) > self.beta_k:
            lhs = min(wdeg(X, C), wdeg(X, D))
            rhs = min(uC, uD) + (2 * self.c.alpha + self.c.epsilon) * self.s + Fraction(self.c.beta * self.c.k)
            if lhs > rhs:
                raise InvariantViolation(stage, f"{label} well-embedded matching edge",
                                         edge=[C, D], lhs=lhs, rhs=rhs, used=[uC, uD])

    def bip_common_check(self, stage: str, side_cluster: Callable[[int], int]) -> None:
        """Unembedded extra-edge vertices keep a common neighbourhood of ``(p/2)^j s``."""
        for v in self.extra:
            if self.phi[v] >= 0:
                continue
            j = sum(1 for u in self.qadj[v] if self.phi[u] >= 0)
            size = int(self.common_nbhd(v, side_cluster(v)).sum())
            need = (self.c.p / 2) ** j * self.s
            if size < need:
                raise regime_failure(self.c, stage, "|N_v| >= (p/2)^j s", vertex=v, size=size, j=j, need=need)
