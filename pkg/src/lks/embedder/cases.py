"""The Case-1 embedding and the three-phase Case-2 embedding."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from ..decomposition import Decomposition, Family, SwitchedDecomposition
from ..errors import InvariantViolation
from ..matching import MatchingStructure
from ..partition import MatchingPartition, regime_failure
from ..regularity import WeightedClusterGraph
from .engine import Embedding, Engine

__all__ = ["embed_case1", "embed_case2", "seed_order"]


def seed_order(T, seeds) -> list[int]:
    """Seeds by depth; every seed's parent then lies in an earlier step."""
    order = sorted(seeds, key=lambda v: (T.depth[v], v))
    if order and order[0] != T.root:
        raise InvariantViolation("seed order", "the root is a seed", root=T.root)
    return order


def _nbrs_of(T, seeds) -> frozenset[int]:
    return frozenset(u for r in seeds for u in T.adjacency[r])


@dataclass
class _Track:
    """One matching side: its seed cluster, edges, slack and current edge index."""

    name: str
    X: int
    edges: list[tuple[int, int]]
    mu: Fraction
    H: WeightedClusterGraph
    total: int  # family vertices to be embedded through these edges
    idx: int = 0
    done: int = 0
    wd: list[Fraction] = field(default_factory=list)

    def __post_init__(self):
        self.wd = [self.H.w(self.X, C) + self.H.w(self.X, D) for C, D in self.edges]

    def terms(self, eng: Engine, start: int) -> list[Fraction]:
        return [self.wd[j] - eng.used_in_edge(self.edges[j]) - self.mu for j in range(start, len(self.edges))]

    def sigma(self, eng: Engine, upto: int | None = None) -> Fraction:
        """``Sigma_i^upto`` from the current index, recomputed from raw counts."""
        end = len(self.edges) if upto is None else upto + 1
        return sum(self.terms(eng, self.idx)[: max(0, end - self.idx)], Fraction(0))


class _Run:
    """Bookkeeping shared by both cases."""

    def __init__(self, eng: Engine, H: WeightedClusterGraph, A: int, B: int,
                 side_of: Callable[[int], str], nbr_sets: dict[str, frozenset[int]],
                 side_cluster=None):
        self.eng, self.H, self.A, self.B = eng, H, A, B
        self.side_of = side_of
        self.cl = {"A": A, "B": B}
        self.nbr_sets = nbr_sets
        self.side_cluster = side_cluster
        self.i = 0

    def wdeg(self, X: int, C: int) -> Fraction:
        return self.H.w(X, C)

    def seed_masks(self, X: int, other: int, tr: _Track | None, prev: int, new: int) -> list[np.ndarray]:
        ctx = self.eng.ctx
        masks = [ctx.typical(X, [other])]
        if tr is not None and tr.edges:
            middle = [Y for j in range(prev + 1, new) for Y in tr.edges[j]]
            if middle:
                masks.append(ctx.typical(X, middle))
            for j in {prev, new}:
                for Y in tr.edges[j]:
                    masks.append(ctx.typical(X, [Y]))
        return masks

    def matched_step(self, r: int, fams: Sequence[Family], tr: _Track, stage: str,
                     extra_masks: Sequence[np.ndarray] = (), filt=None) -> dict:
        """One step on a tracked side: choose the index, the seed image and the edges."""
        eng, ctx = self.eng, self.eng.ctx
        X = tr.X
        other = self.B if X == self.A else self.A
        size = 1 + sum(len(f) for f in fams)
        prev = tr.idx
        if tr.edges:
            terms = tr.terms(eng, prev)
            acc, new = Fraction(0), len(tr.edges) - 1
            for off, t in enumerate(terms):
                acc += t
                if acc >= size:
                    new = prev + off
                    break
        elif fams:
            raise regime_failure(eng.c, stage, "a matching edge is available", side=tr.name, families=len(fams))
        else:
            new = prev
        masks = self.seed_masks(X, other, tr, prev, new) + list(extra_masks)
        v = eng.place_seed(r, X, masks, stage, self.side_cluster, filt)
        log = {"seed": int(r), "host": int(v), "cluster": int(X), "index": int(new), "families": []}
        if fams:
            window = list(range(prev, new + 1))
            balanced = [j for j in window
                        if abs(ctx.used_in(tr.edges[j][0]) - ctx.used_in(tr.edges[j][1])) <= eng.beta_k]
            budget = sum(terms[: new - prev], Fraction(0))  # Sigma_{i-1}^{new-1}
            placed = 0
            for f in fams:
                j, C, D = eng.choose_edge(v, window, tr.edges, new, placed < budget, stage)
                info = eng.embed_family(f, v, X, C, D, stage)
                info["index"] = j
                log["families"].append(info)
                placed += len(f)
                eng.rule_a(v, tr.edges, balanced, stage)
        tr.idx = new
        tr.done += sum(len(f) for f in fams)
        return log

    def common_checks(self, stage: str, new_vertices: Sequence[int], tracks: Sequence[_Track]) -> None:
        eng, ctx = self.eng, self.eng.ctx
        in_AB = int(np.count_nonzero(ctx.used & (ctx.masks[self.A] | ctx.masks[self.B])))
        if in_AB > self.i:
            raise InvariantViolation(stage, "(i) |(A u B) cap U_i| <= i", used=in_AB, i=self.i)
        eng.check_seed_neighbours(new_vertices, self.nbr_sets, self.cl, stage)
        for tr in tracks:
            for j in range(tr.idx + 1, len(tr.edges)):
                if eng.used_in_edge(tr.edges[j]):
                    raise InvariantViolation(stage, "(iii) edges beyond the current index are unused",
                                             side=tr.name, index=j, current=tr.idx)
            if tr.edges:
                eng.check_well_embedded(tr.X, tr.edges[tr.idx], self.wdeg, stage,
                                        "(iv)" if tr.name == "A" else "(v)")
            sig = tr.sigma(eng)
            if sig < tr.total - tr.done:
                raise regime_failure(eng.c, stage, "(vi) Sigma_i(X) >= |V_X minus V_i|", side=tr.name,
                                     sigma=sig, remaining=tr.total - tr.done, step=self.i)
        if self.side_cluster is not None:
            eng.bip_common_check(stage, self.side_cluster)


def _by_seed(families: Sequence[Family]) -> dict[int, list[Family]]:
    out: dict[int, list[Family]] = {}
    for f in families:
        out.setdefault(f.seed, []).append(f)
    return out


def _collect(eng: Engine, vs_before: np.ndarray) -> list[int]:
    return np.flatnonzero((eng.phi >= 0) & ~vs_before).tolist()


def embed_case1(eng: Engine, H: WeightedClusterGraph, st: MatchingStructure, d: Decomposition,
                mp: MatchingPartition, side_cluster=None) -> Embedding:
    """Seeds one at a time, each with its families, into the two halves of the matching."""
    T = eng.T
    A, B = st.A, st.B
    side_of = {**{r: "A" for r in d.SD_A}, **{r: "B" for r in d.SD_B}}
    tracks = {"A": _Track("A", A, mp.M_A, mp.mu_A, H, d.V_A),
              "B": _Track("B", B, mp.M_B, mp.mu_B, H, d.V_B)}
    run = _Run(eng, H, A, B, side_of.__getitem__,
               {"A": _nbrs_of(T, d.SD_A), "B": _nbrs_of(T, d.SD_B)}, side_cluster)
    fams = _by_seed(d.families)
    for r in seed_order(T, d.seeds):
        run.i += 1
        stage = f"case 1 / step {run.i}"
        before = eng.phi >= 0
        log = run.matched_step(r, fams.get(r, []), tracks[side_of[r]], stage)
        log["phase"] = 1
        eng.steps.append(log)
        run.common_checks(stage, _collect(eng, before), tracks.values())
    return Embedding({v: int(h) for v, h in enumerate(eng.phi.tolist())}, "1", eng.steps, eng.c.profile)


def _free_edge(eng: Engine, v: int, edges: Sequence[tuple[int, int]], stage: str) -> tuple[int, int, int]:
    """First edge whose better endcluster ``C`` and the other one ``D`` both have room."""
    ctx = eng.ctx
    need = eng.c.space(2, eng.s)
    best = []
    for j, (X, Y) in enumerate(edges):
        dX, dY = ctx.deg(v, ctx.free(X)), ctx.deg(v, ctx.free(Y))
        C, D = (X, Y) if dX >= dY else (Y, X)
        room = min(max(dX, dY), int(ctx.free(D).sum()))
        if room >= need:
            return j, C, D
        best.append(room)
    raise regime_failure(eng.c, stage, "min(deg_{C-U}(v), |D-U|) >= (2/p)(alpha s + beta k)",
                         best=max(best, default=0), need=need)


def embed_case2(eng: Engine, H: WeightedClusterGraph, st: MatchingStructure, sd: SwitchedDecomposition,
                mp: MatchingPartition, split: tuple[list[Family], list[Family]],
                side_cluster=None) -> Embedding:
    """Phase 1 seeds with ``T_F`` and ``T_B^M``; phase 2 ``T_B^L`` through ``L'``; phase 3 the bar A-families."""
    T, c, ctx = eng.T, eng.c, eng.ctx
    A, B = st.A, st.B
    on_M, on_L = split
    V_BL = sum(len(f) for f in on_L)
    Lp = list(mp.lprime_entries)
    side_of = {**{r: "A" for r in sd.SDbar_A}, **{r: "B" for r in sd.SD_B}}
    trB = _Track("B", B, mp.M_B, mp.mu_B, H, sum(len(f) for f in on_M))
    run = _Run(eng, H, A, B, side_of.__getitem__,
               {"A": _nbrs_of(T, sd.SDbar_A), "B": _nbrs_of(T, sd.SD_B)}, side_cluster)
    order = seed_order(T, sd.seeds)
    M_all = list(mp.edges)
    M_clusters = [X for e in M_all for X in e]
    NA = [X for X in H.neighbors(A)]
    mask_M = ctx.union_mask(M_clusters)
    mask_L = ctx.union_mask(Lp)
    need_vi = c.k + c.slack(c.pi * c.k / 20)
    need_vii = V_BL + c.slack(len(Lp) * c.pi * c.k / (100 * ctx.N))

    def filt_vi(cand):
        idx = np.flatnonzero(cand)
        ok = ctx.mat[idx][:, mask_M].sum(axis=1) >= float(need_vi)
        out = np.zeros_like(cand)
        out[idx[ok]] = True
        return out

    def filt_vii(cand):
        if V_BL == 0:
            return cand
        idx = np.flatnonzero(cand)
        ok = ctx.mat[idx][:, mask_L].sum(axis=1) >= float(need_vii)
        out = np.zeros_like(cand)
        out[idx[ok]] = True
        return out

    # phase 1
    f_fams = _by_seed(sd.trees_F)
    m_fams = _by_seed(on_M)
    for r in order:
        run.i += 1
        stage = f"case 2 / phase 1 / step {run.i}"
        before = eng.phi >= 0
        if side_of[r] == "B":
            extra = [ctx.typical(B, Lp)] if Lp else []
            log = run.matched_step(r, m_fams.get(r, []), trB, stage, extra, filt_vii)
        else:
            masks = [ctx.typical(A, [B])]
            if mp.M_A:
                masks.append(ctx.typical(A, [X for e in mp.M_A for X in e]))
            masks.append(ctx.typical(A, NA))
            v = eng.place_seed(r, A, masks, stage, run.side_cluster, filt_vi)
            log = {"seed": int(r), "host": int(v), "cluster": int(A), "families": []}
            for f in f_fams.get(r, []):
                j, C, D = _free_edge(eng, v, mp.M_A, stage)
                info = eng.embed_family(f, v, A, C, D, stage, balance=False)
                info["index"] = j
                log["families"].append(info)
        log["phase"] = 1
        eng.steps.append(log)
        run.common_checks(stage, _collect(eng, before), [trB])

    # phase 2
    l_fams = _by_seed(on_L)
    all_clusters = list(range(ctx.N))
    for step, r in enumerate(order, start=1):
        if r not in l_fams:
            continue
        stage = f"case 2 / phase 2 / step {step}"
        v = int(eng.phi[r])
        log = {"seed": int(r), "host": v, "cluster": int(B), "families": [], "phase": 2}
        for f in l_fams[r]:
            rooms = {C: ctx.deg(v, ctx.free(C)) for C in Lp}
            C = max(Lp, key=lambda X: (rooms[X], -X)) if Lp else None
            if C is None or rooms[C] < eng.c.space(2, eng.s):
                raise regime_failure(c, stage, "some C in L' has deg_{C-U}(v) >= (2/p)(alpha s + beta k)",
                                     best=max(rooms.values(), default=0), need=eng.c.space(2, eng.s))
            top = eng.levels(f)[0][0]
            cand = ctx.mat[v] & ctx.free(C) & ctx.typical(C, all_clusters) & ctx.typical(C, [B])
            if not cand.any():
                raise regime_failure(c, stage, "a root candidate typical for all clusters", cluster=C)
            eng.place(top, eng.pick(cand))
            h = int(eng.phi[top])
            partners = [X for X in all_clusters if X not in (C, A, B)]
            drooms = {X: ctx.deg(h, ctx.free(X)) for X in partners}
            D = max(partners, key=lambda X: (drooms[X], -X)) if partners else None
            if D is None or drooms[D] < eng.c.space(2, eng.s):
                raise regime_failure(c, stage, "some D has deg_{D-U}(v) >= (2/p)(alpha s + beta k)",
                                     best=max(drooms.values(), default=0), need=eng.c.space(2, eng.s))
            info = eng.embed_family(f, v, B, C, D, stage, balance=False)
            log["families"].append(info)
        eng.steps.append(log)

    # phase 3
    a_fams = _by_seed(sd.trees_barA)
    for step, r in enumerate(order, start=1):
        if r not in a_fams:
            continue
        stage = f"case 2 / phase 3 / step {step}"
        v = int(eng.phi[r])
        log = {"seed": int(r), "host": v, "cluster": int(A), "families": [], "phase": 3}
        for f in a_fams[r]:
            j, C, D = _free_edge(eng, v, M_all, stage)
            info = eng.embed_family(f, v, A, C, D, stage, balance=False)
            info["index"] = j
            log["families"].append(info)
        eng.steps.append(log)
    return Embedding({v: int(h) for v, h in enumerate(eng.phi.tolist())}, "2", eng.steps, eng.c.profile)
