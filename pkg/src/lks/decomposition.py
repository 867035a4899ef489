"""Cutting a rooted tree into seeds and small hanging subtrees, and the switching step."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .graphs import InputError, RootedTree

__all__ = [
    "Family", "Decomposition", "decompose", "check_decomposition", "classify_bar",
    "SwitchedDecomposition", "switch", "check_switched",
]


@dataclass(frozen=True)
class Family:
    """A component of ``T - SD`` together with its seed."""

    seed: int
    vertices: frozenset[int]
    side: str  # "A" or "B": the seed set its seed belongs to

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class Decomposition:
    SD_A: frozenset[int]
    SD_B: frozenset[int]
    families: tuple[Family, ...]
    x_sequence: tuple[int, ...] = ()
    root_side: str = "A"

    @property
    def trees_A(self) -> list[Family]:
        return [f for f in self.families if f.side == "A"]

    @property
    def trees_B(self) -> list[Family]:
        return [f for f in self.families if f.side == "B"]

    @property
    def V_A(self) -> int:
        return sum(len(f) for f in self.trees_A)

    @property
    def V_B(self) -> int:
        return sum(len(f) for f in self.trees_B)

    @property
    def seeds(self) -> frozenset[int]:
        return self.SD_A | self.SD_B

    def swapped(self) -> "Decomposition":
        flip = {"A": "B", "B": "A"}
        return Decomposition(self.SD_B, self.SD_A,
                             tuple(Family(f.seed, f.vertices, flip[f.side]) for f in self.families),
                             self.x_sequence, flip[self.root_side])

    def to_json(self) -> dict:
        return {"SD_A": sorted(self.SD_A), "SD_B": sorted(self.SD_B), "root_side": self.root_side,
                "families": [{"seed": f.seed, "vertices": sorted(f.vertices), "side": f.side}
                             for f in self.families]}


def _tops(T: RootedTree, removed: set[int] | frozenset[int]) -> dict[int, int]:
    """Map each surviving vertex of ``T - removed`` to the top vertex of its component."""
    top_of: dict[int, int] = {}
    parent = T.parent
    get = top_of.get
    for v in T.order:
        if v not in removed:
            top_of[v] = get(parent[v], v)
    return top_of


def _split(T: RootedTree, removed: set[int] | frozenset[int]) -> list[tuple[int, frozenset[int]]]:
    """Components of ``T - removed`` as ``(top vertex, vertex set)`` ordered by the depth of their tops."""
    groups: dict[int, list[int]] = {}
    for v, t in _tops(T, removed).items():
        if t == v:
            groups[v] = [v]
        else:
            groups[t].append(v)
    return [(t, frozenset(vs)) for t, vs in groups.items()]


def _split_within(T: RootedTree, vertices: frozenset[int], removed: set[int]):
    """Like ``_split`` but restricted to a family's vertices."""
    top_of: dict[int, int] = {}
    groups: dict[int, list[int]] = {}
    parent = T.parent
    for v in sorted(vertices, key=T.depth.__getitem__):
        if v in removed:
            continue
        t = top_of.get(parent[v], v)
        top_of[v] = t
        groups.setdefault(t, []).append(v)
    return [(t, frozenset(vs)) for t, vs in groups.items()]


def _families(T: RootedTree, seeds: set[int], side_of) -> tuple[Family, ...]:
    fams = [Family(T.parent[t], c, side_of(T.parent[t])) for t, c in _split(T, seeds)]
    fams.sort(key=lambda f: (f.seed, min(f.vertices)))
    return tuple(fams)


def decompose(T: RootedTree, k: int, beta, forced: Iterable[int] = ()) -> Decomposition:
    """Seeds ``SD_A``/``SD_B`` and families of at most ``beta*k`` vertices.

    ``forced`` vertices are added to the cut set before the parity classes are
    completed (used when extra edges must land between seeds).
    """
    bk = float(beta) * k
    if bk < 2:
        raise InputError(f"beta*k = {float(bk)} < 2")
    if T.n - 1 > k:
        raise InputError(f"tree has {T.n - 1} edges, more than k={k}")
    # residual subtree sizes, bottom up; a vertex whose residual exceeds beta*k is cut
    parent = T.parent
    res = [1] * T.n
    cut = []
    for v in reversed(T.order):
        if res[v] > bk:
            cut.append(v)
            res[v] = 1
        p = parent[v]
        if p >= 0:
            res[p] += res[v]
    cut.sort(key=lambda v: (-T.depth[v], v))
    if T.root not in cut:
        cut.append(T.root)
    X = set(cut) | set(forced)
    A1 = {x for x in X if T.depth[x] % 2 == 0}
    B1 = X - A1
    SD_A, SD_B = set(A1), set(B1)
    # a non-cut vertex joins its component's seed class when it touches a cut vertex of
    # the other parity; the only cut neighbours of a component are its seed and the
    # cut children of its members
    top_of = _tops(T, X)
    for x in X:
        p = parent[x]
        if p >= 0 and p not in X:
            sd = parent[top_of[p]]
            if (sd in A1) != (x in A1):
                (SD_A if sd in A1 else SD_B).add(p)
    fams = _families(T, SD_A | SD_B, lambda s: "A" if s in SD_A else "B")
    return Decomposition(frozenset(SD_A), frozenset(SD_B), fams, tuple(cut))


def _contacts(T: RootedTree, families) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Tree edges leaving the families: ``(family index, member, outside vertex)`` arrays."""
    fam_of = np.full(T.n, -1, dtype=np.int64)
    for i, f in enumerate(families):
        fam_of[np.fromiter(f.vertices, dtype=np.int64, count=len(f.vertices))] = i
    par = T.parent_array
    child = np.flatnonzero(par >= 0)
    up = par[child]
    fc, fu = fam_of[child], fam_of[up]
    leave_up = (fc >= 0) & (fc != fu)      # member child, outside parent
    leave_down = (fu >= 0) & (fc != fu)    # member parent, outside child
    return (np.concatenate([fc[leave_up], fu[leave_down]]),
            np.concatenate([child[leave_up], up[leave_down]]),
            np.concatenate([up[leave_up], child[leave_down]]))


def _boundaries(T: RootedTree, families) -> list[set[int]]:
    """For each family, the vertices outside it adjacent to it."""
    idx, _, out = _contacts(T, families)
    bounds: list[set[int]] = [set() for _ in families]
    for i, w in zip(idx.tolist(), out.tolist()):
        bounds[i].add(w)
    return bounds


def _common_checks(T: RootedTree, bk: float, root_set, SD, families) -> list[str]:
    """(II), (III), (IV) shared by plain and switched decompositions."""
    bad = []
    depth = T.depth
    if T.root not in root_set or any((depth[x] % 2 == 0) != (x in root_set) for x in SD):
        bad.append("II")
    split = {c: T.parent[t] for t, c in _split(T, SD)}
    if set(split) != {f.vertices for f in families} or len(families) != len(split):
        bad.append("III")
    if any(len(f) > bk or f.seed not in SD or split.get(f.vertices) != f.seed for f in families):
        bad.append("IV")
    return bad


def check_decomposition(T: RootedTree, k: int, beta, d: Decomposition) -> list[str]:
    """Names of violated conditions (I)-(VI); empty when all hold."""
    bk = float(beta) * k
    bad = []
    SD = d.SD_A | d.SD_B
    if d.SD_A & d.SD_B:
        bad.append("I")
    root_set = d.SD_A if d.root_side == "A" else d.SD_B
    bad += _common_checks(T, bk, root_set, SD, d.families)
    if "IV" not in bad and any((f.side == "A") != (f.seed in d.SD_A) for f in d.families):
        bad.append("IV")
    if max(len(d.SD_A), len(d.SD_B)) * float(beta) >= 2:
        bad.append("V")
    for f, bound in zip(d.families, _boundaries(T, d.families)):
        if not bound.isdisjoint(d.SD_B if f.side == "A" else d.SD_A):
            bad.append("VI")
            break
    return bad


def classify_bar(d: Decomposition, T: RootedTree) -> tuple[list[Family], list[Family]]:
    """Families adjacent to no seed other than their own, per side."""
    SD = d.seeds
    bar = [f for f, bound in zip(d.families, _boundaries(T, d.families)) if bound & SD == {f.seed}]
    return [f for f in bar if f.side == "A"], [f for f in bar if f.side == "B"]


@dataclass(frozen=True)
class SwitchedDecomposition:
    SDbar_A: frozenset[int]
    SD_B: frozenset[int]
    trees_F: tuple[Family, ...]
    trees_barA: tuple[Family, ...]
    trees_barB: tuple[Family, ...]
    root_side: str = "A"
    swapped: bool = False
    base: Decomposition | None = field(default=None, compare=False, repr=False)

    @property
    def V_F(self) -> int:
        return sum(len(f) for f in self.trees_F)

    @property
    def Vbar_A(self) -> int:
        return sum(len(f) for f in self.trees_barA)

    @property
    def Vbar_B(self) -> int:
        return sum(len(f) for f in self.trees_barB)

    @property
    def seeds(self) -> frozenset[int]:
        return self.SDbar_A | self.SD_B

    @property
    def families(self) -> tuple[Family, ...]:
        return self.trees_F + self.trees_barA + self.trees_barB

    def to_json(self) -> dict:
        def fams(fs):
            return [{"seed": f.seed, "vertices": sorted(f.vertices)} for f in fs]
        return {"SDbar_A": sorted(self.SDbar_A), "SD_B": sorted(self.SD_B), "swapped": self.swapped,
                "root_side": self.root_side, "T_F": fams(self.trees_F),
                "barT_A": fams(self.trees_barA), "barT_B": fams(self.trees_barB)}


def switch(d: Decomposition, T: RootedTree, enforce_bar_balance: bool = True) -> SwitchedDecomposition:
    """Move the ``SD_B``-neighbours of non-bar B-families into the A seeds.

    With ``enforce_bar_balance`` the A/B labels are swapped first whenever the bar
    A-families are smaller than the bar B-families.
    """
    if enforce_bar_balance:
        barA, barB = classify_bar(d, T)
        swapped = sum(map(len, barA)) < sum(map(len, barB))
    else:
        swapped = False
    if swapped:
        d = d.swapped()
    idx, member, out = _contacts(T, d.families)
    bounds: list[set[int]] = [set() for _ in d.families]
    touching_B: list[set[int]] = [set() for _ in d.families]
    for i, v, w in zip(idx.tolist(), member.tolist(), out.tolist()):
        bounds[i].add(w)
        if w in d.SD_B:
            touching_B[i].add(v)
    SD = d.seeds
    barA, barB, trees_F = [], [], []
    SDA = set(d.SD_A)
    for i, f in enumerate(d.families):
        if bounds[i] & SD == {f.seed}:
            (barA if f.side == "A" else barB).append(f)
        elif f.side == "A":
            trees_F.append(f)
        else:
            S_T = touching_B[i]
            SDA |= S_T
            trees_F.extend(Family(T.parent[t], c, "A") for t, c in _split_within(T, f.vertices, S_T))
    trees_F.sort(key=lambda f: (f.seed, min(f.vertices)))
    return SwitchedDecomposition(frozenset(SDA), d.SD_B, tuple(trees_F), tuple(barA), tuple(barB),
                                 d.root_side, swapped, d)


def check_switched(T: RootedTree, k: int, beta, sd: SwitchedDecomposition) -> list[str]:
    """Violated conditions for a switched decomposition: (I)-(IV), (V)', (VI), bar adjacency."""
    bk = float(beta) * k
    bad = []
    SD = sd.seeds
    if sd.SDbar_A & sd.SD_B:
        bad.append("I")
    root_set = sd.SDbar_A if sd.root_side == "A" else sd.SD_B
    bad += _common_checks(T, bk, root_set, SD, sd.families)
    if len(SD) * float(beta) > 8:
        bad.append("V'")
    bounds = {id(f): b for f, b in zip(sd.families, _boundaries(T, sd.families))}
    for f in sd.trees_F + sd.trees_barA:
        if f.seed not in sd.SDbar_A or not bounds[id(f)].isdisjoint(sd.SD_B):
            bad.append("VI")
            break
    else:
        for f in sd.trees_barB:
            if f.seed not in sd.SD_B or not bounds[id(f)].isdisjoint(sd.SDbar_A):
                bad.append("VI")
                break
    if any(bounds[id(f)] & SD != {f.seed} for f in sd.trees_barA + sd.trees_barB):
        bad.append("bar-adjacency")
    if sum(map(len, sd.trees_barA)) < sum(map(len, sd.trees_barB)):
        bad.append("bar balance")
    return bad
