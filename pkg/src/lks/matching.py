"""Maximum matchings, Gallai-Edmonds decompositions and the cluster-graph matching structure."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import networkx as nx

from .graphs import Graph, InputError
from .regularity import WeightedClusterGraph

__all__ = [
    "Matching", "max_matching", "max_matching_weighted_preference", "is_factor_critical",
    "GEDecomposition", "gallai_edmonds", "MatchingStructure", "find_structure",
    "check_structure", "strip_AB", "StructureError", "is_matching", "matched_vertices",
]

Matching = frozenset  # of (u, v) tuples with u < v


def _as_matching(pairs: Iterable[tuple[int, int]]) -> frozenset[tuple[int, int]]:
    return frozenset((min(u, v), max(u, v)) for u, v in pairs)


def matched_vertices(m: Iterable[tuple[int, int]]) -> set[int]:
    return {x for e in m for x in e}


def is_matching(g: Graph, m: Iterable[tuple[int, int]]) -> bool:
    seen: set[int] = set()
    for u, v in m:
        if u in seen or v in seen or u == v or not g.has_edge(u, v):
            return False
        seen.update((u, v))
    return True


def max_matching(g: Graph) -> frozenset[tuple[int, int]]:
    """Maximum-cardinality matching by Edmonds' blossom algorithm, O(n^3)."""
    n = g.n
    nbrs = [g.neighbors(v) for v in range(n)]
    match = [-1] * n
    # greedy warm start
    for u in range(n):
        if match[u] < 0:
            for w in nbrs[u]:
                if match[w] < 0:
                    match[u], match[w] = w, u
                    break

    def find_path(root: int) -> bool:
        parent = [-1] * n
        base = list(range(n))
        used = [False] * n
        used[root] = True
        queue = deque([root])

        def lca(a: int, b: int) -> int:
            mark = [False] * n
            while True:
                a = base[a]
                mark[a] = True
                if match[a] < 0:
                    break
                a = parent[match[a]]
            while True:
                b = base[b]
                if mark[b]:
                    return b
                b = parent[match[b]]

        def mark_path(v: int, b: int, child: int, blossom: list[bool]) -> None:
            while base[v] != b:
                blossom[base[v]] = blossom[base[match[v]]] = True
                parent[v] = child
                child = match[v]
                v = parent[match[v]]

        while queue:
            v = queue.popleft()
            for to in nbrs[v]:
                if base[v] == base[to] or match[v] == to:
                    continue
                if to == root or (match[to] >= 0 and parent[match[to]] >= 0):
                    cur = lca(v, to)
                    blossom = [False] * n
                    mark_path(v, cur, to, blossom)
                    mark_path(to, cur, v, blossom)
                    for i in range(n):
                        if blossom[base[i]]:
                            base[i] = cur
                            if not used[i]:
                                used[i] = True
                                queue.append(i)
                elif parent[to] < 0:
                    parent[to] = v
                    if match[to] < 0:
                        # augment along the alternating path ending at `to`
                        while to >= 0:
                            pv = parent[to]
                            nxt = match[pv]
                            match[to], match[pv] = pv, to
                            to = nxt
                        return True
                    used[match[to]] = True
                    queue.append(match[to])
        return False

    for v in range(n):
        if match[v] < 0 and nbrs[v]:
            find_path(v)
    return _as_matching((u, match[u]) for u in range(n) if match[u] > u)


def max_matching_weighted_preference(g: Graph, favored: Iterable[int]) -> frozenset[tuple[int, int]]:
    """Among maximum matchings, one covering the most ``favored`` vertices."""
    fav = set(favored)
    big = g.n + 1
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    for u, v in g.edges():
        h.add_edge(u, v, weight=big + (u in fav) + (v in fav))
    return _as_matching(nx.max_weight_matching(h, maxcardinality=True))


def is_factor_critical(g: Graph) -> bool:
    """True iff ``g - v`` has a perfect matching for every vertex ``v``."""
    if g.n % 2 == 0:
        return False
    for v in range(g.n):
        rest = g.remove_vertices([v])
        if 2 * len(max_matching(rest)) != rest.n:
            return False
    return True


@dataclass(frozen=True)
class GEDecomposition:
    S: frozenset[int]
    components: tuple[tuple[int, ...], ...]
    witness: frozenset[tuple[int, int]]


def _canonical_sets(g: Graph) -> tuple[set[int], set[int], set[int]]:
    """The canonical Gallai-Edmonds sets ``D, A, C``."""
    nu = len(max_matching(g))
    D = {v for v in range(g.n) if len(max_matching(g.remove_vertices([v]))) == nu}
    A = {u for v in D for u in g.neighbors(v)} - D
    C = set(range(g.n)) - D - A
    return D, A, C


def _barrier(g: Graph) -> set[int]:
    """A set S whose removal leaves only factor-critical components, S matchable into them."""
    D, A, C = _canonical_sets(g)
    S = set(A)
    for comp in g.components(C):
        sub = g.induced(comp)
        # sub has a perfect matching; removing its first vertex x gives deficiency one,
        # so {x} together with the canonical barrier of sub - x is tight.
        rest = sub.remove_vertices([0])
        if rest.n == 0:
            inner = set()
        else:
            inner_local = _barrier(rest)
            rest_ids = [comp[i] for i in range(1, len(comp))]
            inner = {rest_ids[i] for i in inner_local}
        S |= {comp[0]} | inner
    return S


def gallai_edmonds(g: Graph) -> GEDecomposition:
    """A vertex set S with factor-critical components of ``g - S`` and a matching of S into them."""
    S = _barrier(g)
    comps = g.components(set(range(g.n)) - S)
    comp_of = {v: i for i, c in enumerate(comps) for v in c}
    m = max_matching(g)
    witness = []
    for u, v in m:
        if u in S and v not in S:
            witness.append((u, v))
        elif v in S and u not in S:
            witness.append((u, v))
    ge = GEDecomposition(frozenset(S), tuple(tuple(c) for c in comps), _as_matching(witness))
    # trust but verify: witness covers S, hits distinct components
    hit = [comp_of[v if u in S else u] for u, v in ge.witness]
    if len(ge.witness) != len(S) or len(set(hit)) != len(hit):
        raise AssertionError("Gallai-Edmonds witness does not match S into distinct components")
    return ge


# ---------------------------------------------------------------------------
# matching structure on the cluster graph


class StructureError(RuntimeError):
    pass


@dataclass(frozen=True)
class MatchingStructure:
    A: int
    B: int
    case: str  # "a" or "b"
    M_full: frozenset[tuple[int, int]]
    M: frozenset[tuple[int, int]]
    L: frozenset[int]
    Lprime: frozenset[int]  # L minus V(M), after stripping
    exchanges: int = 0

    def to_json(self) -> dict:
        return {"A": self.A, "B": self.B, "case": self.case,
                "M": sorted(list(e) for e in self.M),
                "M_full": sorted(list(e) for e in self.M_full),
                "L": sorted(self.L), "Lprime": sorted(self.Lprime)}


def strip_AB(m: Iterable[tuple[int, int]], A: int, B: int) -> frozenset[tuple[int, int]]:
    """Drop the (at most two) matching edges meeting ``A`` or ``B``."""
    return frozenset(e for e in m if A not in e and B not in e)


def _heavy(H: WeightedClusterGraph, K) -> frozenset[int]:
    return frozenset(v for v in range(H.N) if H.wdeg(v) >= K)


def find_structure(H: WeightedClusterGraph, K) -> MatchingStructure:
    """Adjacent heavy clusters ``A, B`` and a matching meeting case (a) or (b)."""
    K = Fraction(K)
    L = _heavy(H, K)
    if 2 * len(L) <= H.N:
        raise InputError(f"|L|={len(L)} is not more than N/2={H.N / 2}")
    Y = set(range(H.N)) - L
    skel = Graph(H.N, [(u, v) for u, v in H.edges() if not (u in Y and v in Y)])
    ge = gallai_edmonds(skel)
    S = set(ge.S)
    Lp = sorted(L - S)
    Lp_set = set(Lp)
    M = set(max_matching_weighted_preference(skel, Y))

    # case (a): an edge inside L \ S
    for a in Lp:
        for b in skel.neighbors(a):
            if b in Lp_set and a < b:
                comp = next(c for c in ge.components if a in c)
                covered = matched_vertices(M)
                if not all(v in covered for v in comp):
                    # rematch the factor-critical component leaving `a` exposed
                    cset = set(comp)
                    M = {e for e in M if not (e[0] in cset and e[1] in cset)}
                    inner = skel.induced([v for v in comp if v != a])
                    ids = sorted(v for v in comp if v != a)
                    M |= {(ids[u], ids[v]) for u, v in max_matching(inner)}
                return _finish(H, a, b, "a", M, L, 0)

    # L' independent; case (a) can still hold for some other heavy edge (e.g. K = N/2 exactly)
    covered = matched_vertices(M)
    for a in sorted(L):
        for b in H.neighbors(a):
            if b in L and a < b:
                need = (set(H.neighbors(a)) | set(H.neighbors(b))) - {a, b}
                if need <= covered:
                    return _finish(H, a, b, "a", M, L, 0)

    exchanges = 0
    for _ in range(H.N ** 2 + 1):
        covered = matched_vertices(M)
        X = Y - covered
        Ltilde = sorted({u for a in Lp for u in skel.neighbors(a)} & L)
        for b in Ltilde:
            if H.wdeg(b, set(range(H.N)) - X) >= K / 2:
                a = min(x for x in skel.neighbors(b) if x in Lp_set)
                return _finish(H, a, b, "b", M, L, exchanges)
        # contradiction branch: exchange AB for BD with D uncovered in Y
        swapped = False
        for e in sorted(M):
            for a, b in (e, e[::-1]):
                if a in Lp_set and b in Ltilde:
                    ds = sorted(d for d in skel.neighbors(b) if d in X)
                    if ds:
                        M.remove(e)
                        M.add((min(b, ds[0]), max(b, ds[0])))
                        exchanges += 1
                        swapped = True
                        break
            if swapped:
                break
        if not swapped:
            raise StructureError("matching-structure search stalled: no case applies and no exchange exists")
    raise StructureError("matching-structure exchange loop exceeded N^2 iterations")


def _finish(H, a, b, case, M, L, exchanges) -> MatchingStructure:
    full = _as_matching(M)
    stripped = strip_AB(full, a, b)
    lprime = frozenset(L - matched_vertices(stripped) - {a, b})
    return MatchingStructure(a, b, case, full, stripped, L, lprime, exchanges)


def check_structure(H: WeightedClusterGraph, K, st: MatchingStructure) -> list[str]:
    """Independent re-check of the structure's guarantees; returns violated predicates."""
    K = Fraction(K)
    problems = []
    L = _heavy(H, K)
    A, B = st.A, st.B
    if A not in L or B not in L:
        problems.append("A or B not heavy")
    if H.w(A, B) <= 0:
        problems.append("A and B not adjacent")
    seen: set[int] = set()
    for u, v in st.M_full:
        if H.w(u, v) <= 0 or u in seen or v in seen:
            problems.append(f"({u},{v}) breaks the matching")
        seen |= {u, v}
    NA = set(H.neighbors(A)) - {A}
    NB = set(H.neighbors(B)) - {B}
    if st.case == "a":
        need = (NA | NB) - {A, B}
        if not need <= seen:
            problems.append(f"N(A u B) not covered: missing {sorted(need - seen)}")
    elif st.case == "b":
        if not NA <= seen:
            problems.append(f"N(A) not covered: missing {sorted(NA - seen)}")
        if H.wdeg(B, L | seen) < K / 2:
            problems.append("weighted degree of B into L u V(M) below K/2")
        for u, v in st.M_full:
            if u in NA and v in NA:
                problems.append(f"edge ({u},{v}) has both ends in N(A)")
    else:
        problems.append(f"unknown case {st.case!r}")
    return problems
