"""Independent oracles: embedding validity, tree containment, small-scale conjecture and Ramsey checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .catalog import MAX_ENUM_N, free_trees, graphs_up_to_iso, random_graph, tree_code
from .errors import Infeasible, InputError
from .graphs import Graph, RootedTree
from .regularity import _q

__all__ = ["Certificate", "verify_embedding", "degree_hypothesis", "SearchResult", "contains_tree",
           "LKSReport", "check_lks", "RamseyResult", "ramsey_trees", "StrategyResult",
           "ramsey_strategy", "amplify"]


@dataclass(frozen=True)
class Certificate:
    passed: bool
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    def to_json(self) -> dict:
        return {"verdict": "pass" if self.passed else "fail", "details": self.details}


def verify_embedding(pattern: Graph, host: Graph, phi: Mapping[int, int] | Sequence[int]) -> Certificate:
    """Pass iff ``phi`` is total, injective, in range, and maps every pattern edge to a host edge."""
    if not isinstance(phi, Mapping):
        phi = dict(enumerate(phi))
    bad: dict = {}
    missing = [v for v in range(pattern.n) if v not in phi]
    if missing:
        bad["unmapped"] = missing
    out_of_range = sorted(v for v, h in phi.items() if not 0 <= h < host.n)
    if out_of_range:
        bad["out_of_range"] = out_of_range
    seen: dict[int, int] = {}
    dup = []
    for v in sorted(phi):
        h = phi[v]
        if h in seen:
            dup.append([seen[h], v, h])
        seen.setdefault(h, v)
    if dup:
        bad["duplicated_image"] = dup
    broken = [[u, v] for u, v in pattern.edges()
              if u in phi and v in phi and not host.has_edge(phi[u], phi[v])]
    if broken:
        bad["non_edges"] = broken
    return Certificate(not bad, bad or {"vertices": pattern.n, "edges": pattern.m})


def degree_hypothesis(g: Graph, k, eta) -> bool:
    """At least ``(1+eta) n/2`` vertices have degree at least ``(1+eta) k`` (both bounds inclusive)."""
    eta = _q(eta)
    need_deg = (1 + eta) * k
    count = sum(1 for d in g.degrees() if d >= need_deg)
    return count >= (1 + eta) * g.n / 2


# ---------------------------------------------------------------------------
# tree containment


@dataclass(frozen=True)
class SearchResult:
    status: str  # "found", "not-found" or "budget-exceeded"
    phi: dict[int, int] | None = None
    nodes: int = 0

    @property
    def found(self) -> bool:
        return self.status == "found"

    def to_json(self) -> dict:
        out: dict = {"status": self.status, "nodes": self.nodes}
        if self.phi is not None:
            out["phi"] = [[v, h] for v, h in sorted(self.phi.items())]
        return out


def _search_order(T: Graph) -> tuple[list[int], list[int]]:
    """BFS order from a maximum-degree vertex and the parent of each vertex in it."""
    start = max(range(T.n), key=lambda v: (T.degree(v), -v))
    order, parent = [start], {start: -1}
    for v in order:
        for w in T.neighbors(v):
            if w not in parent:
                parent[w] = v
                order.append(w)
    return order, [parent[v] for v in order]


def contains_tree(host: Graph, T: RootedTree | Graph, budget: int = 10**6) -> SearchResult:
    """Backtracking search for a copy of ``T`` in ``host``.

    Tree vertices are placed in BFS order from a maximum-degree vertex; each
    goes to an unused host neighbour of its parent's image whose degree is at
    least its own.  ``budget`` caps the number of placements tried.
    """
    tg = T.as_graph() if isinstance(T, RootedTree) else T
    if tg.n == 0:
        return SearchResult("found", {}, 0)
    if tg.n > host.n or max(tg.degrees()) > max(host.degrees(), default=-1):
        return SearchResult("not-found", None, 0)
    order, par = _search_order(tg)
    pos = {v: i for i, v in enumerate(order)}
    ppos = [pos[p] if p >= 0 else -1 for p in par]
    need = [tg.degree(v) for v in order]
    hdeg = host.degrees()
    nbrs = [host.neighbors(h) for h in range(host.n)]
    t = len(order)
    img = [-1] * t
    used = [False] * host.n
    nodes = 0

    def extend(i: int) -> bool | None:
        nonlocal nodes
        if i == t:
            return True
        for h in nbrs[img[ppos[i]]]:
            if used[h] or hdeg[h] < need[i]:
                continue
            nodes += 1
            if nodes > budget:
                return None
            img[i] = h
            used[h] = True
            r = extend(i + 1)
            if r is not False:
                return r
            used[h] = False
        return False

    for h in range(host.n):
        if hdeg[h] < need[0]:
            continue
        nodes += 1
        img[0] = h
        used[h] = True
        r = extend(1)
        if r is None:
            return SearchResult("budget-exceeded", None, nodes)
        if r:
            phi = {order[i]: img[i] for i in range(t)}
            if not verify_embedding(tg, host, phi):
                raise AssertionError("backtracking produced an invalid embedding")
            return SearchResult("found", phi, nodes)
        used[h] = False
    return SearchResult("not-found", None, nodes)


# ---------------------------------------------------------------------------
# the conjecture at tiny scale


@dataclass
class LKSReport:
    n: int
    k: int
    scope: str
    graphs: int = 0
    qualifying: int = 0
    pairs: int = 0
    counterexamples: list = field(default_factory=list)
    undecided: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.counterexamples and not self.undecided

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "scope": self.scope, "graphs": self.graphs,
                "qualifying": self.qualifying, "pairs": self.pairs,
                "counterexamples": self.counterexamples, "undecided": self.undecided,
                "verdict": "pass" if self.passed else "fail"}


def lks_hypothesis(g: Graph, k: int) -> bool:
    """At least half of the vertices have degree at least ``k``."""
    return 2 * sum(1 for d in g.degrees() if d >= k) >= g.n


def check_lks(n: int, k: int, scope: str = "exhaustive", count: int = 1000, seed: int = 0,
              budget: int = 10**6) -> LKSReport:
    """Test every tree with ``k`` edges against graphs on ``n`` vertices meeting the degree condition.

    ``exhaustive`` runs over all graphs up to isomorphism; ``sampled`` over
    ``count`` random graphs with a random edge probability each.
    """
    if k < 0 or n < 1:
        raise InputError("need n >= 1 and k >= 0")
    if scope == "exhaustive":
        graphs = graphs_up_to_iso(n)
    elif scope == "sampled":
        rng = np.random.default_rng(seed)
        graphs = (random_graph(n, float(rng.random()), rng) for _ in range(count))
    else:
        raise InputError(f"unknown scope {scope!r}")
    trees = list(free_trees(k + 1))
    rep = LKSReport(n, k, scope)
    for g in graphs:
        rep.graphs += 1
        if not lks_hypothesis(g, k):
            continue
        rep.qualifying += 1
        for T in trees:
            rep.pairs += 1
            res = contains_tree(g, T, budget)
            if res.status == "not-found":
                rep.counterexamples.append({"edges": g.edges(), "tree": tree_code(T)})
            elif res.status == "budget-exceeded":
                rep.undecided.append({"edges": g.edges(), "tree": tree_code(T)})
    return rep


# ---------------------------------------------------------------------------
# Ramsey numbers of trees


@dataclass
class RamseyResult:
    value: int | None
    lower_bound: int  # r > lower_bound is certified by ``witness``
    witness: Graph | None = None
    exhaustive_upto: int = 0

    def to_json(self) -> dict:
        return {"r": self.value, "lower_bound": self.lower_bound,
                "witness_edges": self.witness.edges() if self.witness is not None else None,
                "witness_n": self.witness.n if self.witness is not None else None,
                "exhaustive_upto": self.exhaustive_upto}


def _avoids(g: Graph, T1, T2, budget: int) -> bool:
    r1 = contains_tree(g, T1, budget)
    if r1.found:
        return False
    r2 = contains_tree(g.complement(), T2, budget)
    if r2.found:
        return False
    if "budget-exceeded" in (r1.status, r2.status):
        raise Infeasible("ramsey", "containment decided within budget", n=g.n, budget=budget)
    return True


def ramsey_trees(T1: RootedTree | Graph, T2: RootedTree | Graph, n_max: int, samples: int = 2000,
                 seed: int = 0, budget: int = 10**6) -> RamseyResult:
    """Smallest ``n <= n_max`` such that every red/blue ``K_n`` has a red ``T1`` or a blue ``T2``.

    Colourings are graphs (red edges); up to ``n = 8`` every colouring is
    covered by the isomorphism classes, and when ``T1`` and ``T2`` are
    isomorphic only classes with at most half the edges are tried, since a
    colouring and its swap are then equivalent.  Beyond that, random
    colourings can only raise the lower bound.
    """
    same = tree_code(T1) == tree_code(T2)
    lower, witness, upto = 0, None, 0
    rng = np.random.default_rng(seed)
    for n in range(1, n_max + 1):
        found = None
        if n <= MAX_ENUM_N:
            total = n * (n - 1) // 2
            for g in graphs_up_to_iso(n):
                if same and 2 * g.m > total:
                    continue
                if _avoids(g, T1, T2, budget):
                    found = g
                    break
            upto = n
            if found is None:
                return RamseyResult(n, lower, witness, upto)
        else:
            for _ in range(samples):
                g = random_graph(n, 0.5, rng)
                if _avoids(g, T1, T2, budget):
                    found = g
                    break
            if found is None:
                break
        lower, witness = n, found
    return RamseyResult(None, lower, witness, upto)


@dataclass
class StrategyResult:
    side: str
    host: str  # "G" or "complement"
    threshold: float
    qualifying: int
    kept: list[int]
    method: str  # "construction" or "search"
    status: str
    phi: dict[int, int] | None = None
    note: str = ""

    def to_json(self) -> dict:
        return {"side": self.side, "host": self.host, "threshold": self.threshold,
                "qualifying": self.qualifying, "kept": len(self.kept), "method": self.method,
                "status": self.status, "note": self.note,
                "phi": [[v, h] for v, h in sorted(self.phi.items())] if self.phi else None}


def ramsey_strategy(G: Graph, T1: RootedTree, T2: RootedTree, eps=Fraction(1, 8), relaxed=20,
                    clusters: int = 8, seed: int = 0, budget: int = 10**6) -> StrategyResult:
    """Pick the colour class whose degrees are large and embed the matching tree there.

    With ``n = k + m`` and ``|G| = ceil((1+eps) n)``, either half of the vertices
    of ``G`` have degree at least ``k + eps n/2`` or half of those of the
    complement have degree at least ``m + eps n/2``.  Keeping ``ceil(|G|/2)`` such
    vertices and deleting ``floor(eps n/4)`` others, the tree is embedded by the
    construction (with ``eta = eps/8`` and ``q`` a quarter of the size ratio);
    if the construction does not apply at this size the backtracking search decides.
    """
    from .embedder import embed_tree
    from .errors import InvariantViolation
    from .regularity import desk_constants, equal_partition

    eps = _q(eps)
    k, m = T1.n - 1, T2.n - 1
    n = k + m
    if n < 1 or not 0 < eps < Fraction(1, 4):
        raise InputError("need k + m >= 1 and 0 < eps < 1/4")
    if G.n != math.ceil((1 + eps) * n):
        raise InputError(f"host must have ceil((1+eps)(k+m)) = {math.ceil((1 + eps) * n)} vertices")
    half = math.ceil(G.n / 2)
    thr_a, thr_b = k + eps * n / 2, m + eps * n / 2
    degs = G.degrees()
    qual_a = [v for v in range(G.n) if degs[v] >= thr_a]
    qual_b = [v for v in range(G.n) if G.n - 1 - degs[v] >= thr_b]
    if len(qual_a) >= half:
        side, host, T, qual, thr = "A", G, T1, qual_a, thr_a
    elif len(qual_b) >= half:
        side, host, T, qual, thr = "B", G.complement(), T2, qual_b, thr_b
    else:
        # a vertex can miss both thresholds because its two degrees add up to |G| - 1, not |G|
        raise Infeasible("ramsey_strategy", "half the vertices qualify in G or in its complement",
                         qualifying_G=len(qual_a), qualifying_complement=len(qual_b), need=half)
    L = sorted(qual, key=lambda v: (-(degs[v] if side == "A" else G.n - 1 - degs[v]), v))[:half]
    Lset = set(L)
    drop = sorted(v for v in range(G.n) if v not in Lset)[: math.floor(eps * n / 4)]
    kept = [v for v in range(G.n) if v not in set(drop)]
    sub = host.induced(kept)
    ratio = Fraction(min(k, m), max(k, m)) if min(k, m) else Fraction(0)
    note = ""
    try:
        c = desk_constants(eps / 8, ratio / 4 if ratio else Fraction(1, 100), T.n - 1, relaxed=relaxed)
        part = equal_partition(sub, min(clusters, sub.n), seed=seed)
        emb = embed_tree(T, sub, part, c, seed)
        phi = {v: kept[h] for v, h in emb.phi.items()}
        return StrategyResult(side, "G" if side == "A" else "complement", float(thr), len(qual), kept,
                              "construction", "embedded", phi)
    except (Infeasible, InputError) as e:
        note = str(e)
    except InvariantViolation:
        raise
    res = contains_tree(sub, T, budget)
    phi = {v: kept[h] for v, h in res.phi.items()} if res.found else None
    return StrategyResult(side, "G" if side == "A" else "complement", float(thr), len(qual), kept,
                          "search", "embedded" if res.found else res.status, phi, note)


# ---------------------------------------------------------------------------
# amplification


def amplify(G: Graph, m: int) -> Graph:
    """``m`` disjoint copies of ``G``; copy ``i`` occupies ids ``i*n .. (i+1)*n - 1``."""
    if m < 1:
        raise InputError("need at least one copy")
    n = G.n
    return Graph(n * m, [(u + i * n, v + i * n) for i in range(m) for u, v in G.edges()])
