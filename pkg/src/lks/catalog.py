"""Small-graph catalogues: graphs up to isomorphism, free trees, random trees.

Graphs are handled as tuples of neighbourhood bitmasks while enumerating.
The canonical form is the lexicographically largest upper-triangle code over
the leaves of an individualisation-refinement search, so it is exact.
"""

from __future__ import annotations

import heapq
from functools import lru_cache
from typing import Iterator

import networkx as nx
import numpy as np

from .errors import InputError
from .graphs import Graph, RootedTree

__all__ = ["canonical_code", "canonical_masks", "graphs_up_to_iso", "free_trees",
           "tree_code", "random_tree", "random_graph"]

MAX_ENUM_N = 8


def _refine(adj: tuple[int, ...], colors: list[int]) -> list[int]:
    """Colour refinement; new colours are ranks of (old colour, neighbour colour counts)."""
    n = len(adj)
    ranks0 = {c: i for i, c in enumerate(sorted(set(colors)))}
    colors = [ranks0[c] for c in colors]
    k = len(ranks0)
    while True:
        sig = []
        for v in range(n):
            a = adj[v]
            cnt = [0] * k
            for u in range(n):
                if a >> u & 1:
                    cnt[colors[u]] += 1
            sig.append((colors[v], tuple(cnt)))
        ranks = {s: i for i, s in enumerate(sorted(set(sig)))}
        new = [ranks[s] for s in sig]
        if len(ranks) == k:
            return new
        colors, k = new, len(ranks)


def _code(adj: tuple[int, ...], order: list[int]) -> int:
    code = 0
    n = len(order)
    for i in range(n):
        a = adj[order[i]]
        for j in range(i + 1, n):
            code = code << 1 | (a >> order[j] & 1)
    return code


def _twins(adj: tuple[int, ...], u: int, v: int) -> bool:
    bu, bv = 1 << u, 1 << v
    return (adj[u] & ~bv) == (adj[v] & ~bu)


def _search(adj: tuple[int, ...], colors: list[int], best: list) -> None:
    n = len(adj)
    cells: dict[int, list[int]] = {}
    for v, c in enumerate(colors):
        cells.setdefault(c, []).append(v)
    target = next((c for c in sorted(cells) if len(cells[c]) > 1), None)
    if target is None:
        order = sorted(range(n), key=colors.__getitem__)
        code = _code(adj, order)
        if best[0] is None or code > best[0][0]:
            best[0] = (code, order)
        return
    cell = cells[target]
    tried: list[int] = []
    for v in cell:
        # swapping twins is an automorphism, so their branches give the same leaves
        if any(_twins(adj, v, w) for w in tried):
            continue
        tried.append(v)
        split = [2 * c + (1 if (c == target and u != v) else 0) for u, c in enumerate(colors)]
        _search(adj, _refine(adj, split), best)


def canonical_masks(adj: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
    """Canonically relabelled bitmask adjacency together with its code."""
    n = len(adj)
    if n == 0:
        return (), 0
    deg = [bin(a).count("1") for a in adj]
    best: list = [None]
    _search(adj, _refine(adj, deg), best)
    code, order = best[0]
    pos = {v: i for i, v in enumerate(order)}
    out = []
    for v in order:
        m = 0
        a = adj[v]
        for u in range(n):
            if a >> u & 1:
                m |= 1 << pos[u]
        out.append(m)
    return tuple(out), code


def canonical_code(g: Graph) -> tuple[int, int]:
    """Isomorphism-invariant key ``(n, code)`` of a graph."""
    return g.n, canonical_masks(tuple(g.bitmasks))[1]


def _max_invariant(adj: tuple[int, ...], v: int, deg: list[int]) -> bool:
    """Whether ``v`` maximises (degree, sorted neighbour degrees)."""
    def inv(x):
        a = adj[x]
        return deg[x], sorted((deg[u] for u in range(len(adj)) if a >> u & 1), reverse=True)
    iv = inv(v)
    return all(inv(x) <= iv for x in range(len(adj)) if deg[x] >= deg[v])


@lru_cache(maxsize=None)
def _level(n: int) -> tuple[tuple[int, ...], ...]:
    if n == 0:
        return ((),)
    if n == 1:
        return ((0,),)
    seen: dict[int, tuple[int, ...]] = {}
    last = n - 1
    for parent in _level(n - 1):
        for S in range(1 << last):
            adj = tuple(parent[u] | ((S >> u & 1) << last) for u in range(last)) + (S,)
            deg = [bin(a).count("1") for a in adj]
            # canonical augmentation: the added vertex must be one a canonical deletion could pick
            if not _max_invariant(adj, last, deg):
                continue
            masks, code = canonical_masks(adj)
            if code not in seen:
                seen[code] = masks
    return tuple(seen[c] for c in sorted(seen))


def graphs_up_to_iso(n: int) -> Iterator[Graph]:
    """Every graph on ``n`` vertices, one per isomorphism class (``n <= 8``)."""
    if not 0 <= n <= MAX_ENUM_N:
        raise InputError(f"exhaustive enumeration is capped at n <= {MAX_ENUM_N}")
    for masks in _level(n):
        yield Graph.from_bitmasks(masks)


def free_trees(order: int) -> Iterator[RootedTree]:
    """Every tree on ``order`` vertices up to isomorphism, rooted at vertex 0."""
    if order < 1:
        raise InputError("a tree has at least one vertex")
    if order == 1:
        yield RootedTree([-1])
        return
    for t in nx.nonisomorphic_trees(order):
        yield RootedTree.from_graph(Graph(order, t.edges()), 0)


def tree_code(T: RootedTree | Graph) -> str:
    """Canonical string of a free tree: AHU code rooted at its centre(s)."""
    g = T.as_graph() if isinstance(T, RootedTree) else T
    if g.n == 0:
        return ""
    # centre by repeated leaf stripping
    deg = [g.degree(v) for v in range(g.n)]
    layer = [v for v in range(g.n) if deg[v] <= 1]
    left = g.n
    while left > 2:
        left -= len(layer)
        nxt = []
        for v in layer:
            for w in g.neighbors(v):
                deg[w] -= 1
                if deg[w] == 1:
                    nxt.append(w)
        layer = nxt
    centres = layer

    def ahu(v: int, p: int) -> str:
        return "(" + "".join(sorted(ahu(w, v) for w in g.neighbors(v) if w != p)) + ")"

    return min(ahu(c, -1) for c in centres)


def random_tree(n: int, rng: np.random.Generator, kind: str = "uniform") -> RootedTree:
    """A random tree on ``n`` vertices rooted at 0.

    ``uniform`` decodes a uniform Prufer sequence; ``recursive`` attaches each
    vertex to a uniform earlier one.
    """
    if n < 1:
        raise InputError("a tree has at least one vertex")
    if kind == "recursive":
        par = np.empty(n, dtype=np.int64)
        par[0] = -1
        if n > 1:
            par[1:] = (rng.random(n - 1) * np.arange(1, n)).astype(np.int64)
        return RootedTree(par)
    if kind != "uniform":
        raise InputError(f"unknown tree kind {kind!r}")
    if n <= 2:
        return RootedTree([-1] + [0] * (n - 1))
    seq = rng.integers(0, n, n - 2).tolist()
    deg = [1] * n
    for x in seq:
        deg[x] += 1
    leaves = [v for v in range(n) if deg[v] == 1]
    heapq.heapify(leaves)
    adj: list[list[int]] = [[] for _ in range(n)]
    for x in seq:
        leaf = heapq.heappop(leaves)
        adj[leaf].append(x)
        adj[x].append(leaf)
        deg[x] -= 1
        if deg[x] == 1:
            heapq.heappush(leaves, x)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    adj[u].append(v)
    adj[v].append(u)
    parent = [-2] * n
    parent[0] = -1
    stack = [0]
    while stack:
        x = stack.pop()
        for w in adj[x]:
            if parent[w] == -2:
                parent[w] = x
                stack.append(w)
    return RootedTree(parent)


def random_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    """Erdos-Renyi ``G(n, p)``."""
    mat = np.triu(rng.random((n, n)) < p, 1)
    return Graph.from_adjacency_matrix(mat | mat.T)
