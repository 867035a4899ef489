"""Bipartite patterns with a few edges beyond a spanning tree."""

from __future__ import annotations

from collections import deque
from fractions import Fraction

from ..errors import InputError, InvariantViolation
from ..graphs import Graph, RootedTree
from ..regularity import Constants, HostPartition
from .engine import Embedding
from .pipeline import Setup, run_pattern

__all__ = ["bfs_tree", "embed_bipartite", "extra_structure"]


def extra_structure(Q: Graph, spanning: RootedTree) -> tuple[list[tuple[int, int]], frozenset[int], frozenset[int]]:
    """Edges of ``Q`` outside the spanning tree, their endpoints ``V(M*)`` and the parents ``N*``."""
    tree = {tuple(sorted(e)) for e in spanning.edges()}
    extra = [e for e in Q.edges() if tuple(sorted(e)) not in tree]
    ends = frozenset(v for e in extra for v in e)
    parents = frozenset(spanning.parent[v] for v in ends if spanning.parent[v] >= 0)
    return extra, ends, parents


def bfs_tree(Q: Graph, root: int = 0) -> RootedTree:
    """Breadth-first spanning tree of a connected graph."""
    parent = [-2] * Q.n
    parent[root] = -1
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for w in Q.neighbors(v):
            if parent[w] == -2:
                parent[w] = v
                queue.append(w)
    return RootedTree(parent)


def _check_input(Q: Graph, spanning: RootedTree | None, c: Constants) -> RootedTree:
    if Q.n < 1 or not Q.is_connected():
        raise InputError("pattern must be connected and non-empty")
    if Q.bipartition() is None:
        raise InputError("pattern is not bipartite")
    if spanning is None:
        spanning = bfs_tree(Q)
    if spanning.n != Q.n or any(not Q.has_edge(u, v) for u, v in spanning.edges()):
        raise InputError("spanning tree is not a subgraph of the pattern")
    excess = Q.m - (Q.n - 1)
    # the seed bound 8/beta + 8c must stay below 9/beta
    if 8 * excess * c.beta >= 1:
        raise InputError(f"pattern has {excess} edges beyond a spanning tree; at most "
                         f"{int((1 / c.beta - Fraction(1, 10**9)) / 8)} are allowed at beta={c.beta}")
    return spanning


def embed_bipartite(Q: Graph, spanning: RootedTree | None, G: Graph, part: HostPartition, c: Constants,
                    seed: int = 0, setup: Setup | None = None) -> Embedding:
    """Embed a connected bipartite ``Q`` through a rooted spanning tree.

    Endpoints of non-tree edges and their tree parents are forced into the
    seed sets, so every non-tree edge joins an A-seed to a B-seed.  Such a
    seed is embedded into the common host neighbourhood of its embedded
    pattern neighbours, and chosen typical for the common neighbourhoods of
    the ones still waiting.
    """
    T = _check_input(Q, spanning, c)
    extra, ends, parents = extra_structure(Q, T)
    excess = len(extra)
    forced = sorted(ends | parents)
    alpha_sub = c.alpha ** (excess + 1) / excess if excess else None
    emb = run_pattern(T, G, part, c, seed, setup, forced=forced,
                      qadj=[Q.neighbors(v) for v in range(Q.n)], extra_vertices=ends,
                      alpha_sub=alpha_sub, pattern=Q, side_cluster_hook=bool(excess))
    bound = 8 / c.beta + 8 * excess
    if emb.info["seeds"] > bound:
        raise InvariantViolation("bipartite", "|bar SD^A| + |SD^B| <= 8/beta + 8c", seeds=emb.info["seeds"],
                                 bound=bound)
    broken = [[u, v] for u, v in extra if not G.has_edge(emb.phi[u], emb.phi[v])]
    if broken:
        raise InvariantViolation("bipartite", "every non-tree edge maps to a host edge", edges=broken)
    emb.info.update({"extra_edges": [list(e) for e in extra], "forced": forced,
                     "seed_bound": float(bound), "alpha_sub": str(alpha_sub) if alpha_sub else None})
    return emb
