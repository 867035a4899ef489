"""Simple undirected graphs and rooted trees.

Vertices are dense 0-based integers.  Both types are immutable after
construction; derived structures (adjacency matrix, Euler-tour intervals) are
built once and cached.
"""

from __future__ import annotations

from collections import deque
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError

__all__ = ["Graph", "RootedTree", "InputError"]


class Graph:
    """A simple undirected graph on vertices ``0..n-1``."""

    __slots__ = ("n", "_adj", "_nbrs", "__dict__")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise InputError("vertex count must be nonnegative")
        self.n = n
        adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise InputError(f"loop at vertex {u}")
            adj[u].add(v)
            adj[v].add(u)
        self._adj = tuple(frozenset(a) for a in adj)
        self._nbrs = tuple(tuple(sorted(a)) for a in adj)

    @classmethod
    def from_adjacency_matrix(cls, mat) -> "Graph":
        mat = np.array(mat, dtype=bool)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise InputError("adjacency matrix must be square")
        if np.any(np.diag(mat)):
            raise InputError("adjacency matrix has loops")
        mat = mat | mat.T
        g = cls.__new__(cls)
        g.n = mat.shape[0]
        rows = [tuple(np.flatnonzero(r).tolist()) for r in mat]
        g._nbrs = tuple(rows)
        g._adj = tuple(frozenset(r) for r in rows)
        mat.setflags(write=False)
        g.__dict__["matrix"] = mat
        return g

    @classmethod
    def from_bitmasks(cls, masks: Sequence[int]) -> "Graph":
        n = len(masks)
        return cls(n, ((u, v) for u in range(n) for v in range(u + 1, n) if masks[u] >> v & 1))

    # -- queries -----------------------------------------------------------

    def _check(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise InputError(f"vertex {v} out of range for n={self.n}")

    def neighbors(self, v: int) -> tuple[int, ...]:
        self._check(v)
        return self._nbrs[v]

    def neighbor_set(self, v: int) -> frozenset[int]:
        self._check(v)
        return self._adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        return 0 <= u < self.n and v in self._adj[u]

    def degree(self, v: int) -> int:
        self._check(v)
        return len(self._adj[v])

    def degrees(self) -> list[int]:
        return [len(a) for a in self._adj]

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self._nbrs[u] if u < v]

    @cached_property
    def m(self) -> int:
        return sum(len(a) for a in self._adj) // 2

    @cached_property
    def matrix(self) -> np.ndarray:
        """Boolean adjacency matrix (read-only)."""
        mat = np.zeros((self.n, self.n), dtype=bool)
        for u, nb in enumerate(self._nbrs):
            if nb:
                mat[u, list(nb)] = True
        mat.setflags(write=False)
        return mat

    @cached_property
    def bitmasks(self) -> tuple[int, ...]:
        return tuple(sum(1 << v for v in nb) for nb in self._nbrs)

    # -- constructions -----------------------------------------------------

    def complement(self) -> "Graph":
        return Graph(self.n, ((u, v) for u in range(self.n) for v in range(u + 1, self.n)
                              if v not in self._adj[u]))

    def induced(self, vertices: Iterable[int]) -> "Graph":
        """Induced subgraph, relabelled in increasing order of ``vertices``."""
        vs = sorted(set(vertices))
        for v in vs:
            self._check(v)
        index = {v: i for i, v in enumerate(vs)}
        return Graph(len(vs), ((index[u], index[v]) for u in vs for v in self._nbrs[u]
                               if v in index and u < v))

    def remove_vertices(self, vertices: Iterable[int]) -> "Graph":
        drop = set(vertices)
        return self.induced(v for v in range(self.n) if v not in drop)

    def components(self, within: Iterable[int] | None = None) -> list[list[int]]:
        """Connected components (sorted lists), optionally of the induced subgraph on ``within``."""
        alive = set(range(self.n)) if within is None else set(within)
        seen: set[int] = set()
        comps = []
        for s in sorted(alive):
            if s in seen:
                continue
            comp, queue = [], deque([s])
            seen.add(s)
            while queue:
                u = queue.popleft()
                comp.append(u)
                for w in self._nbrs[u]:
                    if w in alive and w not in seen:
                        seen.add(w)
                        queue.append(w)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def bipartition(self) -> tuple[list[int], list[int]] | None:
        """Two colour classes if the graph is bipartite, else ``None``."""
        colour = [-1] * self.n
        for s in range(self.n):
            if colour[s] >= 0:
                continue
            colour[s] = 0
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for w in self._nbrs[u]:
                    if colour[w] < 0:
                        colour[w] = 1 - colour[u]
                        queue.append(w)
                    elif colour[w] == colour[u]:
                        return None
        return ([v for v in range(self.n) if colour[v] == 0],
                [v for v in range(self.n) if colour[v] == 1])

    def disjoint_union(self, other: "Graph") -> "Graph":
        off = self.n
        return Graph(self.n + other.n,
                     self.edges() + [(u + off, v + off) for u, v in other.edges()])

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self._adj == other._adj

    def __hash__(self) -> int:
        return hash((self.n, self._adj))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


class RootedTree:
    """A tree given by parent pointers; ``parent[root] == -1``."""

    def __init__(self, parent: Sequence[int], root: int | None = None):
        par = np.asarray(parent, dtype=np.int64).reshape(-1)
        n = len(par)
        roots = np.flatnonzero(par < 0)
        if n == 0 or len(roots) != 1:
            raise InputError("a rooted tree needs exactly one root")
        r = int(roots[0])
        if root is not None and r != root:
            raise InputError(f"declared root {root} does not match parent array")
        if par.max() >= n:
            raise InputError("parent index out of range")
        # depths by pointer jumping; a cycle shows up as an ancestor that never reaches the root
        anc = par.copy()
        anc[r] = r
        depth = np.ones(n, dtype=np.int64)
        depth[r] = 0
        for _ in range(max(1, int(n).bit_length())):
            depth += depth[anc]
            anc = anc[anc]
        if np.any(anc != r):
            raise InputError("parent links contain a cycle or are disconnected")
        self.n = n
        self.root = r
        self.parent = tuple(par.tolist())
        par.setflags(write=False)
        self.parent_array = par
        self.depth = tuple(depth.tolist())
        # parents precede children
        self.order = tuple(np.argsort(depth, kind="stable").tolist())

    @classmethod
    def from_graph(cls, g: Graph, root: int = 0) -> "RootedTree":
        if g.m != g.n - 1 or not g.is_connected():
            raise InputError("graph is not a tree")
        parent = [-2] * g.n
        parent[root] = -1
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in g.neighbors(u):
                if parent[w] == -2:
                    parent[w] = u
                    queue.append(w)
        return cls(parent)

    @classmethod
    def path(cls, n: int) -> "RootedTree":
        return cls([-1] + list(range(n - 1)))

    @classmethod
    def star(cls, leaves: int) -> "RootedTree":
        return cls([-1] + [0] * leaves)

    # -- tree order ----------------------------------------------------------

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        ch: list[list[int]] = [[] for _ in range(self.n)]
        for v, p in enumerate(self.parent):
            if p >= 0:
                ch[p].append(v)
        return tuple(tuple(c) for c in ch)

    @cached_property
    def preorder(self) -> tuple[int, ...]:
        children = self.children
        order = []
        stack = [self.root]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(reversed(children[v]))
        return tuple(order)

    @cached_property
    def _euler(self) -> tuple[list[int], list[int]]:
        size = [1] * self.n
        parent = self.parent
        for v in reversed(self.order):
            if parent[v] >= 0:
                size[parent[v]] += size[v]
        tin = [0] * self.n
        for i, v in enumerate(self.preorder):
            tin[v] = i
        return tin, [t + z for t, z in zip(tin, size)]

    def _check(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise InputError(f"vertex {v} out of range for n={self.n}")

    def is_ancestor(self, x: int, v: int) -> bool:
        """True iff ``x`` lies on the root-``v`` path (so ``x <= v`` in the tree order)."""
        tin, tout = self._euler
        return tin[x] <= tin[v] < tout[x]

    def subtree(self, x: int) -> frozenset[int]:
        self._check(x)
        tin, tout = self._euler
        return frozenset(self.preorder[tin[x]:tout[x]])

    def subtree_size(self, x: int) -> int:
        self._check(x)
        tin, tout = self._euler
        return tout[x] - tin[x]

    def seed(self, vertices: Iterable[int]) -> int:
        """Parent of the shallowest vertex of a connected, root-free vertex set."""
        w = set(vertices)
        if not w:
            raise InputError("empty vertex set has no seed")
        for v in w:
            self._check(v)
        if self.root in w:
            raise InputError("vertex set contains the root")
        top = min(w, key=lambda v: (self.depth[v], v))
        # connected iff every other member has its parent inside w
        if any(self.parent[v] not in w for v in w if v != top):
            raise InputError("vertex set is not connected in the tree")
        return self.parent[top]

    def edges(self) -> list[tuple[int, int]]:
        return [(p, v) for v, p in enumerate(self.parent) if p >= 0]

    def as_graph(self) -> Graph:
        return Graph(self.n, self.edges())

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        return tuple(c + ((p,) if p >= 0 else ()) for c, p in zip(self.children, self.parent))

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def dist_to_root_parity(self, v: int) -> int:
        return self.depth[v] & 1

    def __repr__(self) -> str:
        return f"RootedTree(n={self.n}, root={self.root})"
