"""Read-only view of the pruned host plus the mutable set of used vertices."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

import numpy as np

from ..graphs import Graph
from ..regularity import Constants, HostPartition

__all__ = ["HostContext"]


class HostContext:
    """Cluster-aware degree and typicality queries on ``G_p``.

    ``used`` is the set ``U`` of host vertices already occupied by the embedding.
    Typicality follows the two flavours used by the construction: against whole
    clusters (tolerance ``eps*s`` per cluster) and against large subsets of
    clusters (tolerance ``2*eps*s`` per cluster, vacuous below ``alpha*s``).
    """

    def __init__(self, gp: Graph, part: HostPartition, c: Constants, alpha_sub=None):
        self.g = gp
        self.part = part
        self.c = c
        self.n, self.N, self.s = gp.n, part.N, part.s
        self.mat = gp.matrix
        self.matf = self.mat.astype(np.float32)
        self.cluster_of = part.cluster_of()
        self.members = [np.asarray(cl, dtype=np.int64) for cl in part.clusters]
        self.masks = []
        for cl in self.members:
            m = np.zeros(self.n, dtype=bool)
            m[cl] = True
            self.masks.append(m)
        self.used = np.zeros(self.n, dtype=bool)
        self.eps = float(c.epsilon)
        # subset typicality only makes sense for subsets of at least this size
        self.alpha_sub = float(c.alpha if alpha_sub is None else alpha_sub)
        self._typ_cache: dict[tuple[int, tuple[int, ...]], np.ndarray] = {}

    # -- counts --------------------------------------------------------------

    def union_mask(self, clusters: Iterable[int]) -> np.ndarray:
        m = np.zeros(self.n, dtype=bool)
        for X in clusters:
            m |= self.masks[X]
        return m

    def free(self, X: int) -> np.ndarray:
        """Mask of the unused vertices of cluster ``X``."""
        return self.masks[X] & ~self.used

    def used_in(self, X: int) -> int:
        return int(np.count_nonzero(self.masks[X] & self.used))

    def used_counts(self) -> np.ndarray:
        """``|V_X cap U|`` for every cluster, recounted from ``used``."""
        cl = self.cluster_of[self.used]
        return np.bincount(cl[cl >= 0], minlength=self.N)

    def deg(self, v: int, mask: np.ndarray) -> int:
        return int(np.count_nonzero(self.mat[v] & mask))

    def deg_cluster(self, v: int, X: int) -> int:
        return self.deg(v, self.masks[X])

    def wdeg(self, X: int, mask: np.ndarray) -> Fraction:
        """``e(V_X, mask) / s``: the weighted degree of cluster ``X`` into a vertex set."""
        e = int(np.count_nonzero(self.mat[self.members[X]][:, mask]))
        return Fraction(e, self.s)

    def wdeg_clusters(self, X: int, clusters: Iterable[int]) -> Fraction:
        return self.wdeg(X, self.union_mask(clusters))

    # -- typicality ----------------------------------------------------------

    def typical(self, X: int, clusters: Iterable[int]) -> np.ndarray:
        """Vertices of ``X`` with ``deg_Y(v) > wdeg_Y(X) - eps*|Y|*s`` for the cluster set ``Y``."""
        key = (X, tuple(sorted(set(clusters) - {X})))
        hit = self._typ_cache.get(key)
        if hit is not None:
            return hit
        out = self.masks[X].copy()
        if key[1]:
            target = self.union_mask(key[1]).astype(np.float32)
            degs = self.matf[self.members[X]] @ target
            thresh = degs.sum() / self.s - self.eps * len(key[1]) * self.s
            out[self.members[X]] = degs > thresh
        self._typ_cache[key] = out
        return out

    def typical_subset(self, X: int, subset: np.ndarray, n_clusters: int = 1) -> np.ndarray:
        """Vertices of ``X`` typical for a vertex set spread over ``n_clusters`` clusters.

        Vacuous (all of ``X``) when the subset has fewer than ``alpha*s`` vertices.
        """
        out = self.masks[X].copy()
        size = int(np.count_nonzero(subset))
        if size == 0 or size < self.alpha_sub * self.s:
            return out
        degs = self.matf[self.members[X]] @ subset.astype(np.float32)
        thresh = degs.sum() / self.s - 2 * self.eps * n_clusters * self.s
        out[self.members[X]] = degs > thresh
        return out
