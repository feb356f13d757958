"""Sparse / almost-clique partition and a post hoc checker for its guarantees."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import _kernels as K
from .graph import Graph

__all__ = ["Decomposition", "DecompositionReport", "decompose", "verify"]


def _ceil(x: float) -> int:
    return math.ceil(x - 1e-9)


@dataclass
class Decomposition:
    """``sparse`` plus disjoint ``clusters`` (sorted vertex arrays), ordered by smallest member."""

    sparse: np.ndarray
    clusters: list[np.ndarray]
    epsilon: float
    dissolved: int = 0

    def labels(self, n: int) -> np.ndarray:
        """-1 for sparse vertices, otherwise the cluster index."""
        lab = np.full(n, -1, dtype=np.int64)
        for i, c in enumerate(self.clusters):
            lab[c] = i
        return lab

    def sparse_mask(self, n: int) -> np.ndarray:
        m = np.zeros(n, dtype=bool)
        m[self.sparse] = True
        return m


def _cluster_profile(g: Graph, cluster: np.ndarray, lab: np.ndarray, idx: int):
    """(external degree, internal non-degree |C minus N_v|) for each v in cluster."""
    deg = g.degrees[cluster]
    starts = g.indptr[cluster]
    offs = np.arange(deg.sum()) - np.repeat(np.cumsum(deg) - deg, deg)
    nb = g.indices[np.repeat(starts, deg) + offs]
    inside = lab[nb] == idx
    rows = np.repeat(np.arange(len(cluster)), deg)
    internal = np.bincount(rows[inside], minlength=len(cluster))
    external = deg - internal
    nondeg = len(cluster) - internal   # counts v itself, since v is not in N_v
    return external, nondeg


def decompose(g: Graph, D: int, eps: float = 0.05, augment: float = 3.0,
              dissolve_violating: bool = True) -> Decomposition:
    """Partition V into a sparse part and almost-cliques.

    ``u, v`` are friends when adjacent with ``|N(u) & N(v)| >= (1-eps)D``; a
    vertex with ``>= (1-eps)D`` friends is dense.  Clusters are components of
    the friendship graph on dense vertices with fewer than ``(1-eps)D``
    members dropped, each then absorbing every outside vertex adjacent to at
    least ``(1-augment*eps)D`` of it.  With ``dissolve_violating``, clusters
    that break the size window or the external/internal degree bounds are
    returned to the sparse part.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if g.D_max > D:
        raise ValueError(f"max degree {g.D_max} exceeds D={D}")
    n = g.n
    thr = _ceil((1 - eps) * D)
    if n == 0 or D == 0:
        return Decomposition(np.arange(n), [], eps)

    dense = K.dense_vertices(g.indptr, g.indices, thr, thr)
    clusters: list[np.ndarray] = []
    if dense.any():
        fe = K.friend_edges(g.indptr, g.indices, dense, thr)
        dv = np.flatnonzero(dense)
        pos = np.full(n, -1, dtype=np.int64)
        pos[dv] = np.arange(len(dv))
        adj = coo_matrix((np.ones(len(fe)), (pos[fe[:, 0]], pos[fe[:, 1]])),
                         shape=(len(dv), len(dv)))
        ncomp, comp = connected_components(adj, directed=False)
        groups = [dv[comp == c] for c in range(ncomp)]
        clusters = [c for c in groups if len(c) >= (1 - eps) * D - 1e-9]

    if clusters:
        lab = np.full(n, -1, dtype=np.int64)
        for i, c in enumerate(clusters):
            lab[c] = i
        thr_aug = _ceil((1 - augment * eps) * D)
        rows = np.repeat(np.arange(n), g.degrees)
        nl = lab[g.indices]
        sel = (lab[rows] < 0) & (nl >= 0)
        key = rows[sel].astype(np.int64) * len(clusters) + nl[sel]
        uk, counts = np.unique(key, return_counts=True)
        joins = uk[counts >= thr_aug]
        extra = [[] for _ in clusters]
        for k in joins.tolist():
            extra[k % len(clusters)].append(k // len(clusters))
        clusters = [np.union1d(c, np.array(e, dtype=np.int64)) for c, e in zip(clusters, extra)]

    dissolved = 0
    if dissolve_violating and clusters:
        lab = np.full(n, -1, dtype=np.int64)
        for i, c in enumerate(clusters):
            lab[c] = i
        kept = []
        for i, c in enumerate(clusters):
            ext, nondeg = _cluster_profile(g, c, lab, i)
            ok = ((1 - eps) * D - 1e-9 <= len(c) <= (1 + 6 * eps) * D + 1e-9
                  and ext.max() < 7 * eps * D and nondeg.max() < 6 * eps * D)
            if ok:
                kept.append(c)
            else:
                dissolved += 1
        clusters = kept

    clusters = sorted((np.asarray(c, dtype=np.int64) for c in clusters), key=lambda c: c[0])
    in_cluster = np.zeros(n, dtype=bool)
    for c in clusters:
        in_cluster[c] = True
    return Decomposition(np.flatnonzero(~in_cluster), clusters, eps, dissolved)


@dataclass
class DecompositionReport:
    """Exact per-vertex / per-cluster counts behind each partition guarantee.

    ``sparse_low_codegree[i]`` counts neighbours w of ``sparse[i]`` with
    ``|N(v) & N(w)| < (1-eps)D``; with ``exact=False`` the count stops just past
    ``eps*D`` (enough to decide the clause) and ``sparse_nonedges`` is skipped.
    """

    sparse: np.ndarray
    sparse_low_codegree: np.ndarray
    sparse_nonedges: np.ndarray | None
    cluster_sizes: list[int]
    cluster_max_external: list[int]
    cluster_max_nondegree: list[int]
    violations_a: list[int] = field(default_factory=list)
    violations_b_size: list[int] = field(default_factory=list)
    violations_b_external: list[tuple[int, int]] = field(default_factory=list)
    violations_b_internal: list[tuple[int, int]] = field(default_factory=list)
    violations_nonedge: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.violations_a or self.violations_b_size or self.violations_b_external
                    or self.violations_b_internal or self.violations_nonedge)

    def to_dict(self, detail: bool = False) -> dict:
        out = {
            "sparse_size": int(len(self.sparse)),
            "clusters": len(self.cluster_sizes),
            "cluster_sizes": self.cluster_sizes,
            "cluster_max_external": self.cluster_max_external,
            "cluster_max_nondegree": self.cluster_max_nondegree,
            "violations": {
                "a": len(self.violations_a),
                "b_size": len(self.violations_b_size),
                "b_external": len(self.violations_b_external),
                "b_internal": len(self.violations_b_internal),
                "nonedge": len(self.violations_nonedge),
            },
        }
        if self.sparse_nonedges is not None and len(self.sparse):
            out["min_sparse_nonedges"] = int(self.sparse_nonedges.min())
        if detail:
            out["violation_lists"] = {
                "a": self.violations_a,
                "b_size": self.violations_b_size,
                "b_external": [list(x) for x in self.violations_b_external],
                "b_internal": [list(x) for x in self.violations_b_internal],
                "nonedge": self.violations_nonedge,
            }
        return out


def verify(g: Graph, d: Decomposition, D: int, eps: float, exact: bool = True) -> DecompositionReport:
    """Recount every partition guarantee for ``d`` on ``g``."""
    n = g.n
    seen = np.zeros(n, dtype=np.int64)
    np.add.at(seen, np.asarray(d.sparse, dtype=np.int64), 1)
    for c in d.clusters:
        if len(c) == 0:
            raise ValueError("empty cluster")
        np.add.at(seen, np.asarray(c, dtype=np.int64), 1)
    if n and not np.all(seen == 1):
        raise ValueError("decomposition is not a partition of the vertex set")

    thr = _ceil((1 - eps) * D)
    sparse = np.asarray(d.sparse, dtype=np.int64)
    cap = -1 if exact else math.floor(eps * D + 1e-9)
    low = K.low_codegree_counts(g.indptr, g.indices, sparse, thr, cap)
    violations_a = [int(v) for v, c in zip(sparse, low) if not c > eps * D]

    nonedges = None
    violations_nonedge: list[int] = []
    if exact:
        nonedges = K.neighbourhood_nonedges(g.indptr, g.indices, sparse)
        bound = eps * eps / 2 * D * D
        violations_nonedge = [int(v) for v, c in zip(sparse, nonedges) if not c > bound]

    lab = d.labels(n)
    sizes, max_ext, max_non = [], [], []
    vb_size, vb_ext, vb_int = [], [], []
    for i, c in enumerate(d.clusters):
        c = np.asarray(c, dtype=np.int64)
        ext, nondeg = _cluster_profile(g, c, lab, i)
        sizes.append(int(len(c)))
        max_ext.append(int(ext.max()))
        max_non.append(int(nondeg.max()))
        if not (1 - eps) * D - 1e-9 <= len(c) <= (1 + 6 * eps) * D + 1e-9:
            vb_size.append(i)
        vb_ext.extend((i, int(v)) for v, e in zip(c, ext) if not e < 7 * eps * D)
        vb_int.extend((i, int(v)) for v, x in zip(c, nondeg) if not x < 6 * eps * D)

    return DecompositionReport(sparse, low, nonedges, sizes, max_ext, max_non,
                               violations_a, vb_size, vb_ext, vb_int, violations_nonedge)
