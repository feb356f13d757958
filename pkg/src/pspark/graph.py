"""Simple undirected graphs in CSR form, generators, and D-regular embedding."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from . import _kernels as K

__all__ = [
    "Graph",
    "GeneratorSpec",
    "GENERATOR_KINDS",
    "build_graph",
    "generate",
    "regularize",
    "read_edge_list",
    "write_edge_list",
]


class Graph:
    """Immutable simple graph on vertices ``0..n-1``.

    Adjacency is stored as CSR arrays: the neighbours of ``v`` are
    ``indices[indptr[v]:indptr[v + 1]]``, sorted ascending.
    """

    __slots__ = ("n", "indptr", "indices", "degrees", "D_max")

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray):
        self.n = int(n)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int32)
        self.indptr.flags.writeable = False
        self.indices.flags.writeable = False
        self.degrees = np.diff(self.indptr)
        self.degrees.flags.writeable = False
        self.D_max = int(self.degrees.max()) if self.n else 0

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.degrees[v])

    @property
    def num_edges(self) -> int:
        return int(self.indptr[-1]) // 2

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.neighbors(u)
        i = np.searchsorted(nbrs, v)
        return bool(i < len(nbrs) and nbrs[i] == v)

    def edge_array(self) -> np.ndarray:
        """Edges as an ``(m, 2)`` array with ``u < v``, lexicographically sorted."""
        rows = np.repeat(np.arange(self.n, dtype=np.int32), self.degrees)
        keep = rows < self.indices
        return np.column_stack([rows[keep], self.indices[keep]])

    def edges(self) -> Iterable[tuple[int, int]]:
        for u, v in self.edge_array():
            yield int(u), int(v)

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=bool)
        e = self.edge_array()
        a[e[:, 0], e[:, 1]] = True
        a[e[:, 1], e[:, 0]] = True
        return a

    def induced_adjacency(self, vertices: np.ndarray) -> np.ndarray:
        """Dense boolean adjacency matrix of the subgraph induced on ``vertices``."""
        vertices = np.asarray(vertices, dtype=np.int64)
        pos = np.full(self.n, -1, dtype=np.int64)
        pos[vertices] = np.arange(len(vertices))
        a = np.zeros((len(vertices), len(vertices)), dtype=bool)
        deg = self.degrees[vertices]
        starts = self.indptr[vertices]
        rows = np.repeat(np.arange(len(vertices)), deg)
        offs = np.arange(deg.sum()) - np.repeat(np.cumsum(deg) - deg, deg)
        cols = pos[self.indices[np.repeat(starts, deg) + offs]]
        hit = cols >= 0
        a[rows[hit], cols[hit]] = True
        return a

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    def __hash__(self):
        return hash((self.n, self.indices.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges}, D_max={self.D_max})"


def build_graph(n: int, edges) -> Graph:
    """Build a simple graph; duplicate edges (in either orientation) are merged."""
    if n < 0:
        raise ValueError("vertex count must be non-negative")
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if len(e) and (e.min() < 0 or e.max() >= n):
        raise ValueError(f"edge endpoint out of range [0, {n})")
    if np.any(e[:, 0] == e[:, 1]):
        bad = e[e[:, 0] == e[:, 1]][0]
        raise ValueError(f"loop edge at vertex {int(bad[0])}")
    if n == 0:
        return Graph(0, np.zeros(1, dtype=np.int64), np.zeros(0, dtype=np.int32))
    indptr, indices = K.csr_from_edges(n, e[:, 0], e[:, 1])
    return Graph(n, indptr, indices)


# --------------------------------------------------------------------------- I/O

def read_edge_list(path) -> Graph:
    """Read the ``n m`` header + ``u v`` lines format ('#' starts a comment)."""
    tokens: list[list[str]] = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            tokens.append(line.split())
    if not tokens:
        raise ValueError(f"{path}: empty edge-list file")
    n, m = (int(x) for x in tokens[0][:2])
    body = tokens[1:]
    if len(body) != m:
        raise ValueError(f"{path}: header announces {m} edges, found {len(body)}")
    edges = [(int(a), int(b)) for a, b, *_ in body]
    return build_graph(n, edges)


def write_edge_list(g: Graph, path) -> None:
    e = g.edge_array()
    lines = [f"{g.n} {len(e)}"] + [f"{u} {v}" for u, v in e]
    Path(path).write_text("\n".join(lines) + "\n")


# --------------------------------------------------------------------- generators

GENERATOR_KINDS = (
    "complete",
    "disjoint-cliques",
    "random-regular",
    "erdos-renyi",
    "star-union",
    "matching-plus-clique",
    "cliques-plus-sparse",
    "file",
)

_REQUIRED = {
    "complete": ("m",),
    "disjoint-cliques": ("copies", "size"),
    "random-regular": ("n", "D"),
    "erdos-renyi": ("n", "p"),
    "star-union": ("D", "stars", "leaves"),
    "matching-plus-clique": ("D", "pairs"),
    "cliques-plus-sparse": ("D", "cliques", "half", "cross"),
    "file": ("path",),
}


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        missing = [k for k in _REQUIRED[self.kind] if k not in self.params]
        if missing:
            raise ValueError(f"{self.kind}: missing parameters {missing}")
        _validate(self.kind, self.params)

    def __hash__(self):
        return hash((self.kind, tuple(sorted(self.params.items())), self.seed))

    def label(self) -> str:
        args = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.kind}:{args}"


def _validate(kind: str, p: dict) -> None:
    def nonneg(*names):
        for name in names:
            if int(p[name]) < 0:
                raise ValueError(f"{kind}: {name} must be non-negative")

    if kind == "complete":
        nonneg("m")
    elif kind == "disjoint-cliques":
        nonneg("copies", "size")
    elif kind == "random-regular":
        n, D = int(p["n"]), int(p["D"])
        if not 0 <= D < max(n, 1):
            raise ValueError("random-regular: need 0 <= D < n")
        if (n * D) % 2:
            raise ValueError("random-regular: n*D must be even")
    elif kind == "erdos-renyi":
        nonneg("n")
        if not 0.0 <= float(p["p"]) <= 1.0:
            raise ValueError("erdos-renyi: p must lie in [0, 1]")
    elif kind == "star-union":
        D, stars, leaves = int(p["D"]), int(p["stars"]), int(p["leaves"])
        nonneg("D", "stars", "leaves")
        if stars * (leaves + 1) > D + 1:
            raise ValueError("star-union: stars do not fit inside a (D+1)-clique")
    elif kind == "matching-plus-clique":
        D, pairs = int(p["D"]), int(p["pairs"])
        nonneg("D", "pairs")
        if 2 * pairs > D + 1:
            raise ValueError("matching-plus-clique: matching does not fit inside a (D+1)-clique")
    elif kind == "cliques-plus-sparse":
        D, half, cross = int(p["D"]), int(p["half"]), int(p["cross"])
        nonneg("D", "cliques", "half", "cross")
        if half < D:
            raise ValueError("cliques-plus-sparse: half must be >= D")
        if 2 * half < int(p["cliques"]) * (D + 1):
            raise ValueError("cliques-plus-sparse: sparse part too small to absorb cross edges")


def generate(spec: GeneratorSpec) -> Graph:
    """Build the graph described by ``spec``; a pure function of ``spec``."""
    p = spec.params
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed))
    kind = spec.kind
    if kind == "complete":
        return _complete(int(p["m"]))
    if kind == "disjoint-cliques":
        return _disjoint_cliques(int(p["copies"]), int(p["size"]))
    if kind == "random-regular":
        return random_regular(int(p["n"]), int(p["D"]), rng)
    if kind == "erdos-renyi":
        return _erdos_renyi(int(p["n"]), float(p["p"]), rng)
    if kind == "star-union":
        return _clique_minus(int(p["D"]), _star_nonedges(int(p["stars"]), int(p["leaves"])))
    if kind == "matching-plus-clique":
        pairs = int(p["pairs"])
        nonedges = np.column_stack([np.arange(0, 2 * pairs, 2), np.arange(1, 2 * pairs, 2)])
        return _clique_minus(int(p["D"]), nonedges)
    if kind == "cliques-plus-sparse":
        return _cliques_plus_sparse(int(p["D"]), int(p["cliques"]), int(p["half"]),
                                    int(p["cross"]), rng)
    return read_edge_list(p["path"])


def _complete(m: int) -> Graph:
    iu = np.triu_indices(m, 1)
    return build_graph(m, np.column_stack(iu))


def _disjoint_cliques(copies: int, size: int) -> Graph:
    iu = np.column_stack(np.triu_indices(size, 1))
    edges = np.concatenate([iu + c * size for c in range(copies)]) if copies else iu[:0]
    return build_graph(copies * size, edges)


def _erdos_renyi(n: int, p: float, rng: np.random.Generator) -> Graph:
    iu = np.column_stack(np.triu_indices(n, 1))
    keep = rng.random(len(iu)) < p
    return build_graph(n, iu[keep])


def _star_nonedges(stars: int, leaves: int) -> np.ndarray:
    out = []
    for s in range(stars):
        centre = s * (leaves + 1)
        out.extend((centre, centre + 1 + j) for j in range(leaves))
    return np.array(out, dtype=np.int64).reshape(-1, 2)


def _clique_minus(D: int, nonedges: np.ndarray) -> Graph:
    """(D+1)-clique with ``nonedges`` deleted, padded out to a D-regular graph.

    Vertices ``0..D`` are the clique; deficient clique vertices get their
    missing degree from pad vertices appended after it.
    """
    size = D + 1
    a = np.ones((size, size), dtype=bool)
    np.fill_diagonal(a, False)
    if len(nonedges):
        a[nonedges[:, 0], nonedges[:, 1]] = False
        a[nonedges[:, 1], nonedges[:, 0]] = False
    core = build_graph(size, np.column_stack(np.nonzero(np.triu(a))))
    return regularize(core, D, saturate=False)


def random_bipartite_regular(half: int, D: int, rng: np.random.Generator,
                             offset: int = 0) -> np.ndarray:
    """Edges of a random D-regular bipartite graph on ``2*half`` vertices (triangle-free).

    A bipartite pairing of left and right stubs, with repeated pairs repaired
    by side-preserving double-edge swaps.
    """
    if D == half:
        i = np.repeat(np.arange(half), D)
        return np.column_stack([i, np.tile(np.arange(half), half) + half]) + offset
    u = np.repeat(np.arange(half, dtype=np.int64), D)
    v = np.repeat(np.arange(half, 2 * half, dtype=np.int64), D)
    rng.shuffle(v)
    left = K.repair_pairing(2 * half, D, u, v, int(rng.integers(0, 2**31 - 1)), 200 * len(u) + 1000,
                            True)
    if left:
        raise RuntimeError("bipartite pairing repair did not converge")
    return np.column_stack([u, v]) + offset


def _cliques_plus_sparse(D: int, cliques: int, half: int, cross: int,
                         rng: np.random.Generator) -> Graph:
    """``cliques`` disjoint K_{D+1}'s plus a triangle-free D-regular bipartite part.

    Each of ``cross`` rounds deletes a random near-perfect matching inside every
    clique and an equally large matching inside the sparse part, then joins the
    freed endpoints across.  The result stays D-regular and every vertex gains
    at most one cross edge per round.
    """
    size = D + 1
    n_clique = cliques * size
    sparse_edges = random_bipartite_regular(half, D, rng, offset=n_clique)
    edges = {tuple(e) for c in range(cliques)
             for e in (np.column_stack(np.triu_indices(size, 1)) + c * size).tolist()}
    sparse = [tuple(e) for e in sparse_edges.tolist()]
    edges.update(sparse)
    for _ in range(cross):
        pairs = []
        for c in range(cliques):
            perm = rng.permutation(size) + c * size
            for a1, a2 in zip(perm[0::2].tolist(), perm[1::2].tolist()):
                key = (min(a1, a2), max(a1, a2))
                if key in edges:
                    pairs.append(key)
        used: set[int] = set()
        matching = []
        for idx in rng.permutation(len(sparse)).tolist():
            if len(matching) == len(pairs):
                break
            b1, b2 = sparse[idx]
            if b1 not in used and b2 not in used and (b1, b2) in edges:
                used.update((b1, b2))
                matching.append((b1, b2))
        for (a1, a2), (b1, b2) in zip(pairs, matching):
            for x, y in (((a1, b1), (a2, b2)), ((a1, b2), (a2, b1))):
                if x not in edges and y not in edges:
                    edges.difference_update({(a1, a2), (b1, b2)})
                    edges.update({x, y})
                    break
    return build_graph(n_clique + 2 * half, sorted(edges))


def random_regular(n: int, D: int, rng: np.random.Generator,
                   restart_limit: int = 5) -> Graph:
    """Random D-regular simple graph by the pairing (configuration) model.

    For small D the pairing is redrawn from scratch until it is simple.  When
    the chance of a simple pairing is negligible, loops and repeated pairs are
    instead repaired by random double-edge swaps.
    """
    if (n * D) % 2 or not 0 <= D < max(n, 1):
        raise ValueError("random-regular: need n*D even and 0 <= D < n")
    if D == 0 or n == 0:
        return build_graph(n, [])
    stubs = np.repeat(np.arange(n, dtype=np.int32), D)
    # P(simple pairing) ~ exp(-(D^2 - 1)/4)
    if (D * D - 1) / 4 <= restart_limit:
        while True:
            rng.shuffle(stubs)
            u, v = stubs[0::2], stubs[1::2]
            if np.any(u == v):
                continue
            lo, hi = np.minimum(u, v).astype(np.int64), np.maximum(u, v)
            keys = lo * n + hi
            if len(np.unique(keys)) == len(keys):
                return build_graph(n, np.column_stack([u, v]))
    rng.shuffle(stubs)
    wide = np.int64 if n * D >= 2**31 else np.int32
    u = stubs[0::2].astype(wide)
    v = stubs[1::2].astype(wide)
    del stubs
    seed = int(rng.integers(0, 2**31 - 1))
    left = K.repair_pairing(n, D, u, v, seed, 200 * len(u))
    if left:
        raise RuntimeError("random-regular: edge-swap repair did not converge")
    # the repaired pairing is simple, so skip build_graph's validation copies
    indptr, indices = K.csr_from_edges(n, u, v)
    return Graph(n, indptr, indices)


# ------------------------------------------------------------------ regularization

def _havel_hakimi(targets: list[int]) -> list[tuple[int, int]]:
    """Realize a graphic degree sequence; ties broken by highest index first."""
    remaining = list(targets)
    edges: list[tuple[int, int]] = []
    while True:
        order = sorted(range(len(remaining)), key=lambda i: (remaining[i], i), reverse=True)
        top = order[0]
        k = remaining[top]
        if k == 0:
            return edges
        if k > len(order) - 1:
            raise ValueError("degree sequence is not graphic")
        remaining[top] = 0
        for j in order[1:k + 1]:
            if remaining[j] == 0:
                raise ValueError("degree sequence is not graphic")
            remaining[j] -= 1
            edges.append((top, j))


def regularize(g: Graph, D: int, saturate: bool = True) -> Graph:
    """Embed ``g`` (max degree <= D) in a D-regular simple graph on <= n+D+2 vertices.

    Original vertices keep their ids; padding vertices are appended.  With
    ``saturate`` (the default) non-edges between deficient vertices are first
    filled in, lowest pair first, so that the deficient set is a clique.
    ``saturate=False`` keeps ``g`` induced on its vertex set when the padding
    can absorb the total deficiency, and falls back to saturation otherwise.
    """
    if D < 0:
        raise ValueError("D must be non-negative")
    if g.D_max > D:
        raise ValueError(f"max degree {g.D_max} exceeds D={D}")
    deg = g.degrees.astype(np.int64).copy()
    if g.n == 0 or np.all(deg == D):
        return g
    n = g.n
    x_size = D + 1 if (D + 1) % 2 == n % 2 else D + 2
    if not saturate and int((D - deg).sum()) > x_size * D:
        saturate = True

    added: list[tuple[int, int]] = []
    if saturate:
        deficient = [int(v) for v in np.flatnonzero(deg < D)]
        adj = {v: set(g.neighbors(v).tolist()) for v in deficient}
        for i, a in enumerate(deficient):
            for b in deficient[i + 1:]:
                if deg[a] >= D:
                    break
                if deg[b] < D and b not in adj[a]:
                    adj[a].add(b)
                    adj[b].add(a)
                    deg[a] += 1
                    deg[b] += 1
                    added.append((a, b))

    W = [int(v) for v in np.flatnonzero(deg < D)]
    if not W:
        return build_graph(n, np.concatenate([g.edge_array(), np.array(added).reshape(-1, 2)]))

    # K: round-robin the deficiencies of W over X, so X-degrees differ by <= 1
    k_edges: list[tuple[int, int]] = []
    dK = [0] * x_size
    ptr = 0
    for w in W:
        for _ in range(D - int(deg[w])):
            k_edges.append((w, n + ptr))
            dK[ptr] += 1
            ptr = (ptr + 1) % x_size
    f_edges = [(n + a, n + b) for a, b in _havel_hakimi([D - d for d in dK])]

    parts = [g.edge_array(), np.array(added, dtype=np.int64).reshape(-1, 2),
             np.array(k_edges, dtype=np.int64).reshape(-1, 2),
             np.array(f_edges, dtype=np.int64).reshape(-1, 2)]
    out = build_graph(n + x_size, np.concatenate(parts))
    assert out.D_max == D and np.all(out.degrees == D)
    return out
