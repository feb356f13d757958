"""Partial colourings, the list-colouring check, and phase failures."""

from __future__ import annotations

import numpy as np

from . import _kernels as K
from .graph import Graph
from .palette import ListAssignment

__all__ = ["PartialColoring", "PhaseFailure", "verify_coloring", "PHASES"]

PHASES = ("coverage", "sparse", "dense-process", "dense-matching")


class PhaseFailure(Exception):
    """A pipeline phase could not extend the colouring.

    ``phase`` is one of ``PHASES``; the remaining attributes say where it got
    stuck (a vertex for the sparse phase, a cluster plus Hall witness for the
    dense phase).
    """

    def __init__(self, phase: str, reason: str, vertex: int | None = None,
                 cluster: int | None = None, deficiency: int = 0,
                 witness: list[int] | None = None):
        if phase not in PHASES:
            raise ValueError(f"unknown phase {phase!r}")
        self.phase = phase
        self.reason = reason
        self.vertex = vertex
        self.cluster = cluster
        self.deficiency = deficiency
        self.witness = witness
        where = f"vertex {vertex}" if vertex is not None else f"cluster {cluster}"
        super().__init__(f"{phase}: {reason} at {where}")

    def to_dict(self) -> dict:
        return {"phase": self.phase, "reason": self.reason, "vertex": self.vertex,
                "cluster": self.cluster, "deficiency": self.deficiency,
                "witness": self.witness}


class PartialColoring:
    """Vertex colours with -1 for uncoloured vertices."""

    def __init__(self, n: int, colors: np.ndarray | None = None):
        if colors is None:
            colors = np.full(n, -1, dtype=np.int64)
        self.colors = np.asarray(colors, dtype=np.int64)
        if len(self.colors) != n:
            raise ValueError("colour array length must equal the vertex count")

    @property
    def n(self) -> int:
        return len(self.colors)

    def __getitem__(self, v: int) -> int:
        return int(self.colors[v])

    def __setitem__(self, v: int, c: int) -> None:
        self.colors[v] = c

    def coloured(self) -> np.ndarray:
        return np.flatnonzero(self.colors >= 0)

    def allowed(self, g: Graph, v: int, c: int) -> bool:
        """True when no neighbour of ``v`` currently has colour ``c``."""
        return not np.any(self.colors[g.neighbors(v)] == c)

    def is_proper(self, g: Graph) -> bool:
        """No edge has both ends coloured alike (uncoloured vertices are ignored)."""
        e = g.edge_array()
        a, b = self.colors[e[:, 0]], self.colors[e[:, 1]]
        return not np.any((a == b) & (a >= 0))

    def respects(self, lists: ListAssignment) -> bool:
        idx = self.coloured()
        return bool(np.all(np.any(lists.order[idx] == self.colors[idx, None], axis=1)))

    def copy(self) -> "PartialColoring":
        return PartialColoring(self.n, self.colors.copy())


def verify_coloring(g: Graph, lists: ListAssignment | None, sigma) -> bool:
    """True iff ``sigma`` colours every vertex, properly, from its own list."""
    colors = np.asarray(getattr(sigma, "colors", sigma), dtype=np.int64)
    if len(colors) != g.n:
        return False
    if g.n == 0:
        return True
    if K.proper_violation(g.indptr, g.indices, colors) >= 0:
        return False
    if lists is None:
        return True
    order = lists.order[:g.n]
    return bool(np.all(np.any(order == colors[:, None], axis=1)))
