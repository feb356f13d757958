"""Colouring the sparse part: tentative colours, residual lists, bad vertices,
colour-degree pruning and randomized greedy completion."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .coloring import PartialColoring, PhaseFailure
from .decomposition import Decomposition
from .graph import Graph
from .palette import SPARSE, ListAssignment, RngStream

__all__ = [
    "TentativeOutcome",
    "SparseDiagnostics",
    "theta_prime",
    "tentative_color",
    "residual_lists",
    "compute_bad_vertices",
    "prune_color_degrees",
    "color_sparse",
]

E_INV = math.exp(-1.0)


def theta_prime(eps: float) -> float:
    """Duplication margin 0.5 * (eps^2 / 2) * e^-3."""
    return 0.5 * (eps * eps / 2.0) * math.exp(-3.0)


@dataclass
class TentativeOutcome:
    tau: np.ndarray
    retained: np.ndarray   # bool mask of T
    sigma: np.ndarray      # tau on T, -1 elsewhere

    @property
    def T(self) -> np.ndarray:
        return np.flatnonzero(self.retained)


@dataclass
class SparseDiagnostics:
    sparse_size: int = 0
    retained_sparse: int = 0
    retained_neighbours: np.ndarray | None = None    # |T ∩ N_v| for v in V*
    surplus: np.ndarray | None = None                # |T ∩ N_v| - |sigma(T ∩ N_v)|
    bad: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    pruned: np.ndarray | None = None                 # colours pruned per V'' vertex
    min_residual: int | None = None
    restarts: int = 0
    attempts: int = 0

    def to_dict(self) -> dict:
        def stat(a):
            if a is None or len(a) == 0:
                return None
            return {"mean": float(np.mean(a)), "min": int(np.min(a)), "max": int(np.max(a))}
        return {
            "sparse_size": self.sparse_size,
            "retained_sparse": self.retained_sparse,
            "retained_neighbours": stat(self.retained_neighbours),
            "surplus": stat(self.surplus),
            "bad": int(len(self.bad)),
            "pruned": stat(self.pruned),
            "min_residual": self.min_residual,
            "restarts": self.restarts,
            "attempts": self.attempts,
        }


def _sparse_mask(g: Graph, sparse) -> np.ndarray:
    if sparse is None:
        return np.ones(g.n, dtype=bool)
    if isinstance(sparse, Decomposition):
        return sparse.sparse_mask(g.n)
    sparse = np.asarray(sparse)
    if sparse.dtype == bool:
        return sparse
    m = np.zeros(g.n, dtype=bool)
    m[sparse] = True
    return m


def tentative_color(g: Graph, lists: ListAssignment, tau: np.ndarray | None = None) -> TentativeOutcome:
    """Give every vertex its tentative colour and keep it where no neighbour clashes.

    ``tau`` defaults to the first drawn colour of each list.
    """
    if lists.ell == 0:
        raise ValueError("tentative colouring needs non-empty lists")
    tau = lists.tau if tau is None else np.asarray(tau)
    tau = np.ascontiguousarray(tau[:g.n], dtype=np.int64)
    retained = K.retained_mask(g.indptr, g.indices, tau)
    sigma = np.where(retained, tau, -1)
    return TentativeOutcome(tau, retained, sigma)


def _rest(lists: ListAssignment, tau: np.ndarray, n: int) -> np.ndarray:
    """L_v minus tau_v, one row per vertex."""
    order = lists.order[:n].astype(np.int64)
    keep = order != tau[:, None]
    if not np.all(keep.sum(axis=1) == order.shape[1] - 1):
        raise ValueError("tentative colour must belong to the vertex's list")
    return np.ascontiguousarray(order[keep].reshape(n, order.shape[1] - 1))


def _kept_sigma(outcome: TentativeOutcome, mask: np.ndarray) -> np.ndarray:
    # tentative colours survive only on sparse vertices
    return np.ascontiguousarray(np.where(mask, outcome.sigma, -1))


def residual_lists(g: Graph, outcome: TentativeOutcome, lists: ListAssignment,
                   sparse=None) -> np.ndarray:
    """``(L_v - {tau_v}) - sigma(T ∩ N_v)`` for every uncoloured sparse vertex.

    Returned as an ``(n, ell-1)`` array padded with -1; rows of other vertices
    are all -1.
    """
    mask = _sparse_mask(g, sparse)
    rest = _rest(lists, outcome.tau, g.n)
    targets = np.flatnonzero(mask & ~outcome.retained)
    alive = K.unblocked_mask(g.indptr, g.indices, rest, _kept_sigma(outcome, mask),
                             targets, lists.gamma_size)
    return np.where(alive, rest, -1)


def compute_bad_vertices(g: Graph, outcome: TentativeOutcome, lists: ListAssignment,
                         t: int, theta_prime: float, sparse=None) -> np.ndarray:
    """Uncoloured sparse v with ``|L'_v ∩ sigma(T ∩ N_v)| > (e^-1 - theta' + theta'/3) t``."""
    if t > lists.ell:
        raise ValueError("t cannot exceed the list size")
    mask = _sparse_mask(g, sparse)
    residual = residual_lists(g, outcome, lists, mask)
    m_v = (lists.ell - 1) - (residual >= 0).sum(axis=1)
    threshold = (E_INV - theta_prime + theta_prime / 3.0) * t
    cand = mask & ~outcome.retained
    return np.flatnonzero(cand & (m_v > threshold))


def prune_color_degrees(g: Graph, outcome: TentativeOutcome, lists: ListAssignment,
                        bad: np.ndarray, t: int, sigma_fraction: float, sparse=None,
                        residual: np.ndarray | None = None) -> np.ndarray:
    """Drop from each residual list every colour whose colour degree exceeds ``(1 - e^-1 + s) t``.

    The colour degree of ``c`` at ``v`` counts neighbours ``w`` in the sparse
    part, outside ``T`` and the bad set, with ``c`` in ``L_w - {tau_w}``.
    Rows outside that set (including bad vertices) come back unchanged.
    """
    mask = _sparse_mask(g, sparse)
    if residual is None:
        residual = residual_lists(g, outcome, lists, mask)
    rest = _rest(lists, outcome.tau, g.n)
    competitors = mask & ~outcome.retained
    competitors[np.asarray(bad, dtype=np.int64)] = False
    targets = np.flatnonzero(competitors)
    alive = residual >= 0
    deg = K.colour_degrees(g.indptr, g.indices, rest, alive, competitors, targets,
                           lists.gamma_size)
    drop = alive & (deg > (1.0 - E_INV + sigma_fraction) * t)
    return np.where(drop, -1, residual)


def color_sparse(g: Graph, decomposition, lists: ListAssignment, rng,
                 retries: int = 20, restarts: int = 3, paper_faithful: bool = True,
                 eps: float | None = None,
                 dynamic: bool = True) -> tuple[PartialColoring, SparseDiagnostics]:
    """Properly list-colour the sparse part, or raise :class:`PhaseFailure`.

    The tentative colouring is kept on sparse vertices; bad vertices are then
    coloured greedily in random order, each taking a uniformly random colour
    from its residual list that no coloured neighbour uses.  The rest follow,
    from their pruned lists, always picking a vertex with fewest allowed
    colours left (``dynamic=False``: uniformly random order instead).  A stuck
    greedy pass is retried ``retries``
    times; after that the tentative colours are redrawn (a uniform member of
    each list) up to ``restarts`` times.
    """
    n = g.n
    mask = _sparse_mask(g, decomposition)
    eps = eps if eps is not None else getattr(decomposition, "epsilon", 0.05)
    gen = rng.generator(SPARSE) if isinstance(rng, RngStream) else rng
    diag = SparseDiagnostics(sparse_size=int(mask.sum()))
    sparse_idx = np.flatnonzero(mask)
    if len(sparse_idx) == 0:
        return PartialColoring(n), diag
    if lists.ell == 0:
        raise PhaseFailure("sparse", "empty-residual-list", vertex=int(sparse_idx[0]))

    t = lists.ell - 1
    tp = theta_prime(eps)
    last: PhaseFailure | None = None
    for restart in range(restarts + 1):
        diag.restarts = restart
        if restart == 0:
            tau = None
        else:
            pick = gen.integers(0, lists.ell, size=n)
            tau = lists.order[np.arange(n), pick]
        outcome = tentative_color(g, lists, tau)
        sigma0 = _kept_sigma(outcome, mask)
        uncoloured = mask & ~outcome.retained
        residual = residual_lists(g, outcome, lists, mask)
        sizes = (residual >= 0).sum(axis=1)
        cnt, dist = K.retained_neighbour_stats(g.indptr, g.indices, outcome.tau,
                                               outcome.retained, sparse_idx, lists.gamma_size)
        diag.retained_neighbours, diag.surplus = cnt, cnt - dist
        diag.retained_sparse = int((mask & outcome.retained).sum())
        diag.min_residual = int(sizes[uncoloured].min()) if uncoloured.any() else None
        empty = np.flatnonzero(uncoloured & (sizes == 0))
        if len(empty):
            last = PhaseFailure("sparse", "empty-residual-list", vertex=int(empty[0]))
            continue

        if paper_faithful:
            bad = compute_bad_vertices(g, outcome, lists, t, tp, mask)
            palette = prune_color_degrees(g, outcome, lists, bad, t, tp / 3.0, mask, residual)
        else:
            bad = np.zeros(0, dtype=np.int64)
            palette = residual
        diag.bad = bad
        rest_v = np.setdiff1d(np.flatnonzero(uncoloured), bad)
        diag.pruned = ((residual[rest_v] >= 0).sum(axis=1)
                       - (palette[rest_v] >= 0).sum(axis=1))
        alive = palette >= 0
        colours = np.where(alive, palette, 0)
        # an emptied list cannot be coloured by any greedy pass: redraw tau instead
        dead = rest_v[~alive[rest_v].any(axis=1)]
        if len(dead):
            last = PhaseFailure("sparse", "empty-pruned-list", vertex=int(dead[0]))
            continue

        for attempt in range(retries + 1):
            diag.attempts += 1
            sigma = sigma0.copy()
            first = gen.permutation(bad).astype(np.int64)
            seq = gen.permutation(rest_v).astype(np.int64)
            stuck = K.greedy_list_colour(g.indptr, g.indices, first, colours, alive, sigma,
                                         gen.random(len(first)), lists.gamma_size)
            if stuck >= 0:
                last = PhaseFailure("sparse", "greedy-stuck-after-retries",
                                    vertex=int(first[stuck]))
                continue
            colour_rest = K.dynamic_list_colour if dynamic else K.greedy_list_colour
            stuck = colour_rest(g.indptr, g.indices, seq, colours, alive, sigma,
                                gen.random(len(seq)), lists.gamma_size)
            if stuck < 0:
                return PartialColoring(n, sigma), diag
            last = PhaseFailure("sparse", "greedy-stuck-after-retries", vertex=int(seq[stuck]))
    assert last is not None
    last.diagnostics = diag
    raise last
