"""Extending the colouring to almost-cliques: colour ordering, the pairing
process, and matching-based completion."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coloring import PartialColoring, PhaseFailure
from .graph import Graph
from .matching import Bigraph, hall_violator, max_matching
from .palette import ListAssignment

__all__ = [
    "ClusterParams",
    "ClusterState",
    "ProcessOutcome",
    "cluster_params",
    "cluster_state",
    "order_colors",
    "run_pairing_process",
    "build_allowed_bigraph",
    "complete_cluster",
    "color_dense",
]

B_CONST = 7


@dataclass
class ClusterParams:
    zeta: float
    zeta0: float
    small: bool
    eta: float = 0.0
    q: float = 0.0
    K: float = 0.0
    m: int = 0
    b: int = B_CONST
    clamps: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("zeta", "zeta0", "small", "eta", "q", "K", "m", "b", "clamps")}


def cluster_params(zeta: float, eps: float, D: int, k: int, b: int = B_CONST) -> ClusterParams:
    """Concrete process parameters for a cluster of non-edge density ``zeta``.

    ``zeta0 = sqrt(eps)/D``; below it the cluster is small and the process is
    skipped.  Otherwise ``eta`` is the geometric mean of ``max(zeta, 1/D)`` and
    ``zeta/eps`` (capped at ``zeta/(4 eps)``), ``q = 1 - exp(-zeta k / (8 b eps))``,
    ``K = sqrt(q/eta)`` clamped to ``[2, q/(2 eta)]`` and
    ``m = ceil(K eta D / q)`` capped at ``D // 10``.  Every clamp that fires
    is named in ``clamps``.
    """
    if not 0 < eps < 1 or D < 1:
        raise ValueError("need 0 < eps < 1 and D >= 1")
    zeta0 = math.sqrt(eps) / D
    p = ClusterParams(zeta=zeta, zeta0=zeta0, small=zeta < zeta0, b=b)
    if p.small:
        return p
    eta = math.sqrt(max(zeta, 1.0 / D) * zeta / eps)
    if eta > zeta / (4 * eps):
        eta = zeta / (4 * eps)
        p.clamps.append("eta<=zeta/(4eps)")
    q = 1.0 - math.exp(-zeta * k / (8 * b * eps))
    Kc = math.sqrt(q / eta)
    if Kc > q / (2 * eta):
        Kc = q / (2 * eta)
        p.clamps.append("K<=q/(2eta)")
    if Kc < 2:
        Kc = 2.0
        p.clamps.append("K>=2")
    m = math.ceil(Kc * eta * D / q - 1e-9)
    if m > D // 10:
        m = D // 10
        p.clamps.append("m<=D/10")
    p.eta, p.q, p.K, p.m = eta, q, Kc, m
    return p


@dataclass
class ClusterState:
    index: int
    cluster: np.ndarray          # sorted vertex ids
    H: np.ndarray                # |C| x |C| bool, non-edges inside C
    d_H: np.ndarray
    zeta: float
    D: int
    params: ClusterParams

    @property
    def nonedges(self) -> int:
        return int(self.d_H.sum()) // 2

    @property
    def size(self) -> int:
        return len(self.cluster)


def cluster_state(g: Graph, cluster, D: int, eps: float, k: int, index: int = 0) -> ClusterState:
    cluster = np.asarray(cluster, dtype=np.int64)
    H = ~g.induced_adjacency(cluster)
    np.fill_diagonal(H, False)
    d_H = H.sum(axis=1)
    zeta = (int(d_H.sum()) // 2) / float(D * D)
    return ClusterState(index, cluster, H, d_H, zeta, D, cluster_params(zeta, eps, D, k))


def _neighbour_colours(g: Graph, vertices: np.ndarray, sigma: np.ndarray, palette: int) -> np.ndarray:
    """``seen[i, c]``: some neighbour of ``vertices[i]`` has colour c."""
    deg = g.degrees[vertices]
    starts = g.indptr[vertices]
    offs = np.arange(deg.sum()) - np.repeat(np.cumsum(deg) - deg, deg)
    nb = g.indices[np.repeat(starts, deg) + offs]
    rows = np.repeat(np.arange(len(vertices)), deg)
    col = sigma[nb]
    ok = col >= 0
    seen = np.zeros((len(vertices), palette), dtype=bool)
    seen[rows[ok], col[ok]] = True
    return seen


def _in_list(lists: ListAssignment, vertices: np.ndarray) -> np.ndarray:
    m = np.zeros((len(vertices), lists.gamma_size), dtype=bool)
    rows = np.repeat(np.arange(len(vertices)), lists.ell)
    m[rows, lists.order[vertices].ravel()] = True
    return m


def _colours_of(sigma) -> np.ndarray:
    return np.asarray(getattr(sigma, "colors", sigma), dtype=np.int64)


def order_colors(state: ClusterState, g: Graph, sigma, palette: int | None = None) -> np.ndarray:
    """Colours sorted by ``f(c) = sum(zeta D + d_H(v))`` over cluster v seeing c on a neighbour.

    Stable: ties keep ascending colour order.
    """
    palette = palette or state.D + 1
    seen = _neighbour_colours(g, state.cluster, _colours_of(sigma), palette)
    weight = state.zeta * state.D + state.d_H
    f = weight @ seen
    return np.argsort(f, kind="stable")


def colour_weights(state: ClusterState, g: Graph, sigma, palette: int | None = None) -> np.ndarray:
    palette = palette or state.D + 1
    seen = _neighbour_colours(g, state.cluster, _colours_of(sigma), palette)
    return (state.zeta * state.D + state.d_H) @ seen


@dataclass
class ProcessOutcome:
    pairs: list[tuple[int, int]]
    singles: list[int]
    assigned: dict[int, int]
    C_prime: np.ndarray
    Gamma_prime: np.ndarray
    m: int
    s1: bool
    s2: bool
    s3: bool
    empty_steps: list[int] = field(default_factory=list)
    cluster_size: int = 0
    gamma_size: int = 0

    @property
    def succeeded(self) -> bool:
        return self.s2 and self.s3

    def summary(self) -> dict:
        return {"m": self.m, "pairs": len(self.pairs), "singles": len(self.singles),
                "C_prime": int(len(self.C_prime)), "Gamma_prime": int(len(self.Gamma_prime)),
                "s1": self.s1, "s2": self.s2, "s3": self.s3,
                "empty_steps": len(self.empty_steps)}


def passthrough(state: ClusterState, palette: int | None = None) -> ProcessOutcome:
    """Outcome used when the process is skipped: nothing coloured, C' = C, Gamma' = Gamma."""
    palette = palette or state.D + 1
    return ProcessOutcome([], [], {}, state.cluster.copy(), np.arange(palette), 0,
                          True, True, True, cluster_size=state.size, gamma_size=palette)


def run_pairing_process(state: ClusterState, g: Graph, sigma, lists: ListAssignment,
                        ordered: np.ndarray, delta: float = 0.5, adaptive: bool = False,
                        log_n: float | None = None) -> ProcessOutcome:
    """Spend the first colours of ``ordered`` on pairs of non-adjacent cluster vertices.

    For step i with colour c, J is the set of still-uncoloured cluster vertices
    having c in their list and no neighbour coloured c.  If J spans a non-edge,
    the lexicographically smallest one gets c on both ends; otherwise the
    member of J with fewest remaining non-edges (then smallest id) gets c;
    an empty J leaves the step unused and clears ``s2``.  ``sigma`` is updated
    in place.  With ``adaptive`` the loop instead runs until ``eta*D`` pairs
    exist or ``D // 10`` colours are spent.
    """
    colours = _colours_of(sigma)
    p = state.params
    C = state.cluster
    D = state.D
    palette = len(ordered)
    seen = _neighbour_colours(g, C, colours, palette)
    inl = _in_list(lists, C)
    H = state.H.copy()
    alive = np.ones(len(C), dtype=bool)
    pairs: list[tuple[int, int]] = []
    singles: list[int] = []
    assigned: dict[int, int] = {}
    empty_steps: list[int] = []
    target = p.eta * D
    budget = D // 10 if adaptive else p.m
    i = 0
    while i < budget:
        if adaptive and len(pairs) >= target and i > 0:
            break
        c = int(ordered[i])
        i += 1
        J = np.flatnonzero(alive & inl[:, c] & ~seen[:, c])
        if len(J) == 0:
            empty_steps.append(i)
            continue
        sub = np.triu(H[np.ix_(J, J)])
        hit = np.argwhere(sub)
        if len(hit):
            a, b = J[hit[0, 0]], J[hit[0, 1]]
            x, y = int(C[a]), int(C[b])
            pairs.append((x, y))
            for idx, v in ((a, x), (b, y)):
                assigned[v] = c
                colours[v] = c
                alive[idx] = False
                H[idx, :] = False
                H[:, idx] = False
        else:
            dH = H[J].sum(axis=1)
            a = J[int(np.argmin(dH))]
            z = int(C[a])
            singles.append(z)
            assigned[z] = c
            colours[z] = c
            alive[a] = False
            H[a, :] = False
            H[:, a] = False
    m = i
    # accounting: every step spends one colour and removes the vertices it coloured
    assert len(C) - int(alive.sum()) == 2 * len(pairs) + len(singles)
    assert m <= D // 10 or (not adaptive and m == p.m)
    ln_n = log_n if log_n is not None else math.log(max(g.n, 2))
    used = ordered[:max(m - 1, 0)]
    s1 = bool(inl[:, used].sum(axis=1).max() <= 0.1 * delta * ln_n) if len(used) else True
    s2 = not empty_steps
    s3 = len(pairs) >= target
    return ProcessOutcome(pairs, singles, assigned, C[alive], np.asarray(ordered[m:]), m,
                          s1, s2, s3, empty_steps, cluster_size=len(C), gamma_size=palette)


def build_allowed_bigraph(C_prime: np.ndarray, Gamma_prime: np.ndarray, g: Graph, sigma,
                          lists: ListAssignment, cluster: np.ndarray | None = None) -> Bigraph:
    """Bigraph joining v in C' to the position of c in Gamma' when c is in L_v and unused around v.

    With ``cluster`` given, also checks that the colours of Gamma' blocked at
    v number at most v's degree out of the cluster.
    """
    colours = _colours_of(sigma)
    C_prime = np.asarray(C_prime, dtype=np.int64)
    Gamma_prime = np.asarray(Gamma_prime, dtype=np.int64)
    palette = lists.gamma_size
    seen = _neighbour_colours(g, C_prime, colours, palette)[:, Gamma_prime]
    inl = _in_list(lists, C_prime)[:, Gamma_prime]
    if cluster is not None and len(C_prime):
        inside = np.zeros(g.n, dtype=bool)
        inside[np.asarray(cluster)] = True
        deg = g.degrees[C_prime]
        offs = np.arange(deg.sum()) - np.repeat(np.cumsum(deg) - deg, deg)
        nb = g.indices[np.repeat(g.indptr[C_prime], deg) + offs]
        rows = np.repeat(np.arange(len(C_prime)), deg)
        external = np.bincount(rows[~inside[nb]], minlength=len(C_prime))
        assert np.all(seen.sum(axis=1) <= external), "blocked colours exceed external degree"
    allowed = inl & ~seen
    return Bigraph(len(C_prime), len(Gamma_prime), [np.flatnonzero(r).tolist() for r in allowed])


def complete_cluster(state: ClusterState, outcome: ProcessOutcome, g: Graph, sigma,
                     lists: ListAssignment) -> dict[int, int]:
    """Colour C' by an X-perfect matching into Gamma', or raise :class:`PhaseFailure`.

    A failure carries a Hall violator.  It is attributed to the process when
    the process did not succeed, to colour coverage when the usable colours
    of C' are fewer than |C'|, and to the matching otherwise.
    """
    C_prime, Gamma_prime = outcome.C_prime, outcome.Gamma_prime
    if len(C_prime) == 0:
        return {}
    b = build_allowed_bigraph(C_prime, Gamma_prime, g, sigma, lists, cluster=state.cluster)
    res = max_matching(b)
    if res.saturates_X:
        return {int(C_prime[x]): int(Gamma_prime[y]) for x, y in res.pairs.items()}
    witness = [int(C_prime[x]) for x in hall_violator(b, res)]
    covered = len({y for row in b.adj for y in row})
    if not outcome.succeeded:
        phase, reason = "dense-process", "process-failed-and-no-perfect-matching"
    elif covered < len(C_prime):
        phase, reason = "coverage", "usable-colours-fewer-than-vertices"
    else:
        phase, reason = "dense-matching", "no-perfect-matching"
    raise PhaseFailure(phase, reason, cluster=state.index, deficiency=res.deficiency,
                       witness=witness)


def color_dense(g: Graph, decomposition, lists: ListAssignment, sigma: PartialColoring,
                D: int, eps: float, delta: float, adaptive: bool = False,
                log_n: float | None = None, on_cluster=None) -> list[dict]:
    """Extend ``sigma`` (in place) to every cluster in order; returns per-cluster diagnostics.

    ``on_cluster(state, outcome)`` is called after each cluster's process step.
    Raises :class:`PhaseFailure` at the first cluster that cannot be completed,
    with the diagnostics so far attached as ``exc.clusters``.
    """
    diags: list[dict] = []
    k = lists.ell
    palette = D + 1
    for i, cluster in enumerate(decomposition.clusters):
        state = cluster_state(g, cluster, D, eps, k, index=i)
        if state.params.small or state.params.m == 0:
            outcome = passthrough(state, palette)
        else:
            ordered = order_colors(state, g, sigma, palette)
            outcome = run_pairing_process(state, g, sigma, lists, ordered, delta,
                                          adaptive=adaptive, log_n=log_n)
        if on_cluster is not None:
            on_cluster(state, outcome)
        info = {"cluster": i, "size": state.size, "zeta": state.zeta,
                "params": state.params.to_dict(), "process": outcome.summary()}
        diags.append(info)
        try:
            extra = complete_cluster(state, outcome, g, sigma, lists)
        except PhaseFailure as exc:
            info["deficiency"] = exc.deficiency
            exc.clusters = diags
            raise
        info["deficiency"] = 0
        for v, c in extra.items():
            sigma[v] = c
    return diags
