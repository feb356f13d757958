"""Exact ground truth at desk scale."""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .graph import Graph
from .palette import ListAssignment

__all__ = ["OracleVerdict", "exact_list_colorable", "coverage_probability"]


@dataclass
class OracleVerdict:
    colorable: bool
    witness: np.ndarray | None
    nodes_explored: int


def _as_sets(lists, n: int) -> list[set[int]]:
    if isinstance(lists, ListAssignment):
        return [set(lists.order[v].tolist()) for v in range(n)]
    return [set(int(c) for c in lists[v]) for v in range(n)]


def _greedy_cliques(nbrs: list[list[int]]) -> list[list[int]]:
    """One greedily grown clique per vertex (lowest ids first), deduplicated, size >= 3."""
    adj = [set(x) for x in nbrs]
    found = set()
    for v in range(len(nbrs)):
        q = [v]
        for w in nbrs[v]:
            if all(w in adj[u] for u in q):
                q.append(w)
        if len(q) >= 3:
            found.add(tuple(sorted(q)))
    return [list(q) for q in sorted(found)]


def _has_sdr(sets: list[set[int]]) -> bool:
    """True if the sets admit distinct representatives (augmenting paths)."""
    owner: dict[int, int] = {}

    def augment(i, seen):
        for c in sets[i]:
            if c in seen:
                continue
            seen.add(c)
            if c not in owner or augment(owner[c], seen):
                owner[c] = i
                return True
        return False

    return all(augment(i, set()) for i in range(len(sets)))


def exact_list_colorable(g: Graph, lists, max_n: int = 24) -> OracleVerdict:
    """Decide L-colourability by backtracking.

    Picks the uncoloured vertex with fewest remaining colours (ties: most
    uncoloured neighbours, then lowest id) and prunes neighbours' domains as
    it goes, backing out as soon as a domain empties or some greedily found
    clique can no longer receive distinct colours.
    """
    n = g.n
    if n > max_n:
        raise ValueError(f"instance too large for exact search (n={n} > {max_n})")
    nbrs = [g.neighbors(v).tolist() for v in range(n)]
    domains = _as_sets(lists, n)
    colour = [-1] * n
    nodes = 0
    cliques = _greedy_cliques(nbrs)

    def cliques_ok() -> bool:
        # clique members need distinct colours: each clique must pass Hall's test
        for q in cliques:
            free = [domains[v] for v in q if colour[v] < 0]
            if len(free) > 1 and not _has_sdr(free):
                return False
        return True

    def pick() -> int:
        best, key = -1, None
        for v in range(n):
            if colour[v] >= 0:
                continue
            k = (len(domains[v]), -sum(1 for w in nbrs[v] if colour[w] < 0), v)
            if key is None or k < key:
                best, key = v, k
        return best

    def solve() -> bool:
        nonlocal nodes
        v = pick()
        if v < 0:
            return True
        if not cliques_ok():
            return False
        for c in sorted(domains[v]):
            nodes += 1
            pruned = []
            dead = False
            for w in nbrs[v]:
                if colour[w] < 0 and c in domains[w]:
                    domains[w].discard(c)
                    pruned.append(w)
                    if not domains[w]:
                        dead = True
            colour[v] = c
            if not dead and solve():
                return True
            colour[v] = -1
            for w in pruned:
                domains[w].add(c)
        return False

    if any(not d for d in domains[:n]) and n:
        return OracleVerdict(False, None, 0)
    ok = solve()
    return OracleVerdict(ok, np.array(colour, dtype=np.int64) if ok else None, nodes)


def coverage_probability(n: int, gamma_size: int, ell: float, dps: int | None = None) -> float:
    """P(every colour lies in at least one of n independent uniform ell-subsets).

    Inclusion-exclusion over the set of missed colours, evaluated in
    arbitrary precision.  The ratio C(g-j, ell)/C(g, ell) is taken as the
    product over i < j of (g-i-ell)/(g-i), which also defines the
    value for non-integer ``ell``.
    """
    if not 0 < ell <= gamma_size:
        raise ValueError("need 0 < ell <= gamma_size")
    if ell == gamma_size:
        return 1.0
    # the alternating terms reach about C(g, g/2); carry enough digits to cancel them
    digits = dps or int(gamma_size * math.log10(2)) + 40
    with mpmath.workdps(digits):
        g = mpmath.mpf(gamma_size)
        l = mpmath.mpf(ell)
        total = mpmath.mpf(0)
        ratio = mpmath.mpf(1)
        binom = mpmath.mpf(1)
        for j in range(gamma_size + 1):
            if j > 0:
                ratio *= (g - (j - 1) - l) / (g - (j - 1))
                binom = binom * (gamma_size - j + 1) / j
            if ratio == 0:
                break
            total += (-1) ** j * binom * ratio ** n
        return float(total)
