"""Bipartite matching, Hall violators, and the neighbourhood-switching apparatus."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Sequence

__all__ = [
    "Bigraph",
    "MatchingResult",
    "max_matching",
    "hall_violator",
    "switch",
    "pm_probability_exact",
    "canonical_minimizer",
]

_EXACT_LIMIT = 7
_SMALL = 8


class Bigraph:
    """Bipartite graph on X = ``range(x_size)``, Y = ``range(y_size)``.

    ``adj[x]`` is the sorted tuple of Y-neighbours of ``x``.
    """

    __slots__ = ("x_size", "y_size", "adj")

    def __init__(self, x_size: int, y_size: int, adj: Sequence[Sequence[int]]):
        if len(adj) != x_size:
            raise ValueError("need one neighbour list per X vertex")
        rows = []
        for nbrs in adj:
            row = tuple(sorted(set(int(y) for y in nbrs)))
            if row and (row[0] < 0 or row[-1] >= y_size):
                raise ValueError(f"Y index out of range [0, {y_size})")
            rows.append(row)
        self.x_size = x_size
        self.y_size = y_size
        self.adj = tuple(rows)

    @classmethod
    def from_masks(cls, masks: Sequence[int], y_size: int) -> "Bigraph":
        return cls(len(masks), y_size,
                   [[y for y in range(y_size) if m >> y & 1] for m in masks])

    def masks(self) -> list[int]:
        return [sum(1 << y for y in row) for row in self.adj]

    def degrees(self) -> list[int]:
        return [len(row) for row in self.adj]

    def y_neighbourhood(self, y: int) -> set[int]:
        return {x for x, row in enumerate(self.adj) if y in row}

    def __eq__(self, other):
        if not isinstance(other, Bigraph):
            return NotImplemented
        return (self.x_size, self.y_size, self.adj) == (other.x_size, other.y_size, other.adj)

    def __hash__(self):
        return hash((self.x_size, self.y_size, self.adj))

    def __repr__(self):
        return f"Bigraph({self.x_size}x{self.y_size}, edges={sum(map(len, self.adj))})"


@dataclass(frozen=True)
class MatchingResult:
    pairs: dict[int, int]          # X -> Y
    x_size: int

    @property
    def size(self) -> int:
        return len(self.pairs)

    @property
    def deficiency(self) -> int:
        return self.x_size - len(self.pairs)

    @property
    def saturates_X(self) -> bool:
        return len(self.pairs) == self.x_size


def _kuhn(b: Bigraph) -> tuple[list[int], list[int]]:
    match_x = [-1] * b.x_size
    match_y = [-1] * b.y_size

    def augment(x, seen):
        for y in b.adj[x]:
            if y in seen:
                continue
            seen.add(y)
            if match_y[y] < 0 or augment(match_y[y], seen):
                match_x[x] = y
                match_y[y] = x
                return True
        return False

    for x in range(b.x_size):
        augment(x, set())
    return match_x, match_y


def _hopcroft_karp(b: Bigraph) -> tuple[list[int], list[int]]:
    adj = b.adj
    nx = b.x_size
    match_x = [-1] * nx
    match_y = [-1] * b.y_size
    inf = nx + 1

    # greedy warm start
    for x in range(nx):
        for y in adj[x]:
            if match_y[y] < 0:
                match_x[x] = y
                match_y[y] = x
                break

    while True:
        dist = [inf] * nx
        queue = deque(x for x in range(nx) if match_x[x] < 0)
        for x in queue:
            dist[x] = 0
        found = inf
        while queue:
            x = queue.popleft()
            if dist[x] >= found:
                continue
            for y in adj[x]:
                x2 = match_y[y]
                if x2 < 0:
                    found = min(found, dist[x] + 1)
                elif dist[x2] == inf:
                    dist[x2] = dist[x] + 1
                    queue.append(x2)
        if found == inf:
            return match_x, match_y

        # layered DFS, iterative; ptr[x] is the next adjacency slot to try
        ptr = [0] * nx
        for root in range(nx):
            if match_x[root] >= 0 or dist[root] != 0:
                continue
            stack = [root]
            while stack:
                x = stack[-1]
                advanced = False
                while ptr[x] < len(adj[x]):
                    y = adj[x][ptr[x]]
                    ptr[x] += 1
                    x2 = match_y[y]
                    if x2 < 0:
                        if dist[x] + 1 == found:
                            # augment along the stack
                            for i in range(len(stack) - 1, -1, -1):
                                xi = stack[i]
                                prev = match_x[xi]
                                match_x[xi] = y
                                match_y[y] = xi
                                y = prev
                            stack = []
                            advanced = True
                            break
                    elif dist[x2] == dist[x] + 1:
                        stack.append(x2)
                        advanced = True
                        break
                if not advanced:
                    dist[x] = inf
                    stack.pop()


def max_matching(b: Bigraph) -> MatchingResult:
    """Maximum-cardinality matching (Hopcroft-Karp; plain augmenting paths when tiny)."""
    match_x, _ = _kuhn(b) if b.x_size <= _SMALL else _hopcroft_karp(b)
    return MatchingResult({x: y for x, y in enumerate(match_x) if y >= 0}, b.x_size)


def hall_violator(b: Bigraph, result: MatchingResult) -> list[int] | None:
    """A set S of X with |N(S)| < |S| when ``result`` is not X-saturating, else None.

    S is everything reachable from an unmatched X vertex by alternating paths.
    """
    if result.saturates_X:
        return None
    match_y = {y: x for x, y in result.pairs.items()}
    root = next(x for x in range(b.x_size) if x not in result.pairs)
    S = {root}
    seen_y: set[int] = set()
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for y in b.adj[x]:
            if y in seen_y:
                continue
            seen_y.add(y)
            if y not in match_y:
                raise ValueError("matching is not maximum: augmenting path found")
            x2 = match_y[y]
            if x2 not in S:
                S.add(x2)
                queue.append(x2)
    return sorted(S)


def switch(F: Bigraph, u: int, v: int) -> Bigraph:
    """Move to ``u`` every X-neighbour of ``v`` that ``u`` lacks.

    Afterwards N(u) is the union and N(v) the intersection of the old
    neighbourhoods; each X vertex keeps its degree.
    """
    if u == v:
        raise ValueError("switch needs two distinct Y vertices")
    rows = []
    for row in F.adj:
        s = set(row)
        if v in s and u not in s:
            s.discard(v)
            s.add(u)
        rows.append(s)
    return Bigraph(F.x_size, F.y_size, rows)


def _subset_masks(y_size: int, s: int) -> list[int]:
    return [sum(1 << y for y in c) for c in combinations(range(y_size), s)]


def _count_pm(masks: Sequence[int], y_size: int, s: int) -> int:
    """Number of list choices (one s-subset of Y per X vertex) with an X-perfect matching in L & F."""
    subsets = _subset_masks(y_size, s)
    # per X vertex: distribution of the trace L_x & F(x)
    traces = []
    for fx in masks:
        dist: dict[int, int] = {}
        for L in subsets:
            t = L & fx
            dist[t] = dist.get(t, 0) + 1
        traces.append(dist)
    # state: frozenset of Y-sets that can be the matched image of the X vertices so far
    states: dict[frozenset, int] = {frozenset([0]): 1}
    for dist in traces:
        nxt: dict[frozenset, int] = {}
        for fam, ways in states.items():
            for t, mult in dist.items():
                new = frozenset(A | (1 << y) for A in fam for y in range(y_size)
                                if t >> y & 1 and not A >> y & 1)
                if new:
                    nxt[new] = nxt.get(new, 0) + ways * mult
        states = nxt
    return sum(states.values())


def pm_probability_exact(F: Bigraph, s: int, limit: int = _EXACT_LIMIT) -> Fraction:
    """Exact P(L & F has an X-perfect matching) for uniform independent s-subsets L_x of Y."""
    if F.x_size > limit or F.y_size > limit:
        raise ValueError(f"instance too large for exact enumeration (limit {limit})")
    if not 0 <= s <= F.y_size:
        raise ValueError("need 0 <= s <= |Y|")
    total = comb(F.y_size, s) ** F.x_size
    return Fraction(_count_pm(F.masks(), F.y_size, s), total)


def canonical_minimizer(degrees: Sequence[int], y_size: int) -> Bigraph:
    """Left-aligned bigraph: X vertex x is adjacent to Y vertices ``0..degrees[x]-1``."""
    if any(d < 0 or d > y_size for d in degrees):
        raise ValueError("each degree must lie in [0, y_size]")
    return Bigraph(len(degrees), y_size, [range(d) for d in degrees])
