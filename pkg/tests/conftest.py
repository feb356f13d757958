"""Independent brute-force references used across the test suite."""

from itertools import combinations, permutations, product

import numpy as np
import pytest

from pspark import build_graph


def brute_max_matching(adj, y_size):
    """Largest matching size by trying every injective assignment of X subsets."""
    x_size = len(adj)
    for k in range(min(x_size, y_size), 0, -1):
        for xs in combinations(range(x_size), k):
            for ys in permutations(range(y_size), k):
                if all(y in adj[x] for x, y in zip(xs, ys)):
                    return k
    return 0


def brute_max_deficit(adj, y_size):
    """max over S of |S| - |N(S)| (empty S gives 0)."""
    x_size = len(adj)
    best = 0
    for mask in range(1, 1 << x_size):
        S = [x for x in range(x_size) if mask >> x & 1]
        N = set().union(*(set(adj[x]) for x in S))
        best = max(best, len(S) - len(N))
    return best


def brute_pm_probability(adj, y_size, s):
    """P(X-perfect matching in L & F) by listing every tuple of s-subsets."""
    from fractions import Fraction
    subsets = list(combinations(range(y_size), s))
    good = total = 0
    for choice in product(subsets, repeat=len(adj)):
        total += 1
        rows = [set(L) & set(f) for L, f in zip(choice, adj)]
        if brute_max_matching(rows, y_size) == len(adj):
            good += 1
    return Fraction(good, total)


def brute_list_colorable(n, edges, lists):
    for cols in product(*[sorted(l) for l in lists]):
        if all(cols[u] != cols[v] for u, v in edges):
            return True
    return n == 0 and True


def random_graph(rng, n, p):
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return build_graph(n, edges)


def rescan_ok(g):
    """Symmetric, simple, sorted, D_max correct: checked edge by edge."""
    seen = set()
    for v in range(g.n):
        nb = g.neighbors(v).tolist()
        if nb != sorted(set(nb)) or v in nb:
            return False
        for w in nb:
            if v not in g.neighbors(w).tolist():
                return False
            seen.add((min(v, w), max(v, w)))
    dmax = max((len(g.neighbors(v)) for v in range(g.n)), default=0)
    return dmax == g.D_max and len(seen) == g.num_edges


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_CRITERIA: dict[int, str] = {}


@pytest.fixture
def criterion(request):
    """``criterion(k, ok, detail)`` records one acceptance line and prints it."""
    def record(k, ok, detail):
        line = f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _CRITERIA[k] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[k])
