from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pspark import (Bigraph, canonical_minimizer, hall_violator, max_matching,
                    pm_probability_exact, switch)

from conftest import brute_max_deficit, brute_max_matching, brute_pm_probability


def _random_bigraph(rng, nx, ny, p):
    return Bigraph(nx, ny, [[y for y in range(ny) if rng.random() < p] for _ in range(nx)])


def _is_matching(b, res):
    ys = list(res.pairs.values())
    return len(set(ys)) == len(ys) and all(y in b.adj[x] for x, y in res.pairs.items())


def test_complete_3x3():
    b = Bigraph(3, 3, [range(3)] * 3)
    r = max_matching(b)
    assert r.saturates_X and r.deficiency == 0


def test_empty_neighbourhood():
    b = Bigraph(2, 2, [[0], []])
    r = max_matching(b)
    assert r.deficiency >= 1
    assert hall_violator(b, r) == [1]


def test_shared_neighbour_violator():
    b = Bigraph(2, 3, [[1], [1]])
    r = max_matching(b)
    S = hall_violator(b, r)
    assert S == [0, 1]


def test_saturating_has_no_violator():
    b = Bigraph(2, 2, [[0, 1], [1]])
    assert hall_violator(b, max_matching(b)) is None


def test_bad_index():
    with pytest.raises(ValueError):
        Bigraph(1, 2, [[2]])


def test_against_brute_force_6x6(rng):
    for _ in range(300):
        b = _random_bigraph(rng, 6, 6, float(rng.random()))
        r = max_matching(b)
        assert _is_matching(b, r)
        assert r.size == brute_max_matching([set(a) for a in b.adj], 6)


def test_hopcroft_karp_path_large(rng):
    # above the small-instance cutoff: compare to the deficiency formula
    for _ in range(60):
        nx = int(rng.integers(9, 11))
        b = _random_bigraph(rng, nx, int(rng.integers(5, 12)), float(rng.random()) * 0.5)
        r = max_matching(b)
        assert _is_matching(b, r)
        assert r.size + brute_max_deficit([set(a) for a in b.adj], b.y_size) == nx


def test_violator_genuine(rng):
    for _ in range(300):
        b = _random_bigraph(rng, int(rng.integers(1, 11)), int(rng.integers(1, 8)), 0.3)
        r = max_matching(b)
        S = hall_violator(b, r)
        if r.saturates_X:
            assert S is None
        else:
            N = set().union(*(b.adj[x] for x in S))
            assert len(N) < len(S)


def test_large_random_matching(rng):
    nx = 400
    b = _random_bigraph(rng, nx, nx, 0.01)
    r = max_matching(b)
    assert _is_matching(b, r)
    S = hall_violator(b, r)
    if S is not None:
        # Konig: the violator from a maximum matching certifies the deficiency bound
        N = set().union(*(b.adj[x] for x in S))
        assert len(N) < len(S)


@given(st.integers(1, 5), st.integers(1, 5), st.data())
@settings(max_examples=80, deadline=None)
def test_switch_preserves_degrees(nx, ny, data):
    adj = [data.draw(st.sets(st.integers(0, ny - 1))) for _ in range(nx)]
    F = Bigraph(nx, ny, adj)
    if ny < 2:
        return
    u, v = data.draw(st.lists(st.integers(0, ny - 1), min_size=2, max_size=2, unique=True))
    F2 = switch(F, u, v)
    assert F2.degrees() == F.degrees()
    assert F2.y_neighbourhood(u) == F.y_neighbourhood(u) | F.y_neighbourhood(v)
    assert F2.y_neighbourhood(v) == F.y_neighbourhood(u) & F.y_neighbourhood(v)
    for y in set(range(ny)) - {u, v}:
        assert F2.y_neighbourhood(y) == F.y_neighbourhood(y)


def test_switch_examples():
    F = Bigraph(2, 3, [[0, 1], [0, 1]])
    assert switch(F, 0, 1) == F
    G = Bigraph(2, 3, [[1], [1]])
    G2 = switch(G, 0, 1)
    assert G2.y_neighbourhood(0) == {0, 1} and G2.y_neighbourhood(1) == set()
    H = Bigraph(2, 3, [[0], [1]])
    H2 = switch(H, 0, 1)
    assert H2.y_neighbourhood(0) == {0, 1} and H2.y_neighbourhood(1) == set()
    with pytest.raises(ValueError):
        switch(F, 1, 1)


def test_pm_probability_examples():
    assert pm_probability_exact(Bigraph(3, 3, [range(3)] * 3), 3) == 1
    assert pm_probability_exact(Bigraph(2, 3, [[0, 1, 2], []]), 2) == 0
    # two singletons collide in 3 of 9 outcomes
    assert pm_probability_exact(Bigraph(2, 3, [range(3)] * 2), 1) == Fraction(2, 3)


def test_pm_probability_against_enumeration(rng):
    for _ in range(40):
        nx, ny = int(rng.integers(1, 4)), int(rng.integers(1, 5))
        b = _random_bigraph(rng, nx, ny, 0.6)
        s = int(rng.integers(0, ny + 1))
        assert pm_probability_exact(b, s) == brute_pm_probability([set(a) for a in b.adj], ny, s)


def test_pm_probability_limits():
    with pytest.raises(ValueError):
        pm_probability_exact(Bigraph(8, 2, [[0]] * 8), 1)
    with pytest.raises(ValueError):
        pm_probability_exact(Bigraph(1, 2, [[0]]), 3)


def test_canonical_minimizer():
    assert canonical_minimizer([2, 2], 3).adj == ((0, 1), (0, 1))
    assert canonical_minimizer([0, 1], 3).adj == ((), (0,))
    with pytest.raises(ValueError):
        canonical_minimizer([4], 3)
