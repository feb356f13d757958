import math
from fractions import Fraction
from math import comb

import numpy as np
import pytest

from pspark import GeneratorSpec, build_graph, coverage_probability, exact_list_colorable, generate

from conftest import brute_list_colorable, random_graph


def _exact_coverage(n, g, ell):
    return float(sum((-1) ** j * comb(g, j) * Fraction(comb(g - j, ell), comb(g, ell)) ** n
                     for j in range(g + 1)))


def test_edgeless_colorable():
    v = exact_list_colorable(build_graph(4, []), [[0]] * 4)
    assert v.colorable and v.witness.tolist() == [0, 0, 0, 0]


def test_triangle_two_colours():
    K3 = generate(GeneratorSpec("complete", {"m": 3}))
    assert not exact_list_colorable(K3, [[1, 2]] * 3).colorable


def test_k4_cyclic_lists():
    K4 = generate(GeneratorSpec("complete", {"m": 4}))
    lists = [[1, 2], [2, 3], [3, 4], [4, 1]]
    v = exact_list_colorable(K4, lists)
    assert v.colorable == brute_list_colorable(4, list(K4.edges()), lists)
    assert v.colorable


def test_witness_is_valid_and_matches_enumeration(rng):
    for _ in range(150):
        n = int(rng.integers(1, 8))
        g = random_graph(rng, n, 0.5)
        lists = [rng.choice(4, size=int(rng.integers(1, 4)), replace=False).tolist() for _ in range(n)]
        v = exact_list_colorable(g, lists)
        assert v.colorable == brute_list_colorable(n, list(g.edges()), lists)
        if v.colorable:
            w = v.witness
            assert all(w[x] in lists[x] for x in range(n))
            assert all(w[a] != w[b] for a, b in g.edges())


def test_size_guard():
    with pytest.raises(ValueError):
        exact_list_colorable(build_graph(30, []), [[0]] * 30)


def test_clique_20_tractable():
    K = generate(GeneratorSpec("complete", {"m": 20}))
    lists = [list(range(19))] * 20
    assert not exact_list_colorable(K, lists).colorable


def test_clique_20_colourable():
    K = generate(GeneratorSpec("complete", {"m": 20}))
    rng = np.random.default_rng(0)
    lists = [rng.permutation(20)[:12].tolist() + [v] for v in range(20)]
    lists = [sorted(set(l)) for l in lists]
    v = exact_list_colorable(K, lists)
    assert v.colorable and len(set(v.witness.tolist())) == 20


def test_coverage_trivial():
    assert coverage_probability(5, 7, 7) == 1.0
    assert coverage_probability(1, 7, 3) == 0.0


def test_coverage_against_rationals():
    for n, g, ell in [(10, 6, 2), (40, 20, 3), (256, 256, 6), (256, 256, 4)]:
        assert coverage_probability(n, g, ell) == pytest.approx(_exact_coverage(n, g, ell), abs=1e-12)


def test_coverage_256_window():
    p = coverage_probability(256, 256, 6)
    assert 0.5 < p < 0.95
    # frozen from exact rational inclusion-exclusion
    assert p == pytest.approx(0.5511723027495421, abs=1e-12)


def test_coverage_monotone():
    vals = [coverage_probability(100, 100, ell) for ell in range(1, 101)]
    assert all(a <= b + 1e-15 for a, b in zip(vals, vals[1:]))


def test_coverage_monte_carlo():
    rng = np.random.default_rng(5)
    n = g = 30
    ell = 4
    hits = 0
    trials = 20_000
    for _ in range(trials // 1000):
        # 1000 palettes at once; each list is the first ell entries of a random permutation
        picks = np.argsort(rng.random((1000, n, g)), axis=2)[:, :, :ell]
        seen = np.zeros((1000, g), dtype=bool)
        np.put_along_axis(seen, picks.reshape(1000, -1), True, axis=1)
        hits += int(seen.all(axis=1).sum())
    p = coverage_probability(n, g, ell)
    assert abs(hits / trials - p) < 4 * math.sqrt(p * (1 - p) / trials)


def test_coverage_near_inverse_e():
    # ell solving n (1 - ell/n)^n = 1 puts about one expected missing colour
    n = 256
    ell = 5.4855521055487656   # root found at 50 digits
    assert abs(coverage_probability(n, n, ell) - math.exp(-1)) < 0.02
