import itertools
from fractions import Fraction

import numpy as np
import pytest

from korder.bruteforce import (CapExceededError, brute_ded, brute_maxk, k_paths, balanced_optimum_fraction,
                               balanced_partition)
from korder.graph import WeightedDigraph, forward_weight
from korder.instances import complete_digraph, path_graph, random_dag_edges, random_digraph

from helpers import all_paths, every_labeling, forward_sum


def test_maxk_examples():
    assert brute_maxk(WeightedDigraph.from_edges(2, [(0, 1)]), 2)[0] == 1
    assert brute_maxk(WeightedDigraph.from_edges(2, [(0, 1), (1, 0)]), 2)[0] == 1
    value, labels = brute_maxk(complete_digraph(4), 2)
    assert value == 4 and forward_weight(complete_digraph(4), labels) == 4


@pytest.mark.parametrize("n, k, frac", [(4, 2, Fraction(1, 3)), (3, 3, Fraction(1, 2)), (5, 2, Fraction(3, 10))])
def test_balanced_examples(n, k, frac):
    assert balanced_optimum_fraction(n, k) == frac
    assert brute_maxk(complete_digraph(n), k)[0] == frac * n * (n - 1)


def test_balanced_divisible_closed_form():
    for n, k in [(4, 2), (6, 3), (6, 2), (8, 4)]:
        assert balanced_optimum_fraction(n, k) == Fraction(1, 2) * (1 - Fraction(1, k)) * Fraction(n, n - 1)
    assert balanced_partition(7, 3) == [3, 2, 2]
    with pytest.raises(ValueError):
        balanced_optimum_fraction(3, 4)


@pytest.mark.parametrize("seed", range(12))
def test_maxk_matches_plain_enumeration(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 6))
    g = random_digraph(n, int(rng.integers(1, n * (n - 1) + 1)), seed, max_weight=4)
    k = int(rng.integers(2, 5))
    best = max(forward_sum(g, lab) for lab in every_labeling(n, k))
    assert brute_maxk(g, k)[0] == best


@pytest.mark.parametrize("seed", range(6))
def test_partition_dp_matches_enumeration(seed):
    # a tiny cap forces the subset DP path
    g = random_digraph(6, 14, seed, max_weight=5)
    for k in (2, 3, 6):
        value, labels = brute_maxk(g, k, cap=800)
        assert value == brute_maxk(g, k)[0]
        assert forward_weight(g, labels) == value and max(labels) <= k


def test_caps():
    with pytest.raises(CapExceededError):
        brute_maxk(complete_digraph(9), 9, cap=1000)
    with pytest.raises(CapExceededError):
        brute_ded(random_dag_edges(10, 25, 0), 2)


def test_ded_examples():
    cost, deleted = brute_ded(path_graph(3), 3)
    assert cost == 1.0 and len(deleted) == 1
    assert brute_ded(path_graph(2), 3) == (0.0, frozenset())
    g = WeightedDigraph.from_edges(6, [(0, 1), (1, 2), (3, 4), (4, 5)])
    assert brute_ded(g, 2)[0] == 2


@pytest.mark.parametrize("seed", range(10))
def test_ded_matches_plain_enumeration(seed):
    g = random_dag_edges(7, 10, seed, max_weight=None if seed % 2 else 6)
    k = 2 + seed % 3
    paths = [set(p) for p in all_paths(g) if len(p) == k]
    best = min(sum(g.edges[e].weight for e in s) for r in range(g.m + 1)
               for s in map(set, itertools.combinations(range(g.m), r)) if all(p & s for p in paths))
    assert brute_ded(g, k)[0] == best
    assert sorted(map(tuple, k_paths(g, k))) == sorted(p for p in all_paths(g) if len(p) == k)
