import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from korder.bruteforce import brute_maxk
from korder.graph import WeightedDigraph, forward_weight
from korder.instances import complete_digraph, path_graph, random_digraph
from korder.maxk import (FractionalOrderingSolution, RoundingDistribution, build_maxk_lp, check_mass_inequality,
                         derandomize, expected_rounded_value, expected_value_under, per_edge_guarantee,
                         random_k_ordering, random_ordering_edge_probability, round_ordering, solve_maxk_lp)

SINGLE = WeightedDigraph.from_edges(2, [(0, 1)])
TWO_CYCLE = WeightedDigraph.from_edges(2, [(0, 1), (1, 0)])


def pair_enumeration(g, probs):
    """Expected forward weight by summing over every label pair of every edge."""
    k = probs.shape[1]
    return sum(e.weight * probs[e.tail, i] * probs[e.head, j]
               for e in g.edges for i, j in itertools.product(range(k), repeat=2) if i < j)


def uniform_solution(g, k):
    x = np.full((g.n, k), 1.0 / k)
    y = np.full((g.m, k, k), 1.0 / k**2)
    return FractionalOrderingSolution(k, x, y, float(g.total_weight() * (k - 1) / (2 * k)))


def test_variable_count():
    prog, idx = build_maxk_lp(SINGLE, 2)
    assert prog.num_vars == 8 == idx.num_vars


def test_rejects_k_below_two():
    with pytest.raises(ValueError):
        build_maxk_lp(SINGLE, 1)


def test_single_edge():
    sol = solve_maxk_lp(SINGLE, 2)
    assert sol.objective == pytest.approx(1.0)
    assert np.allclose(sol.x, [[1, 0], [0, 1]], atol=1e-9)
    assert expected_rounded_value(SINGLE, sol) == pytest.approx(9 / 16)
    (eg,) = per_edge_guarantee(SINGLE, sol)
    assert eg.probability == pytest.approx(9 / 16) and eg.z == pytest.approx(1.0) and eg.holds
    assert forward_weight(SINGLE, derandomize(SINGLE, sol)) == 1.0


def test_complete_digraph_lp_fraction():
    g = complete_digraph(4)
    assert solve_maxk_lp(g, 2).objective / g.total_weight() == pytest.approx(0.5, abs=1e-6)


def test_rounding_distribution_examples():
    k = 3
    dist = RoundingDistribution.from_solution(uniform_solution(SINGLE, k))
    assert np.allclose(dist.probs, 1 / k)
    x = np.array([[1.0, 0.0], [0.0, 1.0]])
    sol = FractionalOrderingSolution(2, x, np.zeros((1, 2, 2)), 1.0)
    assert np.allclose(RoundingDistribution.from_solution(sol).probs[0], [0.75, 0.25])


def test_rounding_is_seed_deterministic():
    g = random_digraph(12, 30, 5, max_weight=3)
    sol = solve_maxk_lp(g, 3)
    assert round_ordering(sol, 42) == round_ordering(sol, 42)
    assert all(1 <= a <= 3 for a in round_ordering(sol, 42))


def test_two_cycle_uniform():
    sol = uniform_solution(TWO_CYCLE, 2)
    assert [eg.probability for eg in per_edge_guarantee(TWO_CYCLE, sol)] == pytest.approx([0.25, 0.25])
    assert expected_rounded_value(TWO_CYCLE, sol) == pytest.approx(0.5)


def test_complete_three_guarantees():
    g = complete_digraph(3)
    sol = solve_maxk_lp(g, 2)
    assert all(eg.holds for eg in per_edge_guarantee(g, sol))


def test_zero_z_edge_holds():
    sol = FractionalOrderingSolution(2, np.array([[0.0, 1.0], [1.0, 0.0]]), np.array([[[0.0, 0.0], [1.0, 0.0]]]),
                                     0.0)
    (eg,) = per_edge_guarantee(SINGLE, sol)
    assert eg.z == 0 and eg.holds


def test_derandomization_on_integral_optimum():
    # the walk starts from the rounded expectation, not the LP value, so an
    # integral LP optimum is not necessarily reproduced
    g = path_graph(3, weights=[2, 1, 4])
    sol = solve_maxk_lp(g, 4)
    assert sol.objective == pytest.approx(7.0)
    assert np.allclose(sol.x, np.eye(4), atol=1e-9)
    value = forward_weight(g, derandomize(g, sol))
    assert value >= expected_rounded_value(g, sol) - 1e-9
    assert value >= sol.objective / 2
    assert value == 6.0


def test_derandomization_single_edge_k3():
    sol = solve_maxk_lp(SINGLE, 3)
    assert forward_weight(SINGLE, derandomize(SINGLE, sol)) == sol.objective == pytest.approx(1.0)


@pytest.mark.parametrize("k, p", [(2, 0.25), (3, 1 / 3)])
def test_random_ordering_probability(k, p):
    assert random_ordering_edge_probability(k) == pytest.approx(p)
    pairs = list(itertools.product(range(1, k + 1), repeat=2))
    assert sum(a < b for a, b in pairs) / len(pairs) == pytest.approx(p)


def test_random_ordering_limit_on_complete_digraphs():
    assert random_ordering_edge_probability(1000) == pytest.approx(0.5, abs=1e-3)
    labels = random_k_ordering(complete_digraph(6), 4, 1)
    assert len(labels) == 6 and all(1 <= a <= 4 for a in labels)


def test_mass_inequality_examples():
    t = 1.7
    res = check_mass_inequality(np.array([[0.0, t], [0.0, 0.0]]), 1)
    assert res.lhs == pytest.approx(t * t, abs=1e-12) and res.rhs == pytest.approx(t * t, abs=1e-12)
    res = check_mass_inequality(np.ones((3, 3)), 1)
    assert (res.lhs, res.rhs, res.holds) == (pytest.approx(27), pytest.approx(6.75), True)
    res = check_mass_inequality(np.ones((3, 3)), 2)
    assert (res.lhs, res.rhs, res.holds) == (pytest.approx(9), pytest.approx(1), True)


def test_mass_inequality_rejects_bad_input():
    with pytest.raises(ValueError):
        check_mass_inequality(np.ones((3, 3)), 3)
    with pytest.raises(ValueError):
        check_mass_inequality(-np.ones((2, 2)), 1)


def test_empirical_mean_matches_expectation():
    g = random_digraph(10, 25, 11, max_weight=4)
    sol = solve_maxk_lp(g, 3)
    exact = expected_rounded_value(g, sol)
    dist = RoundingDistribution.from_solution(sol)
    rng = np.random.default_rng(0)
    vals = np.array([forward_weight(g, dist.sample(rng)) for _ in range(10_000)])
    se = vals.std(ddof=1) / np.sqrt(vals.size)
    assert abs(vals.mean() - exact) <= 3 * se


@st.composite
def small_instances(draw):
    n = draw(st.integers(2, 6))
    m = draw(st.integers(1, min(10, n * (n - 1))))
    return random_digraph(n, m, draw(st.integers(0, 2**32)), max_weight=4), draw(st.integers(2, 4))


@settings(max_examples=40, deadline=None)
@given(small_instances())
def test_relaxation_properties(inst):
    g, k = inst
    sol = solve_maxk_lp(g, k)
    sol.check_edges(g)
    opt, witness = brute_maxk(g, k)
    assert forward_weight(g, witness) == opt
    assert sol.objective >= opt - 1e-6
    probs = RoundingDistribution.from_solution(sol).probs
    assert np.allclose(probs.sum(axis=1), 1, atol=1e-12) and probs.min() >= 1 / (2 * k) - 1e-12
    exact = expected_rounded_value(g, sol)
    assert exact == pytest.approx(pair_enumeration(g, probs), abs=1e-9)
    assert exact == pytest.approx(expected_value_under(g, probs), abs=1e-12)
    assert exact >= sol.objective / 2 - 1e-9
    value = forward_weight(g, derandomize(g, sol))
    assert exact - 1e-9 <= value <= opt + 1e-9
