import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from rankga.core import Population
from rankga.policies import (
    Constant,
    FitnessAdaptive,
    RankAdaptive,
    assign_ranks,
    fitness_adaptive_p,
    fitness_of,
    make_policy,
    probabilities_for,
    rank_adaptive_p,
)
from rankga.problems import GenomeKind


def population(costs):
    costs = np.asarray(costs, dtype=float)
    return Population(np.zeros((len(costs), 4), dtype=np.uint8), costs, GenomeKind.BINARY)


@pytest.mark.parametrize(
    "cost, worst, expected",
    [(5, 5, 0), (0, 10, 10)],
)
def test_fitness_of(cost, worst, expected):
    assert fitness_of(cost, worst) == expected


def test_fitness_of_vector():
    costs = np.array([2.0, 4.0, 10.0])
    np.testing.assert_array_equal(fitness_of(costs, costs.max()), [8, 6, 0])


def test_fitness_of_rejects_cost_above_worst():
    with pytest.raises(ValueError):
        fitness_of(11, 10)


@pytest.mark.parametrize("f, expected", [(10.0, 0.0), (0.0, 0.1), (5.0, 0.05)])
def test_fitness_adaptive_p(f, expected):
    assert fitness_adaptive_p(f, 10.0, 0.1) == pytest.approx(expected, abs=1e-15)


def test_fitness_adaptive_p_uniform_population_gets_pmax():
    assert fitness_adaptive_p(0.0, 0.0, 0.1) == 0.1


def test_fitness_adaptive_p_rejects_f_above_fmax():
    with pytest.raises(ValueError):
        fitness_adaptive_p(2.0, 1.0, 0.1)


@pytest.mark.parametrize("r, expected", [(10, 0.0), (1, 0.1), (5, 0.1 * (1 - 4 / 9))])
def test_rank_adaptive_p(r, expected):
    assert rank_adaptive_p(r, 10, 0.1) == pytest.approx(expected, abs=1e-15)


def test_rank_adaptive_p_single_individual():
    assert rank_adaptive_p(1, 1, 0.1) == 0.0


def test_rank_adaptive_p_rejects_bad_rank():
    with pytest.raises(ValueError):
        rank_adaptive_p(11, 10, 0.1)


def test_rank_adaptive_p_strictly_decreasing():
    p = rank_adaptive_p(np.arange(1, 31), 30, 0.1)
    assert np.all(np.diff(p) < 0)


def test_assign_ranks_order_statistics():
    rng = np.random.default_rng(0)
    assert assign_ranks([3, 1, 2], rng).tolist() == [3, 1, 2]


def test_assign_ranks_single():
    assert assign_ranks([7.0], np.random.default_rng(0)).tolist() == [1]


def test_assign_ranks_ties_uniform_over_permutations():
    # all 24 orderings of a fully tied population of 4 should be equally likely
    counts = Counter()
    for seed in range(10_000):
        counts[tuple(assign_ranks([1.0] * 4, np.random.default_rng(seed)))] += 1
    assert set(counts) == set(itertools.permutations(range(1, 5)))
    expected = 10_000 / 24
    sigma = np.sqrt(10_000 * (1 / 24) * (23 / 24))
    assert all(abs(c - expected) < 4 * sigma for c in counts.values())
    assert stats.chisquare(list(counts.values())).pvalue > 1e-4


def test_assign_ranks_ties_stay_in_block():
    rng = np.random.default_rng(3)
    for _ in range(100):
        ranks = assign_ranks([5, 1, 5, 0, 5], rng)
        assert ranks[3] == 1 and ranks[1] == 2
        assert sorted(ranks[[0, 2, 4]]) == [3, 4, 5]


def test_constant_probabilities():
    p = probabilities_for(population(np.arange(10)), Constant(0.05), np.random.default_rng(0))
    np.testing.assert_array_equal(p, [0.05] * 10)


def test_rank_probabilities_three_distinct():
    p = probabilities_for(population([3.0, 1.0, 2.0]), RankAdaptive(0.1), np.random.default_rng(0))
    np.testing.assert_allclose(p, [0.1, 0.0, 0.05], atol=1e-15)


def test_fitness_probabilities_endpoints():
    p = probabilities_for(population([0.0, 10.0]), FitnessAdaptive(0.1), np.random.default_rng(0))
    np.testing.assert_allclose(p, [0.0, 0.1])


def test_reciprocal_transform_endpoints():
    policy = FitnessAdaptive(0.1, transform="reciprocal")
    p = policy.probabilities(np.array([0.0, 1.0, 3.0]), np.random.default_rng(0))
    np.testing.assert_allclose(p, [0.0, 0.05, 0.075])


def test_negatively_skewed_sample_starves_fitness_policy():
    # fitnesses {0, 9, 9.5, 9.8, 10} as costs relative to a worst of 10
    costs = 10.0 - np.array([0.0, 9.0, 9.5, 9.8, 10.0])
    rng = np.random.default_rng(1)
    fit_mean = FitnessAdaptive(0.1).probabilities(costs, rng).mean()
    rank_mean = RankAdaptive(0.1).probabilities(costs, rng).mean()
    assert rank_mean == pytest.approx(0.05, abs=1e-15)
    assert fit_mean < rank_mean


@pytest.mark.parametrize("bad", [-0.1, 1.5])
@pytest.mark.parametrize("cls", [Constant, FitnessAdaptive, RankAdaptive])
def test_policy_rejects_bad_probability(cls, bad):
    with pytest.raises(ValueError):
        cls(bad)


def test_make_policy():
    assert make_policy("rank", 0.2) == RankAdaptive(0.2)
    assert make_policy("sga") == Constant(0.05)
    assert make_policy("fitness") == FitnessAdaptive(0.1)
    with pytest.raises(ValueError):
        make_policy("gaussian")


costs_strategy = st.lists(
    st.floats(min_value=0, max_value=1e6, allow_nan=False), min_size=2, max_size=50
).map(np.array)


@settings(max_examples=200, deadline=None)
@given(costs_strategy, st.floats(0, 1), st.integers(0, 2**32))
def test_probability_bounds(costs, p_max, seed):
    rng = np.random.default_rng(seed)
    for policy in (FitnessAdaptive(p_max), RankAdaptive(p_max), FitnessAdaptive(p_max, "reciprocal")):
        p = policy.probabilities(costs, rng)
        assert p.shape == costs.shape
        assert np.all((p >= 0) & (p <= p_max))
    np.testing.assert_array_equal(Constant(p_max).probabilities(costs, rng), p_max)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0, 1e6, allow_nan=False), min_size=2, max_size=50, unique=True), st.integers(0, 2**32))
def test_rank_policy_single_zero_at_best(costs, seed):
    costs = np.array(costs)
    p = RankAdaptive(0.1).probabilities(costs, np.random.default_rng(seed))
    assert np.count_nonzero(p == 0) == 1
    assert np.argmin(p) == np.argmin(costs)
    assert p.mean() == pytest.approx(0.05, abs=1e-15)
