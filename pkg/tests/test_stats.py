from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rankga.stats import fitness_skewness, population_skewness


def brute_force_g1(sample):
    """Textbook G1 straight from the sums, accumulated in plain Python floats."""
    n = len(sample)
    mean = sum(sample) / n
    m2 = sum((x - mean) ** 2 for x in sample) / n
    m3 = sum((x - mean) ** 3 for x in sample) / n
    g1 = m3 / m2**1.5
    return g1 * (n * (n - 1)) ** 0.5 / (n - 2)


def test_symmetric_sample():
    assert population_skewness([1, 2, 3]) == (0.0, False)


def test_positive_skew():
    # mpmath at 30 digits: 1.63005916171188623...
    g1, degenerate = population_skewness([1, 2, 9])
    assert not degenerate
    assert g1 == pytest.approx(1.6300591617118862, abs=1e-15)


def test_mirror_sample():
    assert population_skewness([-9, -2, -1]).value == pytest.approx(-1.6300591617118862, abs=1e-15)


@pytest.mark.parametrize("sample", [[], [1.0], [1.0, 2.0], [4.0] * 10, [1e6 + 1e-12] * 5])
def test_degenerate_samples(sample):
    assert population_skewness(sample) == (0.0, True)


def test_fitness_skewness_is_reflected():
    assert fitness_skewness([1, 2, 9]).value == pytest.approx(-1.6300591617118862)


def test_matches_brute_force_oracle_on_random_samples():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        n = int(rng.integers(3, 60))
        sample = rng.gamma(rng.uniform(0.3, 5), rng.uniform(0.1, 100), size=n)
        g1, degenerate = population_skewness(sample)
        assert not degenerate
        assert g1 == pytest.approx(brute_force_g1(sample.tolist()), abs=1e-12)


def test_exact_rational_oracle():
    sample = [Fraction(v) for v in (0, 9, 19, 39, 40)]
    n = len(sample)
    mean = sum(sample) / n
    ss = sum((x - mean) ** 2 for x in sample)
    cube = sum((x - mean) ** 3 for x in sample)
    # G1 = n / ((n-1)(n-2)) * cube / s^3 with s^2 = ss / (n-1)
    expected = float(n / Fraction((n - 1) * (n - 2)) * cube) / float(ss / (n - 1)) ** 1.5
    assert population_skewness([float(v) for v in sample]).value == pytest.approx(expected, abs=1e-12)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=0, max_size=40))
def test_never_nan(sample):
    g1, degenerate = population_skewness(sample)
    assert np.isfinite(g1)
    if degenerate:
        assert g1 == 0.0
