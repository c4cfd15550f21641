"""Sample skewness of population cost and fitness distributions."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np


class Skewness(NamedTuple):
    value: float
    degenerate: bool


def population_skewness(costs) -> Skewness:
    """Adjusted Fisher-Pearson skewness coefficient G1 of a sample.

    ``G1 = n / ((n - 1)(n - 2)) * sum(((x - mean) / s) ** 3)`` where `s` is the
    sample (ddof=1) standard deviation. Samples with fewer than three points
    or no spread give ``Skewness(0.0, degenerate=True)``.
    """
    x = np.asarray(costs, dtype=float)
    n = x.size
    if n < 3:
        return Skewness(0.0, True)
    dev = x - x.mean()
    s = np.sqrt(np.dot(dev, dev) / (n - 1))
    # spread below float noise of the mean counts as zero variance
    if not np.isfinite(s) or s <= 8 * np.finfo(float).eps * max(1.0, float(np.abs(x).max())):
        return Skewness(0.0, True)
    z = dev / s
    g1 = n / ((n - 1) * (n - 2)) * float(np.sum(z * z * z))
    return Skewness(g1, False)


def fitness_skewness(costs) -> Skewness:
    """Skewness of the fitness distribution of a cost sample.

    Fitness is an affine reflection of cost (``worst - cost``), so its
    skewness is the negated cost skewness.
    """
    g1, degenerate = population_skewness(costs)
    return Skewness(-g1 if g1 else 0.0, degenerate)
