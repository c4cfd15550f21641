"""Mutation-probability policies.

Every policy maps a population's costs to one mutation probability per
individual. Problems are cost-minimising, so the adaptive policies first turn
costs into fitness values (higher is better) before applying their formula.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Union

import numpy as np

if TYPE_CHECKING:
    from rankga.core import Population

FITNESS_TRANSFORMS = ("worst-minus-cost", "reciprocal")


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


def fitness_of(cost, population_worst_cost):
    """Fitness of an individual relative to the worst cost in its population.

    The worst individual gets fitness 0 and the best gets the population's
    maximum fitness. Works elementwise on arrays.

    >>> fitness_of(0.0, 10.0)
    10.0
    """
    cost = np.asarray(cost, dtype=float)
    if np.any(cost > population_worst_cost):
        raise ValueError("cost exceeds the population worst cost")
    fitness = population_worst_cost - cost
    return float(fitness) if fitness.ndim == 0 else fitness


def fitness_adaptive_p(f, f_max: float, p_max: float):
    """``p_max * (1 - f / f_max)``; every individual gets ``p_max`` when ``f_max == 0``."""
    _check_probability("p_max", p_max)
    f = np.asarray(f, dtype=float)
    if np.any(f > f_max) or np.any(f < 0):
        raise ValueError("fitness must lie in [0, f_max]")
    if f_max == 0:
        p = np.full(f.shape, p_max)
    else:
        p = p_max * (1.0 - f / f_max)
    return float(p) if p.ndim == 0 else p


def assign_ranks(fitnesses, rng: np.random.Generator) -> np.ndarray:
    """Rank individuals by fitness: 1 for the poorest, N for the fittest.

    Individuals with equal fitness share the contested block of ranks in a
    uniformly random order drawn from `rng`.

    Returns
    -------
    numpy.ndarray
        Integer ranks aligned with `fitnesses`, a permutation of ``1..N``.
    """
    fitnesses = np.asarray(fitnesses, dtype=float)
    n = fitnesses.shape[0]
    tiebreak = rng.permutation(n)
    order = np.lexsort((tiebreak, fitnesses))
    ranks = np.empty(n, dtype=np.int64)
    ranks[order] = np.arange(1, n + 1)
    return ranks


def rank_adaptive_p(r, n: int, p_max: float):
    """``p_max * (1 - (r - 1) / (n - 1))``; a lone individual (``n == 1``) gets 0."""
    _check_probability("p_max", p_max)
    r = np.asarray(r)
    if np.any(r < 1) or np.any(r > n):
        raise ValueError(f"rank must lie in [1, {n}]")
    if n == 1:
        p = np.zeros(r.shape)
    else:
        p = p_max * (1.0 - (r - 1) / (n - 1))
    return float(p) if p.ndim == 0 else p


@dataclass(frozen=True)
class Constant:
    """Same mutation probability for every individual (the simple GA)."""

    p: float = 0.05

    def __post_init__(self):
        _check_probability("p", self.p)

    @property
    def upper_bound(self) -> float:
        return self.p

    def probabilities(self, costs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return np.full(len(costs), self.p)

    def probabilities_against(self, costs, reference, rng: np.random.Generator) -> np.ndarray:
        return np.full(len(costs), self.p)

    def describe(self) -> str:
        return f"constant(p={self.p:g})"


@dataclass(frozen=True)
class FitnessAdaptive:
    """Probability shrinks linearly as fitness approaches the population best.

    `transform` picks how costs become fitness values: ``worst-minus-cost``
    (default) or ``reciprocal``, i.e. ``1 / (1 + cost)``.
    """

    p_max: float = 0.1
    transform: str = "worst-minus-cost"

    def __post_init__(self):
        _check_probability("p_max", self.p_max)
        if self.transform not in FITNESS_TRANSFORMS:
            raise ValueError(f"unknown fitness transform {self.transform!r}")

    @property
    def upper_bound(self) -> float:
        return self.p_max

    def fitnesses(self, costs: np.ndarray) -> np.ndarray:
        costs = np.asarray(costs, dtype=float)
        if self.transform == "reciprocal":
            return 1.0 / (1.0 + costs)
        return fitness_of(costs, costs.max())

    def probabilities(self, costs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        f = np.atleast_1d(self.fitnesses(costs))
        f_max = f.max()
        if self.transform == "reciprocal":
            # f_min > 0 here, so the degenerate case is "everyone ties with the best"
            if np.all(f == f_max):
                return np.full(len(f), self.p_max)
            return self.p_max * (1.0 - f / f_max)
        return np.atleast_1d(fitness_adaptive_p(f, f_max, self.p_max))

    def probabilities_against(self, costs, reference, rng: np.random.Generator) -> np.ndarray:
        """Probabilities for `costs` judged against the population `reference`.

        Fitness is clipped into the reference population's range, so anything
        better than its best gets 0 and anything worse than its worst gets
        ``p_max``.
        """
        costs = np.asarray(costs, dtype=float)
        reference = np.asarray(reference, dtype=float)
        if self.transform == "reciprocal":
            f_max = 1.0 / (1.0 + reference.min())
            ratio = np.clip((1.0 / (1.0 + costs)) / f_max, 0.0, 1.0)
            return self.p_max * (1.0 - ratio)
        worst = reference.max()
        f_max = worst - reference.min()
        f = np.clip(worst - costs, 0.0, f_max)
        return np.atleast_1d(fitness_adaptive_p(f, f_max, self.p_max))

    def describe(self) -> str:
        suffix = "" if self.transform == "worst-minus-cost" else f", {self.transform}"
        return f"fitness(pmax={self.p_max:g}{suffix})"


@dataclass(frozen=True)
class RankAdaptive:
    """Probability falls linearly with rank: ``p_max`` for the poorest, 0 for the best."""

    p_max: float = 0.1

    def __post_init__(self):
        _check_probability("p_max", self.p_max)

    @property
    def upper_bound(self) -> float:
        return self.p_max

    def probabilities(self, costs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        costs = np.asarray(costs, dtype=float)
        # rank on negated cost rather than worst - cost so that tiny cost
        # differences are never rounded into ties
        ranks = assign_ranks(-costs, rng)
        return np.atleast_1d(rank_adaptive_p(ranks, len(costs), self.p_max))

    def probabilities_against(self, costs, reference, rng: np.random.Generator) -> np.ndarray:
        """Probabilities for `costs` ranked as if each were inserted into `reference`.

        The rank is one plus the number of reference members with a higher
        cost, with a random position among equal-cost members, capped at N.
        """
        costs = np.asarray(costs, dtype=float)
        ref = np.sort(np.asarray(reference, dtype=float))
        n = len(ref)
        above = n - np.searchsorted(ref, costs, side="right")
        ties = np.searchsorted(ref, costs, side="right") - np.searchsorted(ref, costs, side="left")
        offset = np.floor(rng.random(len(costs)) * (ties + 1)).astype(np.int64)
        ranks = np.minimum(1 + above + offset, n)
        return np.atleast_1d(rank_adaptive_p(ranks, n, self.p_max))

    def describe(self) -> str:
        return f"rank(pmax={self.p_max:g})"


MutationPolicy = Union[Constant, FitnessAdaptive, RankAdaptive]

POLICY_NAMES = {"constant": Constant, "sga": Constant, "fitness": FitnessAdaptive, "rank": RankAdaptive}


def make_policy(name: str, p: float | None = None, transform: str = "worst-minus-cost") -> MutationPolicy:
    """Build a policy from its CLI name (``constant``/``sga``, ``fitness``, ``rank``).

    `p` is the constant rate or the adaptive maximum; paper defaults apply when
    it is omitted.
    """
    try:
        cls = POLICY_NAMES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown mutation policy {name!r}; choose from {sorted(POLICY_NAMES)}") from None
    if cls is Constant:
        return Constant() if p is None else Constant(p)
    if cls is FitnessAdaptive:
        return FitnessAdaptive(transform=transform) if p is None else FitnessAdaptive(p, transform)
    return RankAdaptive() if p is None else RankAdaptive(p)


def probabilities_for(pop: Population, policy: MutationPolicy, rng: np.random.Generator) -> np.ndarray:
    """Mutation probability for every member of `pop` under `policy`."""
    if len(pop.costs) == 0:
        raise ValueError("population is empty")
    return policy.probabilities(pop.costs, rng)
