"""Population lifecycle of the generational genetic algorithm.

Populations are stored column-wise: an ``(N, L)`` genome array plus an ``N``
cost vector. All randomness flows through one ``numpy.random.Generator`` per
trial, so a run is reproduced exactly by its seed.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from rankga.policies import Constant, MutationPolicy
from rankga.problems import GenomeKind, Problem
from rankga.stats import fitness_skewness


RATE_BASES = ("offspring", "parent")
MUTATION_SCOPES = ("gene", "chromosome")


class ConfigError(ValueError):
    """Invalid GA or campaign configuration."""


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 10
    crossover_probability: float = 0.8
    mutation_policy: MutationPolicy = field(default_factory=Constant)
    tournament_size: int = 2
    convergence_window: int = 50
    max_generations: int = 10_000
    rng_seed: int = 0
    elitism: bool = False
    rate_basis: str = "offspring"
    mutation_scope: str = "gene"

    def __post_init__(self):
        if self.rate_basis not in RATE_BASES:
            raise ConfigError(f"rate_basis must be one of {RATE_BASES}, got {self.rate_basis!r}")
        if self.mutation_scope not in MUTATION_SCOPES:
            raise ConfigError(f"mutation_scope must be one of {MUTATION_SCOPES}, got {self.mutation_scope!r}")
        if self.population_size < 2:
            raise ConfigError(f"population_size must be at least 2, got {self.population_size}")
        if not 0.0 <= self.crossover_probability <= 1.0:
            raise ConfigError(f"crossover_probability must lie in [0, 1], got {self.crossover_probability}")
        if self.tournament_size < 1:
            raise ConfigError(f"tournament_size must be at least 1, got {self.tournament_size}")
        if self.convergence_window < 1:
            raise ConfigError(f"convergence_window must be at least 1, got {self.convergence_window}")
        if self.max_generations < 1:
            raise ConfigError(f"max_generations must be at least 1, got {self.max_generations}")
        if not 0 <= self.rng_seed < 2**64:
            raise ConfigError("rng_seed must be an unsigned 64-bit integer")

    def replace(self, **changes) -> GaConfig:
        return dataclasses.replace(self, **changes)


@dataclass
class Individual:
    genome: np.ndarray
    cost: float
    fitness: Optional[float] = None
    rank: Optional[int] = None


@dataclass
class Population:
    genomes: np.ndarray
    costs: np.ndarray
    kind: GenomeKind
    generation: int = 0

    def __len__(self) -> int:
        return len(self.costs)

    def __getitem__(self, i: int) -> Individual:
        return Individual(self.genomes[i], float(self.costs[i]))

    @property
    def members(self) -> list[Individual]:
        return [self[i] for i in range(len(self))]

    def best_index(self) -> int:
        return int(np.argmin(self.costs))


@dataclass(frozen=True)
class GenerationStats:
    """What an observer sees after each generation."""

    generation: int
    best_cost: float
    best_so_far: float
    mean_cost: float
    skewness: float
    skewness_degenerate: bool
    costs: np.ndarray


GenerationObserver = Callable[[GenerationStats], None]


@dataclass
class TrialResult:
    """Outcome of one run.

    `skewness_trace` and `cost_trace` hold one entry per evolved generation:
    the fitness-distribution skewness and the best-so-far cost.
    """

    generations_evolved: int
    lowest_cost: float
    optimum_hit: bool
    capped: bool
    skewness_trace: list[tuple[int, float]] = field(default_factory=list)
    cost_trace: list[tuple[int, float]] = field(default_factory=list)
    seed: int = 0
    trial_index: int = 0


def initialize_population(problem: Problem, n: int, rng: np.random.Generator) -> Population:
    """Random population of `n` genomes (fair coin bits or uniform keys), evaluated."""
    if n < 2:
        raise ConfigError(f"population size must be at least 2, got {n}")
    genomes = problem.random_genomes(n, rng)
    return Population(genomes, problem.evaluate(genomes), problem.kind, generation=0)


def _tournament_indices(costs: np.ndarray, k: int, shape, rng: np.random.Generator) -> np.ndarray:
    draws = rng.integers(0, len(costs), size=tuple(shape) + (k,))
    # argmin returns the first minimum, i.e. the earliest draw wins ties
    winner = np.argmin(costs[draws], axis=-1)
    return np.take_along_axis(draws, winner[..., None], axis=-1)[..., 0]


def tournament_select(pop: Population, k: int, rng: np.random.Generator) -> Individual:
    """Best of `k` members drawn uniformly with replacement."""
    if k < 1:
        raise ConfigError(f"tournament size must be at least 1, got {k}")
    if len(pop) == 0:
        raise ValueError("cannot select from an empty population")
    return pop[int(_tournament_indices(pop.costs, k, (), rng))]


def _crossover_batch(a: np.ndarray, b: np.ndarray, cuts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    head = np.arange(a.shape[-1]) < cuts[:, None]
    return np.where(head, a, b), np.where(head, b, a)


def one_point_crossover(a, b, rng: np.random.Generator, cut: int | None = None):
    """Swap the tails of `a` and `b` after a cut point drawn from ``1..L-1``.

    Works on bit and key genomes alike. Pass `cut` to fix the point.
    """
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape or a.dtype != b.dtype or a.ndim != 1:
        raise AssertionError("crossover parents must be 1-D genomes of the same type and length")
    length = a.shape[0]
    if length < 2:
        raise AssertionError("crossover needs genomes of length >= 2")
    if cut is None:
        cut = int(rng.integers(1, length))
    c1, c2 = _crossover_batch(a[None], b[None], np.array([cut]))
    return c1[0], c2[0]


def _mutate_batch(
    genomes: np.ndarray,
    p: np.ndarray,
    kind: GenomeKind,
    rng: np.random.Generator,
    scope: str = "gene",
) -> np.ndarray:
    if np.any(p < 0) or np.any(p > 1):
        raise AssertionError(f"mutation probabilities outside [0, 1]: {p}")
    if scope == "gene":
        mask = rng.random(genomes.shape) < p[:, None]
    else:
        # one randomly chosen gene per chromosome, with probability p
        rows = np.flatnonzero(rng.random(len(p)) < p)
        mask = np.zeros(genomes.shape, dtype=bool)
        mask[rows, rng.integers(0, genomes.shape[1], size=len(rows))] = True
    if kind is GenomeKind.BINARY:
        return genomes ^ mask.astype(genomes.dtype)
    return np.where(mask, rng.random(genomes.shape), genomes)


def mutate(
    genome,
    p: float,
    rng: np.random.Generator,
    kind: GenomeKind | None = None,
    scope: str = "gene",
) -> np.ndarray:
    """Mutate each gene independently with probability `p`.

    Bits are flipped; random keys are redrawn from ``U[0, 1)``. The genome
    kind is inferred from the dtype (integers are bits) unless given. With
    ``scope="chromosome"`` a single random gene is altered with probability
    `p` instead.
    """
    genome = np.asarray(genome)
    if kind is None:
        kind = GenomeKind.BINARY if np.issubdtype(genome.dtype, np.integer) else GenomeKind.RANDOM_KEY
    return _mutate_batch(genome[None], np.array([p], dtype=float), kind, rng, scope)[0]


def next_generation(
    pop: Population,
    cfg: GaConfig,
    policy: MutationPolicy,
    problem: Problem,
    rng: np.random.Generator,
) -> Population:
    """Breed a full replacement population.

    Parents are paired by two independent tournaments. Each pair is recombined
    with the crossover probability, otherwise copied, and every child is then
    mutated gene by gene at the rate the policy assigns it.

    With ``cfg.rate_basis == "offspring"`` (default) a child's rate comes from
    its own pre-mutation cost measured against the parent population. With
    ``"parent"`` child ``i`` of a pair takes the rate computed for parent
    ``i``. An odd population size drops the second child of the last pair.
    """
    n = len(pop)
    length = pop.genomes.shape[1]
    pairs = (n + 1) // 2

    if cfg.rate_basis == "parent":
        parent_p = np.asarray(policy.probabilities(pop.costs, rng), dtype=float)
    parents = _tournament_indices(pop.costs, cfg.tournament_size, (pairs, 2), rng)
    a, b = pop.genomes[parents[:, 0]], pop.genomes[parents[:, 1]]

    crossed = rng.random(pairs) < cfg.crossover_probability
    cuts = np.where(crossed, rng.integers(1, length, size=pairs), length)
    c1, c2 = _crossover_batch(a, b, cuts)
    children = np.stack([c1, c2], axis=1).reshape(2 * pairs, length)[:n]

    if cfg.rate_basis == "parent":
        child_p = parent_p[parents].reshape(2 * pairs)[:n]
        children = _mutate_batch(children, child_p, pop.kind, rng, cfg.mutation_scope)
        costs = problem.evaluate(children)
    else:
        # uncrossed children are parent copies whose cost is already known
        pre = np.where(np.repeat(crossed, 2)[:n], np.nan, pop.costs[parents].reshape(2 * pairs)[:n])
        fresh = np.isnan(pre)
        if fresh.any():
            pre[fresh] = problem.evaluate(children[fresh])
        child_p = np.asarray(policy.probabilities_against(pre, pop.costs, rng), dtype=float)
        mutated = _mutate_batch(children, child_p, pop.kind, rng, cfg.mutation_scope)
        changed = np.any(mutated != children, axis=1)
        children, costs = mutated, pre
        if changed.any():
            costs[changed] = problem.evaluate(children[changed])

    if cfg.elitism:
        elite = pop.best_index()
        worst = int(np.argmax(costs))
        if pop.costs[elite] < costs.min():
            children[worst] = pop.genomes[elite]
            costs[worst] = pop.costs[elite]

    return Population(children, costs, pop.kind, pop.generation + 1)


def run_until_converged(
    cfg: GaConfig,
    policy: MutationPolicy | None,
    problem: Problem,
    observer: GenerationObserver | None = None,
    rng: np.random.Generator | None = None,
) -> TrialResult:
    """Evolve until the best-so-far cost stalls for ``cfg.convergence_window`` generations.

    The run also stops at ``cfg.max_generations``, in which case the result
    is flagged `capped`. `policy` defaults to ``cfg.mutation_policy``.
    """
    policy = cfg.mutation_policy if policy is None else policy
    if rng is None:
        rng = np.random.default_rng(cfg.rng_seed)

    pop = initialize_population(problem, cfg.population_size, rng)
    best = float(pop.costs.min())
    stall = 0
    skew_trace: list[tuple[int, float]] = []
    cost_trace: list[tuple[int, float]] = []

    while stall < cfg.convergence_window and pop.generation < cfg.max_generations:
        pop = next_generation(pop, cfg, policy, problem, rng)
        current = float(pop.costs.min())
        if current < best:
            best = current
            stall = 0
        else:
            stall += 1
        skew = fitness_skewness(pop.costs)
        skew_trace.append((pop.generation, skew.value))
        cost_trace.append((pop.generation, best))
        if observer is not None:
            observer(
                GenerationStats(
                    generation=pop.generation,
                    best_cost=current,
                    best_so_far=best,
                    mean_cost=float(pop.costs.mean()),
                    skewness=skew.value,
                    skewness_degenerate=skew.degenerate,
                    costs=pop.costs.copy(),
                )
            )

    return TrialResult(
        generations_evolved=pop.generation,
        lowest_cost=best,
        optimum_hit=problem.hits_optimum(best),
        capped=stall < cfg.convergence_window,
        skewness_trace=skew_trace,
        cost_trace=cost_trace,
        seed=cfg.rng_seed,
    )
