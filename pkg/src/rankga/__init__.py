"""Genetic algorithm with constant, fitness-adaptive and rank-adaptive mutation."""

from rankga.core import (
    GaConfig,
    Individual,
    Population,
    TrialResult,
    initialize_population,
    mutate,
    next_generation,
    one_point_crossover,
    run_until_converged,
    tournament_select,
)
from rankga.policies import (
    Constant,
    FitnessAdaptive,
    MutationPolicy,
    RankAdaptive,
    assign_ranks,
    fitness_adaptive_p,
    fitness_of,
    probabilities_for,
    rank_adaptive_p,
)
from rankga.problems import Problem, f1_problem, f7_problem, problem_from_name, tsp_problem
from rankga.tsplib import TspInstance, TsplibError, load_tsplib, parse_tsplib

__all__ = [
    "Constant",
    "FitnessAdaptive",
    "GaConfig",
    "Individual",
    "MutationPolicy",
    "Population",
    "Problem",
    "RankAdaptive",
    "TrialResult",
    "TspInstance",
    "TsplibError",
    "assign_ranks",
    "f1_problem",
    "f7_problem",
    "fitness_adaptive_p",
    "fitness_of",
    "initialize_population",
    "load_tsplib",
    "mutate",
    "next_generation",
    "one_point_crossover",
    "parse_tsplib",
    "probabilities_for",
    "problem_from_name",
    "rank_adaptive_p",
    "run_until_converged",
    "tournament_select",
    "tsp_problem",
]

__version__ = "0.1.0"
