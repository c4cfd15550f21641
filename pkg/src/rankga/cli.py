"""Command-line front end.

    rankga run   --problem f1 --policy rank --pmax 0.1 --pop 10 --trials 200
    rankga suite --problem f7 --pop 10 --pop 20
    rankga plot  results/f1_rankadaptive_pop10_trial17_skew.csv

Any option may also come from a JSON file passed with ``--config``; flags
given on the command line override values from the file. Every run writes its
fully resolved settings to ``<id>_runspec.json`` in the output directory, and
that file can be fed back through ``--config`` to repeat the run.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from rankga.core import MUTATION_SCOPES, RATE_BASES, ConfigError, GaConfig
from rankga.experiment import (
    CampaignConfig,
    emit_plots,
    format_table,
    median_trial,
    plot_trace,
    read_trace_csv,
    run_campaign,
    write_results_csv,
)
from rankga.policies import FITNESS_TRANSFORMS, make_policy
from rankga.problems import problem_from_name
from rankga.tsplib import TsplibError

OUTPUT_ENV = "RANKGA_OUTPUT_DIR"
SUITE_POLICIES = ("sga", "fitness", "rank")
SUITE_POPULATIONS = {"f1": (10, 20), "f7": (10, 20), "tsp": (250, 500)}


@dataclass
class RunSpec:
    command: str = "run"
    problem: str = "f1"
    policy: str = "rank"
    p: Optional[float] = None
    pmax: Optional[float] = None
    populations: list[int] = field(default_factory=list)
    trials: int = 200
    seed: int = 0
    output: str = ""
    workers: int = 1
    crossover_probability: float = 0.8
    tournament_size: int = 2
    convergence_window: int = 50
    max_generations: int = 10_000
    elitism: bool = False
    rate_basis: str = "offspring"
    mutation_scope: str = "gene"
    fitness_transform: str = "worst-minus-cost"
    tsplib_rounding: bool = False
    target: Optional[float] = None
    tolerance: Optional[float] = None
    plot_trial: Optional[int] = None
    no_plots: bool = False

    def resolved_populations(self) -> list[int]:
        if self.populations:
            return list(self.populations)
        kind = "tsp" if self.problem.lower().startswith("tsp:") else self.problem.lower()
        defaults = SUITE_POPULATIONS.get(kind, (10,))
        return list(defaults) if self.command == "suite" else [defaults[0]]


class UsageError(Exception):
    pass


def _probability(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"probability must lie in [0, 1], got {text}")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rankga", description="Adaptive-mutation GA benchmarks.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def campaign_options(p: argparse.ArgumentParser, suite: bool) -> None:
        # defaults are None so that a config file can fill in whatever was not given
        p.add_argument("--config", help="JSON file with any of the options below")
        p.add_argument("--problem", help="f1, f7, tsp:<path> or tsp:wi29 (bundled)")
        if not suite:
            p.add_argument("--policy", choices=["sga", "constant", "fitness", "rank"])
            p.add_argument("--p", type=_probability, help="constant mutation probability (default 0.05)")
        p.add_argument("--pmax", type=_probability, help="maximum adaptive mutation probability (default 0.1)")
        p.add_argument("--pop", dest="populations", type=_positive, action="append", help="population size (repeatable)")
        p.add_argument("--trials", type=_positive)
        p.add_argument("--seed", type=_seed)
        p.add_argument("--output", "-o", help=f"output directory (default ${OUTPUT_ENV} or ./results)")
        p.add_argument("--workers", type=_positive, help="parallel worker processes")
        p.add_argument("--crossover", dest="crossover_probability", type=_probability)
        p.add_argument("--tournament", dest="tournament_size", type=_positive)
        p.add_argument("--window", dest="convergence_window", type=_positive)
        p.add_argument("--max-generations", type=_positive)
        p.add_argument("--elitism", action=argparse.BooleanOptionalAction, default=None)
        p.add_argument("--rate-basis", choices=RATE_BASES)
        p.add_argument("--mutation-scope", choices=MUTATION_SCOPES)
        p.add_argument("--fitness-transform", choices=FITNESS_TRANSFORMS)
        p.add_argument("--tsplib-rounding", action=argparse.BooleanOptionalAction, default=None)
        p.add_argument("--target", type=float, help="optimum target cost")
        p.add_argument("--tolerance", type=float, help="optimum tolerance")
        p.add_argument("--plot-trial", type=int, help="trial index to plot (default: median-cost trial)")
        p.add_argument("--no-plots", action="store_true", default=None)

    campaign_options(sub.add_parser("run", help="run one campaign"), suite=False)
    campaign_options(sub.add_parser("suite", help="all policies x population sizes for one problem"), suite=True)

    plot = sub.add_parser("plot", help="re-render SVG plots from trace CSV files")
    plot.add_argument("traces", nargs="+", help="*_cost.csv or *_skew.csv files")
    return parser


def parse_args(argv: list[str]) -> RunSpec | argparse.Namespace:
    """Turn `argv` into a `RunSpec` (or a namespace for ``plot``).

    Raises `UsageError` for bad or missing arguments.
    """
    parser = build_parser()
    if not argv:
        parser.print_help(sys.stderr)
        raise UsageError("no command given")
    args = parser.parse_args(argv)
    if args.command == "plot":
        return args

    values: dict = {}
    if args.config:
        try:
            values.update(json.loads(Path(args.config).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file {args.config}: {exc}") from None
        known = {f.name for f in dataclasses.fields(RunSpec)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise UsageError(f"unknown keys in {args.config}: {', '.join(unknown)}")
    for key, value in vars(args).items():
        if key != "config" and value is not None:
            values[key] = value
    values["command"] = args.command
    if not values.get("output"):
        values["output"] = os.environ.get(OUTPUT_ENV, "results")

    spec = RunSpec(**values)
    _validate(spec)
    return spec


def _validate(spec: RunSpec) -> None:
    for name in ("p", "pmax", "crossover_probability"):
        value = getattr(spec, name)
        if value is not None and not 0.0 <= value <= 1.0:
            raise UsageError(f"{name} must lie in [0, 1], got {value}")
    if spec.problem.lower().startswith("tsp") and spec.problem.strip().lower() in ("tsp", "tsp:"):
        raise UsageError("TSP problems need a path: --problem tsp:<path>")
    if spec.rate_basis not in RATE_BASES:
        raise UsageError(f"rate_basis must be one of {RATE_BASES}")
    if spec.mutation_scope not in MUTATION_SCOPES:
        raise UsageError(f"mutation_scope must be one of {MUTATION_SCOPES}")
    if spec.fitness_transform not in FITNESS_TRANSFORMS:
        raise UsageError(f"fitness_transform must be one of {FITNESS_TRANSFORMS}")


def _policy_for(spec: RunSpec, name: str):
    if name in ("sga", "constant"):
        return make_policy(name, spec.p)
    return make_policy(name, spec.pmax, spec.fitness_transform)


def campaign_configs(spec: RunSpec) -> list[CampaignConfig]:
    problem = problem_from_name(
        spec.problem, target_cost=spec.target, tolerance=spec.tolerance, rounded=spec.tsplib_rounding
    )
    policies = SUITE_POLICIES if spec.command == "suite" else (spec.policy,)
    configs = []
    for pop in spec.resolved_populations():
        for name in policies:
            policy = _policy_for(spec, name)
            ga = GaConfig(
                population_size=pop,
                crossover_probability=spec.crossover_probability,
                mutation_policy=policy,
                tournament_size=spec.tournament_size,
                convergence_window=spec.convergence_window,
                max_generations=spec.max_generations,
                rng_seed=spec.seed,
                elitism=spec.elitism,
                rate_basis=spec.rate_basis,
                mutation_scope=spec.mutation_scope,
            )
            configs.append(CampaignConfig(problem, policy, ga, trials=spec.trials, base_seed=spec.seed))
    return configs


def _progress(label: str):
    if not sys.stderr.isatty():
        return None

    def sink(done: int, total: int) -> None:
        end = "\n" if done == total else ""
        print(f"\r{label}: {done}/{total} trials", end=end, file=sys.stderr, flush=True)

    return sink


def execute(spec: RunSpec) -> int:
    out = Path(spec.output)
    configs = campaign_configs(spec)
    campaigns = [run_campaign(c, progress=_progress(c.campaign_id), workers=spec.workers) for c in configs]

    if spec.command == "suite":
        name = f"{configs[0].campaign_id.split('_')[0]}_suite"
    else:
        name = configs[0].campaign_id
    write_results_csv(campaigns, out, name)

    if not spec.no_plots:
        for c in campaigns:
            if spec.plot_trial is not None:
                if not 0 <= spec.plot_trial < len(c.results):
                    raise UsageError(f"--plot-trial must be in [0, {len(c.results) - 1}]")
                trial = c.results[spec.plot_trial]
            else:
                trial = median_trial(c.results)
            prefix = out / f"{c.campaign_id}_trial{trial.trial_index}"
            emit_plots(trial, prefix, title=f"{c.config.problem.name}, {c.config.policy.describe()}, N={c.config.ga.population_size}")

    runspec_path = out / f"{name}_runspec.json"
    provenance = {k: v for k, v in dataclasses.asdict(spec).items() if k != "command"}
    provenance["populations"] = spec.resolved_populations()
    runspec_path.write_text(json.dumps(provenance, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    print(format_table(campaigns))
    print(f"\nresults written to {out}/{name}_summary.csv")
    return 0


def plot_command(args: argparse.Namespace) -> int:
    for trace in args.traces:
        gens, values = read_trace_csv(trace)
        ylabel = "fitness skewness" if trace.endswith("_skew.csv") else "lowest cost"
        svg = plot_trace(gens, values, str(trace)[: -len(".csv")] + ".svg", ylabel)
        print(svg)
    return 0


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        spec = parse_args(argv)
        if isinstance(spec, argparse.Namespace):
            return plot_command(spec)
        return execute(spec)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except (ConfigError, TsplibError, ValueError, OSError) as exc:
        print(f"rankga: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
