"""Multi-trial campaigns, table metrics, CSV output and plots."""

from __future__ import annotations

import csv
import io
import math
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from rankga.core import ConfigError, GaConfig, TrialResult, run_until_converged
from rankga.policies import MutationPolicy
from rankga.problems import Problem
from rankga.stats import population_skewness  # noqa: F401  (re-exported)

ProgressSink = Callable[[int, int], None]

SUMMARY_FIELDS = [
    "campaign_id",
    "problem",
    "policy",
    "population_size",
    "trials",
    "avg_generations",
    "avg_lowest_cost",
    "optimum_count",
    "max_generations",
    "optimum_pct",
    "capped_count",
    "base_seed",
    "problem_checksum",
    "crossover_probability",
    "tournament_size",
    "convergence_window",
    "elitism",
    "rate_basis",
    "mutation_scope",
]

TRIAL_FIELDS = ["campaign_id", "trial", "seed", "generations_evolved", "lowest_cost", "optimum_hit", "capped"]


def trial_seed(base_seed: int, trial_index: int) -> int:
    """64-bit seed for one trial, hashed from the campaign seed and the trial index."""
    seq = np.random.SeedSequence([int(base_seed), int(trial_index)])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9.]+", "-", text).strip("-").lower()


@dataclass(frozen=True)
class CampaignConfig:
    problem: Problem
    policy: MutationPolicy
    ga: GaConfig
    trials: int = 200
    base_seed: int = 0

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError(f"trials must be at least 1, got {self.trials}")
        if not 0 <= self.base_seed < 2**64:
            raise ConfigError("base_seed must be an unsigned 64-bit integer")

    @property
    def campaign_id(self) -> str:
        policy = type(self.policy).__name__.lower()
        return f"{_slug(self.problem.name)}_{policy}_pop{self.ga.population_size}"


@dataclass(frozen=True)
class CampaignStats:
    trials: int
    avg_generations: float
    avg_lowest_cost: float
    optimum_count: int
    max_generations: int
    optimum_pct: float
    capped_count: int = 0

    @classmethod
    def from_trials(cls, results: Sequence[TrialResult]) -> CampaignStats:
        """Fold trial results into table metrics.

        Sums use ``math.fsum``, which is exactly rounded, so the result does
        not depend on the order of `results`.
        """
        n = len(results)
        if n == 0:
            raise ValueError("no trial results to aggregate")
        hits = sum(1 for r in results if r.optimum_hit)
        return cls(
            trials=n,
            avg_generations=math.fsum(r.generations_evolved for r in results) / n,
            avg_lowest_cost=math.fsum(r.lowest_cost for r in results) / n,
            optimum_count=hits,
            max_generations=max(r.generations_evolved for r in results),
            optimum_pct=100.0 * hits / n,
            capped_count=sum(1 for r in results if r.capped),
        )


@dataclass
class Campaign:
    """A finished campaign: its configuration, aggregate stats and every trial."""

    config: CampaignConfig
    stats: CampaignStats
    results: list[TrialResult]

    @property
    def campaign_id(self) -> str:
        return self.config.campaign_id


def _run_trial(cfg: CampaignConfig, index: int) -> TrialResult:
    seed = trial_seed(cfg.base_seed, index)
    ga = cfg.ga.replace(rng_seed=seed, mutation_policy=cfg.policy)
    result = run_until_converged(ga, cfg.policy, cfg.problem)
    result.trial_index = index
    return result


def _run_chunk(cfg: CampaignConfig, indices: list[int]) -> list[TrialResult]:
    return [_run_trial(cfg, i) for i in indices]


def run_campaign(
    cfg: CampaignConfig,
    progress: Optional[ProgressSink] = None,
    workers: int = 1,
) -> Campaign:
    """Run ``cfg.trials`` independent seeded trials and aggregate them.

    Trials may run in a pool of `workers` processes; results always come
    back ordered by trial index and each trial depends only on its own seed,
    so the outcome is the same for any worker count.
    """
    if workers < 1:
        raise ConfigError(f"workers must be at least 1, got {workers}")
    total = cfg.trials
    results: list[TrialResult] = []
    if workers == 1:
        for i in range(total):
            results.append(_run_trial(cfg, i))
            if progress:
                progress(i + 1, total)
    else:
        chunks = [list(range(start, total, workers * 4)) for start in range(min(total, workers * 4))]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            done = 0
            for chunk in pool.map(_run_chunk, [cfg] * len(chunks), chunks):
                results.extend(chunk)
                done += len(chunk)
                if progress:
                    progress(done, total)
        results.sort(key=lambda r: r.trial_index)
    return Campaign(cfg, CampaignStats.from_trials(results), results)


def late_skewness(result: TrialResult, window: int = 25) -> float:
    """Mean fitness skewness over the final `window` generations of a trial."""
    values = [s for _, s in result.skewness_trace[-window:]]
    return float(np.mean(values)) if values else 0.0


def median_trial(results: Sequence[TrialResult]) -> TrialResult:
    """The trial with the median lowest cost (lower median, earliest index on ties)."""
    ordered = sorted(results, key=lambda r: (r.lowest_cost, r.trial_index))
    return ordered[(len(ordered) - 1) // 2]


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def summary_row(campaign: Campaign) -> dict:
    cfg, stats = campaign.config, campaign.stats
    return {
        "campaign_id": campaign.campaign_id,
        "problem": cfg.problem.name,
        "policy": cfg.policy.describe(),
        "population_size": cfg.ga.population_size,
        "trials": stats.trials,
        "avg_generations": stats.avg_generations,
        "avg_lowest_cost": stats.avg_lowest_cost,
        "optimum_count": stats.optimum_count,
        "max_generations": stats.max_generations,
        "optimum_pct": stats.optimum_pct,
        "capped_count": stats.capped_count,
        "base_seed": cfg.base_seed,
        "problem_checksum": cfg.problem.checksum(),
        "crossover_probability": cfg.ga.crossover_probability,
        "tournament_size": cfg.ga.tournament_size,
        "convergence_window": cfg.ga.convergence_window,
        "elitism": cfg.ga.elitism,
        "rate_basis": cfg.ga.rate_basis,
        "mutation_scope": cfg.ga.mutation_scope,
    }


def _write_csv(path: Path, fields: list[str], rows: Iterable[dict]) -> Path:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _fmt(v) for k, v in row.items()})
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(buf.getvalue(), encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def write_results_csv(campaigns: Sequence[Campaign], out_dir: str | Path, name: str | None = None) -> list[Path]:
    """Write ``<name>_summary.csv`` (one row per campaign) and a ``_trials.csv`` per campaign.

    `name` defaults to the id of the single campaign given.
    """
    out_dir = Path(out_dir)
    if name is None:
        if len(campaigns) != 1:
            raise ValueError("a name is required when writing several campaigns")
        name = campaigns[0].campaign_id
    paths = [_write_csv(out_dir / f"{name}_summary.csv", SUMMARY_FIELDS, (summary_row(c) for c in campaigns))]
    for c in campaigns:
        rows = (
            {
                "campaign_id": c.campaign_id,
                "trial": r.trial_index,
                "seed": r.seed,
                "generations_evolved": r.generations_evolved,
                "lowest_cost": r.lowest_cost,
                "optimum_hit": r.optimum_hit,
                "capped": r.capped,
            }
            for r in c.results
        )
        paths.append(_write_csv(out_dir / f"{c.campaign_id}_trials.csv", TRIAL_FIELDS, rows))
    return paths


def read_trials_csv(path: str | Path) -> list[TrialResult]:
    """Load a per-trial CSV back into `TrialResult` objects (traces are not stored)."""
    with open(path, newline="", encoding="utf-8") as fh:
        return [
            TrialResult(
                generations_evolved=int(row["generations_evolved"]),
                lowest_cost=float(row["lowest_cost"]),
                optimum_hit=row["optimum_hit"] == "true",
                capped=row["capped"] == "true",
                seed=int(row["seed"]),
                trial_index=int(row["trial"]),
            )
            for row in csv.DictReader(fh)
        ]


def write_trace_csv(result: TrialResult, path_prefix: str | Path) -> tuple[Path, Path]:
    prefix = Path(path_prefix)
    cost = _write_csv(
        Path(f"{prefix}_cost.csv"),
        ["generation", "best_cost"],
        ({"generation": g, "best_cost": c} for g, c in result.cost_trace),
    )
    skew = _write_csv(
        Path(f"{prefix}_skew.csv"),
        ["generation", "skewness"],
        ({"generation": g, "skewness": s} for g, s in result.skewness_trace),
    )
    return cost, skew


def read_trace_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Read a two-column trace CSV into ``(generations, values)``."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2 or len(rows[0]) != 2:
        raise ValueError(f"{path}: not a trace CSV")
    data = np.array([[float(v) for v in row] for row in rows[1:]])
    return data[:, 0], data[:, 1]


def plot_trace(generations, values, path: str | Path, ylabel: str, title: str = "") -> Path:
    """Render one trace as an SVG line plot. Output is byte-stable for equal input."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = Path(path)
    with matplotlib.rc_context({"svg.hashsalt": "rankga", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(generations, values, linewidth=1.2)
        if ylabel.lower().startswith("skew"):
            ax.axhline(0.0, color="grey", linewidth=0.6)
        ax.set_xlabel("generation")
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        fig.tight_layout()
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            fig.savefig(path, format="svg", metadata={"Date": None})
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
        finally:
            plt.close(fig)
    return path


def emit_plots(result: TrialResult, path_prefix: str | Path, title: str = "") -> list[Path]:
    """Write cost and skewness traces of one trial as CSV and SVG."""
    if not result.cost_trace:
        raise ValueError("trial has an empty trace")
    cost_csv, skew_csv = write_trace_csv(result, path_prefix)
    g, c = zip(*result.cost_trace)
    gs, s = zip(*result.skewness_trace)
    cost_svg = plot_trace(g, c, f"{path_prefix}_cost.svg", "lowest cost", title)
    skew_svg = plot_trace(gs, s, f"{path_prefix}_skew.svg", "fitness skewness", title)
    return [cost_csv, cost_svg, skew_csv, skew_svg]


def format_table(campaigns: Sequence[Campaign]) -> str:
    """Aligned text table with the five result columns."""
    header = ["approach", "problem", "pop", "avg gens", "avg lowest cost", "optimum hits", "max gens", "optimum %"]
    rows = [
        [
            c.config.policy.describe(),
            c.config.problem.name,
            str(c.config.ga.population_size),
            f"{c.stats.avg_generations:.2f}",
            f"{c.stats.avg_lowest_cost:.6g}",
            f"{c.stats.optimum_count}/{c.stats.trials}",
            str(c.stats.max_generations),
            f"{c.stats.optimum_pct:.1f}%",
        ]
        for c in campaigns
    ]
    widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
    lines = ["  ".join(cell.ljust(w) if i < 2 else cell.rjust(w) for i, (cell, w) in enumerate(zip(r, widths))) for r in [header] + rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def default_workers() -> int:
    return max(1, min(4, os.cpu_count() or 1))
