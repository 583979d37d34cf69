"""Multi-trial comparison of augmentation methods on a synthetic benchmark."""

from __future__ import annotations

from collections.abc import Callable, Mapping
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import polars as pl
from loguru import logger

from ..augment import build_backend, init_state, run_pipeline
from ..config import PipelineConfig, TrialsConfig
from ..exceptions import DegenerateInputError
from ..lm import CompletionBackend
from ..utils import write_json
from ._benchmark import SyntheticBenchmark
from ._metrics import top1_match
from ._stats import paired_ttest, sample_std

BASELINE = "baseline"

BackendFactory = Callable[[PipelineConfig], CompletionBackend]


@dataclass(frozen=True, slots=True)
class TrialReport:
    """Per-trial top-1 percentages of one method."""

    method: str
    scores: tuple[float, ...]
    seeds: tuple[int, ...]

    def __post_init__(self) -> None:
        """Scores and seeds pair up one to one."""
        if len(self.scores) != len(self.seeds):
            raise ValueError("Every trial score needs its seed")

    @property
    def mean(self) -> float:
        """Mean top-1 percentage."""
        return float(np.mean(self.scores)) if self.scores else 0.0

    @property
    def std(self) -> float:
        """Sample standard deviation of the top-1 percentages."""
        return sample_std(self.scores)

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready form."""
        return {
            "method": self.method,
            "scores": list(self.scores),
            "seeds": list(self.seeds),
            "mean": self.mean,
            "std": self.std,
        }


def run_trials(
    benchmark: SyntheticBenchmark,
    config: PipelineConfig,
    n_trials: int,
    base_seed: int = 0,
    *,
    method: str = "method",
    backend_factory: BackendFactory | None = None,
) -> TrialReport:
    """Run ``config`` on ``n_trials`` fresh benchmark draws.

    Trial ``i`` uses seed ``base_seed + i`` both for sampling the splits and as
    the pipeline seed, so methods run with the same ``base_seed`` see the same
    seed and unlabeled data trial by trial.

    Parameters
    ----------
    benchmark : SyntheticBenchmark
        Gold data source.
    config : PipelineConfig
        Method to evaluate; ``rng_seed`` is replaced per trial.
    n_trials : int
        Number of trials, at least 2.
    base_seed : int
        Seed of the first trial.
    method : str
        Name recorded in the report.
    backend_factory : BackendFactory | None
        Builds the simulation backend of each trial; defaults to
        :func:`~canonaug.augment.build_backend`.

    Raises
    ------
    ValueError
        If ``n_trials < 2``.
    CanonAugError
        Propagated from any trial; a failed trial aborts the report.
    """
    if n_trials < 2:
        raise ValueError(f"n_trials must be >= 2, got {n_trials}")
    scores: list[float] = []
    seeds: list[int] = []
    for index in range(n_trials):
        seed = base_seed + index
        trial_config = config.model_copy(update={"rng_seed": seed})
        splits = benchmark.sample(np.random.default_rng(seed))
        state = init_state(benchmark.grammar, benchmark.pools, splits.seed, trial_config, unlabeled=splits.unlabeled)
        if trial_config.iterations:
            backend = (
                backend_factory(trial_config)
                if backend_factory
                else build_backend(trial_config.simulation, seed=seed)
            )
            state = run_pipeline(state, trial_config, backend=backend)
        score = top1_match(state.parser, splits.test)
        logger.info("{} trial {} (seed {}): top-1 {:.1f}", method, index, seed, score)
        scores.append(score)
        seeds.append(seed)
    return TrialReport(method=method, scores=tuple(scores), seeds=tuple(seeds))


def run_methods(
    config: TrialsConfig,
    *,
    benchmark: SyntheticBenchmark | None = None,
    backend_factory: BackendFactory | None = None,
) -> dict[str, TrialReport]:
    """Run every method of ``config`` on shared trial seeds, in name order."""
    benchmark = benchmark or SyntheticBenchmark.from_config(config.benchmark)
    return {
        name: run_trials(
            benchmark,
            config.methods[name],
            config.n_trials,
            config.base_seed,
            method=name,
            backend_factory=backend_factory,
        )
        for name in sorted(config.methods)
    }


def trials_frame(reports: Mapping[str, TrialReport]) -> pl.DataFrame:
    """Long table with one row per method and trial."""
    return pl.DataFrame(
        [
            {"method": name, "trial": index, "seed": seed, "top1": score}
            for name, report in sorted(reports.items())
            for index, (seed, score) in enumerate(zip(report.seeds, report.scores, strict=True))
        ],
        schema={"method": pl.String, "trial": pl.Int64, "seed": pl.Int64, "top1": pl.Float64},
    )


def comparison_frame(reports: Mapping[str, TrialReport], *, baseline: str = BASELINE) -> pl.DataFrame:
    """Mean, std and the paired t-test against ``baseline`` per method.

    ``t`` and ``p`` are null for the baseline itself, when no baseline was run,
    and when the paired differences are degenerate.
    """
    anchor = reports.get(baseline)
    rows = []
    for name, report in sorted(reports.items()):
        statistic: float | None = None
        pvalue: float | None = None
        if anchor is not None and name != baseline:
            if report.seeds != anchor.seeds:
                raise ValueError(f"{name} and {baseline} were run on different trial seeds")
            try:
                statistic, pvalue, _ = paired_ttest(report.scores, anchor.scores)
            except DegenerateInputError:
                logger.warning("Paired t-test of {} against {} is undefined", name, baseline)
        rows.append({"method": name, "mean": report.mean, "std": report.std, "t": statistic, "p": pvalue})
    return pl.DataFrame(
        rows,
        schema={"method": pl.String, "mean": pl.Float64, "std": pl.Float64, "t": pl.Float64, "p": pl.Float64},
    )


def print_comparison(frame: pl.DataFrame, *, title: str = "Top-1 match (%)") -> None:
    """Render a comparison frame as a rich table."""
    from rich.console import Console
    from rich.table import Table

    table = Table(show_header=True, header_style="bold cyan", title=title)
    table.add_column("Method", style="cyan")
    table.add_column("Top-1", justify="right", style="yellow")
    table.add_column("t", justify="right")
    table.add_column("p", justify="right")
    for row in frame.iter_rows(named=True):
        t = "[dim]-[/dim]" if row["t"] is None else f"{row['t']:.3f}"
        p = "[dim]-[/dim]" if row["p"] is None else f"{row['p']:.4f}"
        table.add_row(row["method"], f"{row['mean']:.1f} ± {row['std']:.1f}", t, p)
    Console().print(table)


def write_trials(reports: Mapping[str, TrialReport], folder: Path | str, *, baseline: str = BASELINE) -> Path:
    """Write one ``<method>.json`` report per method plus ``trials.csv`` and ``comparison.csv``."""
    folder = Path(folder)
    folder.mkdir(parents=True, exist_ok=True)
    for name, report in reports.items():
        write_json(folder / f"{name}.json", report.to_dict())
    trials_frame(reports).write_csv(folder / "trials.csv")
    comparison_frame(reports, baseline=baseline).write_csv(folder / "comparison.csv")
    return folder
