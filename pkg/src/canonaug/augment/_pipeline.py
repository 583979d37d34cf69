"""Iterated augmentation: generate, simulate, filter, retrain."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np
from loguru import logger
from rust_ok import Err, Ok, Result

from ..config import PipelineConfig, SimulationConfig
from ..exceptions import CanonAugError, PipelineError
from ..lm import CompletionBackend, RemoteCompletionClient, complete_many, replay_from_env, train_ngram
from ..logger import log_counts, stage_logger
from ..parser import NoisyChannelParser, save_parser, train_parser
from ..pii import ReplacementPools, assert_no_leak
from ..scfg import Grammar
from ..utils import Tokens, write_json, write_jsonl
from ._datasets import CanonicalSet, SeedDataset, SilverPair, UnlabeledSet, merge_silver
from ._filters import cycle_filter, norank_filter, rerank_filter
from ._generate import GenerationOutcome, gen_from_d, gen_from_u, grammar_sample_set
from ._simulate import TranslationSimulator, build_simulation_request, postprocess_completions

STAGES = ("generate", "simulate", "filter", "retrain")


@dataclass(frozen=True, slots=True)
class IterationReport:
    """Counts of one augmentation iteration, stage by stage."""

    iteration: int
    generator: str
    filter: str
    stages: dict[str, dict[str, int | float]] = field(default_factory=dict)
    error: str | None = None

    @property
    def success(self) -> bool:
        """Return True if every stage completed."""
        return self.error is None

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready form written to ``report.json``."""
        return {
            "iteration": self.iteration,
            "generator": self.generator,
            "filter": self.filter,
            "stages": self.stages,
            "error": self.error,
        }

    def summary(self) -> None:
        """Display the stage counts as a rich table."""
        from rich.console import Console
        from rich.table import Table

        table = Table(show_header=True, header_style="bold cyan", title=f"Iteration {self.iteration}")
        table.add_column("Stage", style="cyan")
        table.add_column("Counts", style="white")
        for stage in STAGES:
            if stage in self.stages:
                counts = ", ".join(f"{key}={value}" for key, value in self.stages[stage].items())
                table.add_row(stage, counts)
        if self.error:
            table.add_row("[red]error[/red]", f"[red]{self.error}[/red]")
        Console().print(table)


@dataclass(frozen=True, slots=True)
class PipelineState:
    """Everything an iteration reads and the parser and silver data it produces."""

    grammar: Grammar
    pools: ReplacementPools
    seed: SeedDataset
    parser: NoisyChannelParser
    unlabeled: UnlabeledSet | None = None
    silver: tuple[SilverPair, ...] = ()
    canonicals: CanonicalSet | None = None
    iteration: int = 0
    reports: tuple[IterationReport, ...] = ()

    def training_pairs(self) -> list[tuple[Tokens, Tokens]]:
        """Seed pairs followed by silver pairs in key order."""
        return [*self.seed.pairs(), *((pair.natural, pair.canonical) for pair in self.silver)]


def init_state(
    grammar: Grammar,
    pools: ReplacementPools,
    seed: SeedDataset,
    config: PipelineConfig,
    *,
    unlabeled: UnlabeledSet | None = None,
) -> PipelineState:
    """Train the seed parser and wrap everything into an iteration-0 state."""
    parser = train_parser(seed.pairs(), config.parser, grammar=grammar, pools=pools)
    return PipelineState(grammar=grammar, pools=pools, seed=seed, parser=parser, unlabeled=unlabeled)


def build_backend(config: SimulationConfig, *, seed: int = 0) -> CompletionBackend:
    """Completion backend selected by ``config``, wrapped by the replay environment."""
    if config.backend == "remote":
        assert config.endpoint is not None
        client = RemoteCompletionClient(config.endpoint, timeout=config.timeout, retries=config.retries)
        return replay_from_env(client)
    return replay_from_env(TranslationSimulator(seed))


def _generate(
    state: PipelineState, config: PipelineConfig, rng: np.random.Generator
) -> Result[GenerationOutcome, CanonAugError]:
    try:
        if config.generator == "from_u":
            if state.unlabeled is None:
                return Err(PipelineError("The from_u generator needs an unlabeled set"))
            return Ok(gen_from_u(state.parser, state.unlabeled, state.pools, rng, replace=config.replace_pii))
        if config.generator == "from_d":
            lm = train_ngram(
                state.seed.canonicals,
                config.parser.order,
                config.parser.smoothing_alpha,
                extra_vocabulary=state.grammar.terminals,
            )
            return Ok(
                gen_from_d(
                    lm,
                    state.grammar,
                    state.seed,
                    state.pools,
                    config.n_generate,
                    rng,
                    params=config.decode,
                    plan_examples=config.plan_examples,
                )
            )
        return Ok(grammar_sample_set(state.grammar, state.pools, config.n_generate, rng, max_depth=config.max_depth))
    except CanonAugError as exc:
        return Err(exc)


def _simulate(
    state: PipelineState,
    canonicals: CanonicalSet,
    config: PipelineConfig,
    rng: np.random.Generator,
    backend: CompletionBackend,
) -> Result[list[list[Tokens]], CanonAugError]:
    try:
        requests = [build_simulation_request(state.seed, c, rng, config.simulation) for c in canonicals.canonicals]
        completions = complete_many(backend, requests, max_in_flight=config.simulation.max_in_flight)
    except CanonAugError as exc:
        return Err(exc)
    return Ok([postprocess_completions(texts) for texts in completions])


def _filter(
    state: PipelineState,
    canonicals: CanonicalSet,
    naturals: Sequence[list[Tokens]],
    config: PipelineConfig,
) -> Result[tuple[list[SilverPair], float | None], CanonAugError]:
    provenance = canonicals.provenance
    candidates = [
        (derivation, options) for derivation, options in zip(canonicals.items, naturals, strict=True) if options
    ]
    try:
        if config.filter == "cycle":
            outcome = cycle_filter(
                state.parser,
                [(derivation.canonical(), natural) for derivation, options in candidates for natural in options],
                provenance=provenance,
            )
            return Ok((list(outcome.accepted), outcome.rate))
        if config.filter == "norank":
            pairs = [
                norank_filter(d.canonical(), options, d, provenance=provenance) for d, options in candidates
            ]
            return Ok((pairs, None))
        pairs = [
            rerank_filter(state.parser, d.canonical(), options, config.rerank, derivation=d, provenance=provenance)
            for d, options in candidates
        ]
        return Ok((pairs, None))
    except CanonAugError as exc:
        return Err(exc)


def run_iteration(
    state: PipelineState,
    config: PipelineConfig,
    *,
    backend: CompletionBackend | None = None,
    state_dir: Path | str | None = None,
) -> PipelineState:
    """Run one generate, simulate, filter and retrain round.

    Silver pairs accumulate across iterations, unique by ``(canonical,
    natural)``; the parser is retrained on the seed plus all silver pairs. Every
    random choice derives from ``config.rng_seed`` and the iteration number.

    Parameters
    ----------
    state : PipelineState
        Output of :func:`init_state` or of a previous iteration.
    config : PipelineConfig
        Generator, filter and stage settings.
    backend : CompletionBackend | None
        Simulation backend; built from ``config.simulation`` when omitted.
    state_dir : Path | str | None
        When set, ``iter<k>/`` with canonical, silver, parser and report files
        is written below it.

    Raises
    ------
    PipelineError
        If a stage fails; ``report`` holds the counts gathered so far and the
        stage error is chained as ``__cause__``.
    """
    iteration = state.iteration + 1
    rng = np.random.default_rng([config.rng_seed, iteration])
    backend = backend or build_backend(config.simulation, seed=config.rng_seed)
    report = IterationReport(iteration=iteration, generator=config.generator, filter=config.filter)

    def _abort(stage: str, error: object) -> PipelineError:
        failed = replace(report, error=f"{stage}: {error}")
        logger.error("Iteration {} aborted in {}: {}", iteration, stage, error)
        return PipelineError(f"Iteration {iteration} failed in {stage}: {error}", report=failed.to_dict())

    log = stage_logger("generate", iteration=iteration)
    generated = _generate(state, config, rng)
    match generated:
        case Ok(outcome):
            canonicals = outcome.canonicals
            counts = {"attempted": outcome.attempted, "generated": outcome.generated, "skipped": outcome.skipped}
            if config.generator == "from_u" and config.replace_pii:
                counts["leaks"] = len(assert_no_leak(outcome.original_values, canonicals.canonicals))
            report.stages["generate"] = log_counts(log, "Generated canonical utterances", **counts)
        case Err(error):
            raise _abort("generate", error) from error

    log = stage_logger("simulate", iteration=iteration)
    simulated = _simulate(state, canonicals, config, rng, backend)
    match simulated:
        case Ok(naturals):
            report.stages["simulate"] = log_counts(
                log,
                "Simulated natural utterances",
                requested=len(canonicals) * config.simulation.k,
                simulated=sum(len(options) for options in naturals),
            )
        case Err(error):
            raise _abort("simulate", error) from error

    log = stage_logger("filter", iteration=iteration)
    filtered = _filter(state, canonicals, naturals, config)
    match filtered:
        case Ok((accepted, cycle_rate)):
            counts = {"candidates": sum(len(options) for options in naturals), "accepted": len(accepted)}
            if cycle_rate is not None:
                counts["cycle_rate"] = round(cycle_rate, 6)
            report.stages["filter"] = log_counts(log, "Filtered silver pairs", **counts)
        case Err(error):
            raise _abort("filter", error) from error

    silver = merge_silver(state.silver, accepted)
    next_state = replace(state, silver=silver, canonicals=canonicals, iteration=iteration)
    log = stage_logger("retrain", iteration=iteration)
    try:
        parser = train_parser(next_state.training_pairs(), config.parser, grammar=state.grammar, pools=state.pools)
    except CanonAugError as exc:
        raise _abort("retrain", exc) from exc
    report.stages["retrain"] = log_counts(
        log, "Retrained parser", seed=len(state.seed), silver=len(silver), new_silver=len(silver) - len(state.silver)
    )

    next_state = replace(next_state, parser=parser, reports=(*state.reports, report))
    if state_dir is not None:
        write_iteration(next_state, Path(state_dir))
    return next_state


def write_iteration(state: PipelineState, state_dir: Path) -> Path:
    """Write ``iter<k>/{canonical.jsonl, silver.jsonl, parser.bin, report.json}``."""
    folder = state_dir / f"iter{state.iteration}"
    folder.mkdir(parents=True, exist_ok=True)
    write_jsonl(folder / "canonical.jsonl", state.canonicals.to_records() if state.canonicals else [])
    write_jsonl(folder / "silver.jsonl", (pair.to_record() for pair in state.silver))
    save_parser(state.parser, folder / "parser.bin")
    write_json(folder / "report.json", state.reports[-1].to_dict() if state.reports else {})
    logger.debug("Wrote iteration {} to {}", state.iteration, folder)
    return folder


def run_pipeline(
    state: PipelineState,
    config: PipelineConfig,
    *,
    backend: CompletionBackend | None = None,
    state_dir: Path | str | None = None,
) -> PipelineState:
    """Run ``config.iterations`` iterations, sharing one backend."""
    backend = backend or build_backend(config.simulation, seed=config.rng_seed)
    for _ in range(config.iterations):
        state = run_iteration(state, config, backend=backend, state_dir=state_dir)
    return state
