"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 remote-service error.
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any, NoReturn

import numpy as np
from loguru import logger
from pydantic import ValidationError

from .augment import SeedDataset, UnlabeledSet, init_state, read_pairs, run_pipeline
from .config import BenchmarkConfig, PipelineConfig, TrialsConfig, load_config, method_preset
from .evaluation import (
    SyntheticBenchmark,
    comparison_frame,
    print_comparison,
    run_methods,
    top1_match,
    write_benchmark,
    write_trials,
)
from .exceptions import CanonAugError, CLIError, RemoteError
from .lm import RemoteCompletionClient, replay_from_env
from .logger import setup_logging
from .parser import load_parser, save_parser, train_parser
from .pii import ReplacementPools, fill_pool
from .scfg import Grammar, load_grammar_file
from .utils import merge_with_overrides, parse_override, reset_directory

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_REMOTE = 3


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        raise CLIError(message)


def _overrides(assignments: Sequence[str] | None) -> dict[str, Any]:
    merged: dict[str, Any] = {}
    for assignment in assignments or ():
        try:
            merged = merge_with_overrides(merged, overrides=parse_override(assignment))
        except ValueError as exc:
            raise CLIError(str(exc)) from exc
    return merged


def _pipeline_config(args: argparse.Namespace) -> PipelineConfig:
    overrides = _overrides(args.set)
    if args.config:
        return load_config(args.config, PipelineConfig, overrides=overrides)
    if args.method:
        try:
            return method_preset(args.method, **overrides)
        except KeyError as exc:
            raise CLIError(str(exc)) from exc
    return PipelineConfig.model_validate(overrides)


def _grammar_and_pools(args: argparse.Namespace) -> tuple[Grammar, ReplacementPools]:
    return load_grammar_file(args.grammar), ReplacementPools.from_directory(args.pools)


def _cmd_train(args: argparse.Namespace) -> int:
    grammar, pools = _grammar_and_pools(args)
    config = _pipeline_config(args)
    seed = SeedDataset.read(args.seed, grammar)
    parser = train_parser(seed.pairs(), config.parser, grammar=grammar, pools=pools)
    save_parser(parser, args.out)
    logger.info("Trained parser on {} seed pairs -> {}", len(seed), args.out)
    return EXIT_OK


def _cmd_augment(args: argparse.Namespace) -> int:
    grammar, pools = _grammar_and_pools(args)
    config = _pipeline_config(args)
    if args.iterations is not None:
        config = config.model_copy(update={"iterations": args.iterations})
    seed = SeedDataset.read(args.seed, grammar)
    unlabeled = UnlabeledSet.read(args.unlabeled) if args.unlabeled else None
    if args.state_dir:
        reset_directory(args.state_dir)
    state = init_state(grammar, pools, seed, config, unlabeled=unlabeled)
    state = run_pipeline(state, config, state_dir=args.state_dir)
    for report in state.reports:
        report.summary()
    if args.out:
        save_parser(state.parser, args.out)
    return EXIT_OK


def _cmd_eval(args: argparse.Namespace) -> int:
    grammar, pools = _grammar_and_pools(args)
    parser = load_parser(args.parser, grammar=grammar, pools=pools)
    test = read_pairs(args.test)
    score = top1_match(parser, test)
    print(f"top1 {score:.2f} ({len(test)} utterances)")
    return EXIT_OK


def _cmd_trials(args: argparse.Namespace) -> int:
    overrides = _overrides(args.set)
    if args.n_trials is not None:
        overrides = merge_with_overrides(overrides, overrides={"n_trials": args.n_trials})
    if args.base_seed is not None:
        overrides = merge_with_overrides(overrides, overrides={"base_seed": args.base_seed})
    if args.methods:
        overrides = merge_with_overrides(overrides, overrides={"methods": list(args.methods)})
    if args.config:
        config = load_config(args.config, TrialsConfig, overrides=overrides)
    else:
        config = TrialsConfig.model_validate(overrides)
    reports = run_methods(config)
    print_comparison(comparison_frame(reports))
    if args.out:
        write_trials(reports, args.out)
    return EXIT_OK


def _cmd_pools_fill(args: argparse.Namespace) -> int:
    pools = ReplacementPools.from_directory(args.pools)
    with RemoteCompletionClient(args.endpoint, retries=args.retries) as client:
        filled = fill_pool(replay_from_env(client), pools, args.category, args.count)
    filled.to_directory(args.out or args.pools)
    return EXIT_OK


def _cmd_bench_make(args: argparse.Namespace) -> int:
    config = (
        load_config(args.config, BenchmarkConfig, overrides=_overrides(args.set))
        if args.config
        else BenchmarkConfig.model_validate(_overrides(args.set))
    )
    benchmark = SyntheticBenchmark.from_config(config)
    splits = benchmark.sample(np.random.default_rng(args.rng_seed))
    write_benchmark(benchmark, splits, args.out)
    logger.info("Wrote benchmark splits to {}", args.out)
    return EXIT_OK


def _add_grammar_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--grammar", type=Path, required=True, help="grammar file")
    parser.add_argument("--pools", type=Path, required=True, help="replacement pool directory")


def _add_config_arguments(parser: argparse.ArgumentParser, *, presets: bool = True) -> None:
    parser.add_argument("--config", type=Path, help="JSON config file")
    if presets:
        parser.add_argument("--method", help="named method preset, used when --config is absent")
    parser.add_argument(
        "--set", action="append", metavar="KEY=VALUE", help="override a config value, e.g. rerank.beta=0"
    )


def build_parser() -> argparse.ArgumentParser:
    """Argument parser for every subcommand."""
    parser = _ArgumentParser(prog="canonaug", description="Privacy-preserving augmentation for semantic parsers")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for stage summaries, -vv for details")
    parser.add_argument("--log-file", help="also write every log record to this file")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    train = commands.add_parser("train", help="train a parser on seed pairs")
    _add_grammar_arguments(train)
    _add_config_arguments(train)
    train.add_argument("--seed", type=Path, required=True, help="seed pairs (JSONL)")
    train.add_argument("--out", type=Path, required=True, help="parser file to write")
    train.set_defaults(handler=_cmd_train)

    augment = commands.add_parser("augment", help="run augmentation iterations")
    _add_grammar_arguments(augment)
    _add_config_arguments(augment)
    augment.add_argument("--seed", type=Path, required=True, help="seed pairs (JSONL)")
    augment.add_argument("--unlabeled", type=Path, help="unlabeled utterances (JSONL)")
    augment.add_argument("--iterations", type=int, help="override the configured iteration count")
    augment.add_argument("--state-dir", type=Path, help="write iter<k>/ state below this directory")
    augment.add_argument("--out", type=Path, help="write the final parser here")
    augment.set_defaults(handler=_cmd_augment)

    evaluate = commands.add_parser("eval", help="top-1 exact match of a parser on a test file")
    _add_grammar_arguments(evaluate)
    evaluate.add_argument("--parser", type=Path, required=True, help="parser file")
    evaluate.add_argument("--test", type=Path, required=True, help="test pairs (JSONL)")
    evaluate.set_defaults(handler=_cmd_eval)

    trials = commands.add_parser("trials", help="compare methods over paired trials")
    _add_config_arguments(trials, presets=False)
    trials.add_argument("--n-trials", type=int, help="trials per method")
    trials.add_argument("--base-seed", type=int, help="seed of the first trial")
    trials.add_argument("--methods", nargs="+", help="method presets to compare")
    trials.add_argument("--out", type=Path, help="directory for reports and tables")
    trials.set_defaults(handler=_cmd_trials)

    pools = commands.add_parser("pools", help="replacement pool tools")
    pool_commands = pools.add_subparsers(dest="pools_command", required=True, parser_class=_ArgumentParser)
    fill = pool_commands.add_parser("fill", help="add values to a pool through the remote service")
    fill.add_argument("--pools", type=Path, required=True, help="pool directory to extend")
    fill.add_argument("--category", required=True, help="slot category")
    fill.add_argument("--count", type=int, required=True, help="values to add")
    fill.add_argument("--endpoint", required=True, help="completion service address")
    fill.add_argument("--retries", type=int, default=3, help="retries after transient failures")
    fill.add_argument("--out", type=Path, help="write here instead of updating --pools")
    fill.set_defaults(handler=_cmd_pools_fill)

    bench = commands.add_parser("bench", help="synthetic benchmark tools")
    bench_commands = bench.add_subparsers(dest="bench_command", required=True, parser_class=_ArgumentParser)
    make = bench_commands.add_parser("make", help="write seed, unlabeled and test splits")
    _add_config_arguments(make, presets=False)
    make.add_argument("--rng-seed", type=int, default=0, help="seed of the draw")
    make.add_argument("--out", type=Path, required=True, help="output directory")
    make.set_defaults(handler=_cmd_bench_make)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, run the command and map failures to exit codes."""
    try:
        args = build_parser().parse_args(argv)
    except CLIError as exc:
        print(f"canonaug: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    setup_logging(args.verbose, log_file=args.log_file)

    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        return handler(args)
    except CLIError as exc:
        logger.error("{}", exc)
        return EXIT_USAGE
    except RemoteError as exc:
        logger.error("Remote service error: {}", exc)
        return EXIT_REMOTE
    except (CanonAugError, ValidationError, ValueError, KeyError, FileNotFoundError) as exc:
        logger.error("{}", exc)
        # A pipeline stage that failed on the completion service chains the remote error.
        return EXIT_REMOTE if isinstance(exc.__cause__, RemoteError) else EXIT_DATA


def main() -> None:
    """Console entry point."""
    sys.exit(run())
