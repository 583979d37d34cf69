"""canonaug package public API with eager imports."""

from __future__ import annotations

from importlib.metadata import version

from loguru import logger
from rust_ok import Err, Ok, Result, is_err, is_ok

from .augment import (
    IterationReport,
    PipelineState,
    SeedDataset,
    SilverPair,
    TranslationSimulator,
    UnlabeledSet,
    cycle_filter,
    gen_from_d,
    gen_from_u,
    grammar_sample_set,
    init_state,
    rerank_filter,
    run_iteration,
    run_pipeline,
    simulate_naturals,
)
from .config import (
    BenchmarkConfig,
    DecodeParams,
    ParserConfig,
    PipelineConfig,
    RerankWeights,
    SimulationConfig,
    TrialsConfig,
    load_config,
    method_preset,
)
from .decoder import constrained_beam, constrained_sample
from .evaluation import SyntheticBenchmark, TrialReport, make_benchmark, paired_ttest, run_trials, top1_match
from .exceptions import CanonAugError, CLIError, NoParseError, PipelineError, RemoteError
from .lm import NGramModel, RemoteCompletionClient, TokenLM, train_ngram
from .parser import NoisyChannelParser, load_parser, parse_top1, save_parser, score_parse, train_parser
from .pii import ReplacementPools, assert_no_leak, detect_pii, replace_pii
from .scfg import Derivation, Grammar, load_grammar, load_grammar_file, parse_canonical, prefix_allowed

__version__ = version("canonaug")

# Silence the library's logger by default; application code can configure it.
logger.disable("canonaug")


__all__ = [
    "BenchmarkConfig",
    "CLIError",
    "CanonAugError",
    "DecodeParams",
    "Derivation",
    "Err",
    "Grammar",
    "IterationReport",
    "NGramModel",
    "NoParseError",
    "NoisyChannelParser",
    "Ok",
    "ParserConfig",
    "PipelineConfig",
    "PipelineError",
    "PipelineState",
    "RemoteCompletionClient",
    "RemoteError",
    "ReplacementPools",
    "RerankWeights",
    "Result",
    "SeedDataset",
    "SilverPair",
    "SimulationConfig",
    "SyntheticBenchmark",
    "TokenLM",
    "TranslationSimulator",
    "TrialReport",
    "TrialsConfig",
    "UnlabeledSet",
    "assert_no_leak",
    "constrained_beam",
    "constrained_sample",
    "cycle_filter",
    "detect_pii",
    "gen_from_d",
    "gen_from_u",
    "grammar_sample_set",
    "init_state",
    "is_err",
    "is_ok",
    "load_config",
    "load_grammar",
    "load_grammar_file",
    "load_parser",
    "make_benchmark",
    "method_preset",
    "paired_ttest",
    "parse_canonical",
    "parse_top1",
    "prefix_allowed",
    "replace_pii",
    "rerank_filter",
    "run_iteration",
    "run_pipeline",
    "run_trials",
    "save_parser",
    "score_parse",
    "simulate_naturals",
    "top1_match",
    "train_ngram",
    "train_parser",
]
