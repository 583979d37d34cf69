"""Evaluation: top-1 exact match, paired t-tests, the synthetic benchmark and multi-trial runs."""

from __future__ import annotations

__all__ = [
    "BASELINE",
    "BenchmarkSplits",
    "NaturalRenderer",
    "PairedTTest",
    "SyntheticBenchmark",
    "TopOneParser",
    "TrialReport",
    "comparison_frame",
    "make_benchmark",
    "paired_ttest",
    "print_comparison",
    "run_methods",
    "run_trials",
    "sample_std",
    "top1_match",
    "trials_frame",
    "write_benchmark",
    "write_trials",
]

from ._benchmark import BenchmarkSplits, NaturalRenderer, SyntheticBenchmark, make_benchmark, write_benchmark
from ._metrics import TopOneParser, top1_match
from ._stats import PairedTTest, paired_ttest, sample_std
from ._trials import (
    BASELINE,
    TrialReport,
    comparison_frame,
    print_comparison,
    run_methods,
    run_trials,
    trials_frame,
    write_trials,
)
