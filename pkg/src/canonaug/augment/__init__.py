"""Augmentation: generate canonical utterances, simulate naturals, filter, retrain.

Three generators produce canonical sets: :func:`gen_from_u` parses unlabeled
utterances and replaces their PII, :func:`gen_from_d` samples from a language
model under the grammar constraint, :func:`grammar_sample_set` samples the
grammar directly. Natural paraphrases come from a :class:`~canonaug.lm.CompletionBackend`
and pass through one of three filters before the parser is retrained on the
seed plus the accumulated silver pairs.
"""

from __future__ import annotations

__all__ = [
    "CANONICAL_PREFIX",
    "NATURAL_PREFIX",
    "CanonicalSet",
    "CycleOutcome",
    "GenerationOutcome",
    "IterationReport",
    "PipelineState",
    "Provenance",
    "RerankWeights",
    "SeedDataset",
    "SeedExample",
    "SilverFilter",
    "SilverPair",
    "TranslationSimulator",
    "UnlabeledSet",
    "build_backend",
    "build_simulation_request",
    "cycle_filter",
    "edit_distance",
    "format_simulation_prompt",
    "gen_from_d",
    "gen_from_u",
    "grammar_sample_set",
    "init_state",
    "merge_silver",
    "norank_filter",
    "parse_simulation_prompt",
    "postprocess_completions",
    "read_pairs",
    "rerank_filter",
    "rerank_score",
    "run_iteration",
    "run_pipeline",
    "simulate_naturals",
    "write_iteration",
    "write_pairs",
]

from ..config import RerankWeights
from ._datasets import (
    CanonicalSet,
    Provenance,
    SeedDataset,
    SeedExample,
    SilverFilter,
    SilverPair,
    UnlabeledSet,
    merge_silver,
    read_pairs,
    write_pairs,
)
from ._filters import CycleOutcome, cycle_filter, edit_distance, norank_filter, rerank_filter, rerank_score
from ._generate import GenerationOutcome, gen_from_d, gen_from_u, grammar_sample_set
from ._pipeline import (
    IterationReport,
    PipelineState,
    build_backend,
    init_state,
    run_iteration,
    run_pipeline,
    write_iteration,
)
from ._simulate import (
    CANONICAL_PREFIX,
    NATURAL_PREFIX,
    TranslationSimulator,
    build_simulation_request,
    format_simulation_prompt,
    parse_simulation_prompt,
    postprocess_completions,
    simulate_naturals,
)
