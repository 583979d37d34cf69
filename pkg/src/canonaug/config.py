"""Configuration models for decoding, parsing, simulation, pipelines and trials.

Every tunable is a pydantic field with an explicit default. Config files are
JSON; :func:`load_config` reads one into any of these models after merging
command-line overrides into it.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Literal, TypeVar

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .utils import merge_with_overrides, read_json

DATA_DIR = Path(__file__).parent / "data"
TOYCAL_DIR = DATA_DIR / "toycal"

Generator = Literal["from_u", "from_d", "grammar_sample"]
FilterKind = Literal["rerank", "cycle", "norank"]

ConfigT = TypeVar("ConfigT", bound=BaseModel)


class _Config(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class DecodeParams(_Config):
    """Grammar-constrained decoding settings."""

    max_len: int = Field(default=24, ge=1, description="Maximum canonical tokens per sequence.")
    beam_width: int = Field(default=8, ge=1, description="Hypotheses kept per beam step.")
    temperature: float = Field(default=1.0, ge=0.0, description="Sampling temperature; 0 decodes greedily.")
    mode: Literal["sample", "beam"] = Field(default="sample", description="Sampling or beam search.")
    prompt_weight: float = Field(
        default=0.5, gt=0.0, lt=1.0, description="Interpolation weight of the plan-prompt model."
    )


class RerankWeights(_Config):
    """Weights of the rerank filter score.

    ``score = alpha * logprob / max(1, |c|) + beta * min(edit, cap_ratio * |c|) / (cap_ratio * |c|)``
    """

    alpha: float = Field(default=1.0, ge=0.0, description="Weight on the length-normalized parser log-prob.")
    beta: float = Field(default=0.5, ge=0.0, description="Weight on the capped, normalized edit distance.")
    cap_ratio: float = Field(default=1.0, gt=0.0, description="Edit distance cap as a multiple of |c|.")


class ParserConfig(_Config):
    """Noisy-channel parser training and decoding settings."""

    order: int = Field(default=3, ge=1, description="N-gram order of the canonical prior.")
    smoothing_alpha: float = Field(default=0.1, gt=0.0, description="Additive smoothing of the prior.")
    em_iterations: int = Field(default=10, ge=1, description="Model 1 EM iterations for the channel.")
    beam_width: int = Field(default=16, ge=1, description="Beam width of parse_top1.")
    max_len: int = Field(default=24, ge=1, description="Longest canonical sequence considered.")
    max_slot_span: int = Field(default=4, ge=1, description="Longest unquoted natural span tried as a slot value.")
    copy_prob: float = Field(
        default=0.5, gt=0.0, lt=1.0, description="Self-translation mass for canonical tokens unseen in training."
    )


class SimulationConfig(_Config):
    """Natural-utterance simulation settings."""

    k: int = Field(default=20, ge=1, description="Simulated naturals per canonical.")
    temperature: float = Field(default=0.9, ge=0.0, description="Completion temperature.")
    max_tokens: int = Field(default=32, ge=1, description="Token budget per completion.")
    prompt_examples: int | None = Field(
        default=None, ge=1, description="Seed pairs per prompt; all of them when unset."
    )
    backend: Literal["local", "remote"] = Field(default="local", description="Completion backend.")
    endpoint: str | None = Field(default=None, description="Completion service address for the remote backend.")
    max_in_flight: int = Field(default=4, ge=1, description="Concurrent completion requests.")
    retries: int = Field(default=3, ge=0, description="Retries after transient remote failures.")
    timeout: float = Field(default=30.0, gt=0.0, description="Per-request timeout in seconds.")

    @model_validator(mode="after")
    def _check_endpoint(self) -> SimulationConfig:
        if self.backend == "remote" and not self.endpoint:
            raise ValueError("simulation.endpoint is required for the remote backend")
        return self


class PipelineConfig(_Config):
    """One augmentation method: generator, filter and iteration count."""

    generator: Generator = Field(default="from_u", description="Canonical generator.")
    filter: FilterKind = Field(default="rerank", description="Silver pair filter.")
    iterations: int = Field(default=1, ge=0, description="Augmentation rounds; 0 trains on the seed only.")
    rng_seed: int = Field(default=0, description="Seed of every random choice in the run.")
    replace_pii: bool = Field(default=True, description="Replace slot values of parsed utterances.")
    n_generate: int = Field(default=100, ge=1, description="Draws for the from_d and grammar_sample generators.")
    max_depth: int = Field(default=8, ge=1, description="Derivation depth bound for grammar sampling.")
    plan_examples: int | None = Field(
        default=None, ge=1, description="Seed canonicals per plan prompt; min(20, |D|) when unset."
    )
    decode: DecodeParams = Field(default_factory=DecodeParams)
    rerank: RerankWeights = Field(default_factory=RerankWeights)
    parser: ParserConfig = Field(default_factory=ParserConfig)
    simulation: SimulationConfig = Field(default_factory=SimulationConfig)


class BenchmarkConfig(_Config):
    """Synthetic benchmark definition."""

    grammar: Path = Field(default=TOYCAL_DIR / "grammar.scfg", description="Grammar file.")
    pools: Path = Field(default=TOYCAL_DIR / "pools", description="Replacement pools used by the pipeline.")
    generator_pools: Path = Field(
        default=TOYCAL_DIR / "bench_pools", description="Slot values used to generate gold data."
    )
    templates: Path = Field(default=TOYCAL_DIR / "templates.json", description="Natural templates and synonyms.")
    synonym_prob: float = Field(default=0.3, ge=0.0, le=1.0, description="Per-token synonym swap probability.")
    drop_prob: float = Field(default=0.1, ge=0.0, le=1.0, description="Per-token drop probability.")
    n_seed: int = Field(default=30, ge=1, description="|D|.")
    n_unlabeled: int = Field(default=300, ge=0, description="|U|.")
    n_test: int = Field(default=200, ge=1, description="|test|.")
    max_depth: int = Field(default=6, ge=1, description="Derivation depth bound for gold sampling.")


class TrialsConfig(_Config):
    """Multi-trial comparison of methods on one benchmark."""

    n_trials: int = Field(default=5, ge=2, description="Trials per method.")
    base_seed: int = Field(default=0, description="Trial i uses seed base_seed + i.")
    methods: dict[str, PipelineConfig] = Field(
        default_factory=lambda: {name: method_preset(name) for name in ("baseline", "from_u-rerank")},
        description="Method name to pipeline config; the 'baseline' entry anchors the t-tests.",
    )
    benchmark: BenchmarkConfig = Field(default_factory=BenchmarkConfig)

    @field_validator("methods", mode="before")
    @classmethod
    def _expand_presets(cls, value: Any) -> Any:
        """Accept a list of preset names in place of the mapping."""
        if isinstance(value, list | tuple):
            return {name: method_preset(name) for name in value}
        return value


METHOD_PRESETS: dict[str, dict[str, Any]] = {
    "baseline": {"iterations": 0},
    "from_u-rerank": {"generator": "from_u", "filter": "rerank"},
    "from_d-rerank": {"generator": "from_d", "filter": "rerank"},
    "from_u-cycle": {"generator": "from_u", "filter": "cycle"},
    "grammar_sample-rerank": {"generator": "grammar_sample", "filter": "rerank"},
    "from_u-norank": {"generator": "from_u", "filter": "norank"},
    "from_u-rerank-no_edit": {"generator": "from_u", "filter": "rerank", "rerank": {"beta": 0.0}},
    "from_u-rerank-keep_pii": {"generator": "from_u", "filter": "rerank", "replace_pii": False},
}


def method_preset(name: str, **overrides: Any) -> PipelineConfig:
    """Build the pipeline config of a named method.

    Examples
    --------
    >>> method_preset("from_u-cycle").filter
    'cycle'
    >>> method_preset("from_u-rerank", iterations=3).iterations
    3
    """
    if name not in METHOD_PRESETS:
        raise KeyError(f"Unknown method {name!r}; choose from {sorted(METHOD_PRESETS)}")
    return PipelineConfig.model_validate(merge_with_overrides(METHOD_PRESETS[name], overrides=overrides))


def load_config(
    fpath: Path | str,
    model: type[ConfigT],
    *,
    overrides: dict[str, Any] | None = None,
) -> ConfigT:
    """Read a JSON config file into ``model``.

    Parameters
    ----------
    fpath : Path | str
        JSON document.
    model : type[ConfigT]
        Config model to validate against.
    overrides : dict[str, Any] | None
        Nested values merged over the file content before validation.

    Raises
    ------
    FileNotFoundError
        If the file does not exist.
    pydantic.ValidationError
        If the merged content does not fit ``model``.
    """
    content = read_json(Path(fpath))
    if not isinstance(content, dict):
        raise ValueError(f"{fpath} must hold a JSON object")
    if overrides:
        content = merge_with_overrides(content, overrides=overrides)
    logger.debug("Loaded {} from {}", model.__name__, fpath)
    return model.model_validate(content)
