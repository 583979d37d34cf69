"""Canonical-utterance generators: parsing unlabeled data, constrained LM sampling, grammar sampling."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from loguru import logger
from rust_ok import Err, Ok, Result

from ..config import DecodeParams
from ..decoder import PromptedLM, build_plan_prompt, constrained_sample
from ..exceptions import CanonAugError, DecodeError
from ..lm import TokenLM
from ..parser import NoisyChannelParser
from ..pii import ReplacementPools, detect_pii, replace_pii
from ..scfg import Derivation, Grammar, PrefixRecognizer, parse_canonical, sample_derivation
from ..utils import Tokens
from ._datasets import CanonicalSet, Provenance, SeedDataset, UnlabeledSet


@dataclass(frozen=True, slots=True)
class GenerationOutcome:
    """A generated canonical set with the bookkeeping of its generator."""

    canonicals: CanonicalSet
    attempted: int
    skipped: int
    original_values: frozenset[Tokens] = field(default_factory=frozenset)

    @property
    def generated(self) -> int:
        """Number of unique canonicals produced."""
        return len(self.canonicals)


def _parse_and_mask(
    parser: NoisyChannelParser,
    utterance: Tokens,
    pools: ReplacementPools,
    rng: np.random.Generator,
    *,
    replace: bool,
) -> Result[tuple[Derivation, list[Tokens]], CanonAugError]:
    try:
        derivation = parser.parse_top1(utterance).derivation
        originals = [span.value for span in detect_pii(derivation)]
        return Ok((replace_pii(derivation, pools, rng) if replace else derivation, originals))
    except CanonAugError as exc:
        return Err(exc)


def gen_from_u(
    parser: NoisyChannelParser,
    unlabeled: UnlabeledSet,
    pools: ReplacementPools,
    rng: np.random.Generator,
    *,
    replace: bool = True,
) -> GenerationOutcome:
    """Parse each unlabeled utterance and replace the PII of its derivation.

    Natural utterances are dropped as soon as they are parsed; only the
    replaced derivations and the set of original slot values (for the leak
    check) leave this function. Failures are counted and skipped.

    Parameters
    ----------
    replace : bool
        Replace slot values. Turning it off keeps the parsed values.
    """
    derivations: list[Derivation] = []
    originals: set[Tokens] = set()
    skipped = 0
    for index, utterance in enumerate(unlabeled.utterances):
        result = _parse_and_mask(parser, utterance, pools, rng, replace=replace)
        match result:
            case Ok((derivation, values)):
                derivations.append(derivation)
                originals.update(values)
            case Err(_):
                skipped += 1
                logger.debug("Skipping unlabeled utterance {}: {}", index, result.err())
    return GenerationOutcome(
        canonicals=CanonicalSet.from_derivations(derivations, Provenance.FROM_U),
        attempted=len(unlabeled),
        skipped=skipped,
        original_values=frozenset(originals),
    )


def gen_from_d(
    lm: TokenLM,
    grammar: Grammar,
    seed: SeedDataset,
    pools: ReplacementPools,
    n: int,
    rng: np.random.Generator,
    *,
    params: DecodeParams | None = None,
    plan_examples: int | None = None,
) -> GenerationOutcome:
    """Sample ``n`` canonicals from ``lm`` under the grammar, each after a fresh plan prompt.

    Slot values come from ``pools`` through the grammar constraint, so no seed
    PII can appear. Decode failures are counted and skipped.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    params = params or DecodeParams()
    recognizer = PrefixRecognizer(grammar, pools)
    derivations: list[Derivation] = []
    skipped = 0
    for draw in range(n):
        prompt = build_plan_prompt(seed, rng, plan_examples)
        prompted = PromptedLM(lm, prompt, weight=params.prompt_weight)
        result = _decode_one(prompted, grammar, pools, rng, params, recognizer)
        match result:
            case Ok(derivation):
                derivations.append(derivation)
            case Err(_):
                skipped += 1
                logger.debug("Decode {} failed: {}", draw, result.err())
    return GenerationOutcome(
        canonicals=CanonicalSet.from_derivations(derivations, Provenance.FROM_D),
        attempted=n,
        skipped=skipped,
    )


def _decode_one(
    lm: TokenLM,
    grammar: Grammar,
    pools: ReplacementPools,
    rng: np.random.Generator,
    params: DecodeParams,
    recognizer: PrefixRecognizer,
) -> Result[Derivation, DecodeError]:
    try:
        sequence = constrained_sample(lm, grammar, pools, rng, params, recognizer=recognizer)
    except DecodeError as exc:
        return Err(exc)
    return Ok(parse_canonical(grammar, sequence.tokens))


def grammar_sample_set(
    grammar: Grammar,
    pools: ReplacementPools,
    n: int,
    rng: np.random.Generator,
    *,
    max_depth: int = 8,
) -> GenerationOutcome:
    """Draw ``n`` derivations directly from the grammar.

    Raises
    ------
    DepthExhaustedError
        If the grammar cannot terminate within ``max_depth``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    derivations = [sample_derivation(grammar, rng, max_depth, pools) for _ in range(n)]
    return GenerationOutcome(
        canonicals=CanonicalSet.from_derivations(derivations, Provenance.GRAMMAR_SAMPLE),
        attempted=n,
        skipped=0,
    )
