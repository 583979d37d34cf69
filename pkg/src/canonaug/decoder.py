"""Grammar-constrained sampling and beam search over token language models.

At every step the language model's next-token distribution is restricted to
the tokens the grammar's prefix recognizer allows (plus the end marker once
the prefix is a complete sentence), renormalized, and only then tempered. The
reported log-probability of a sequence is the sum of these masked,
renormalized per-step log-probabilities, before temperature.

Slot values come from the replacement pools through the recognizer, so the
language model can never place a value outside the pools in a slot.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple

import numpy as np
from loguru import logger
from scipy.special import logsumexp, softmax

from .config import DecodeParams
from .exceptions import DeadEndError, EmptyBeamError, EmptyCorpusError, LengthExceededError
from .lm import EOS, NGramModel, TokenDistribution, TokenLM, train_ngram
from .scfg import AllowedTokens, Grammar, PrefixRecognizer, RecognizerState
from .utils import Tokens, detokenize, tokenize

if TYPE_CHECKING:
    from .augment import SeedDataset
    from .pii import ReplacementPools

MAX_PLAN_EXAMPLES = 20


@dataclass(frozen=True, slots=True)
class ScoredSequence:
    """A decoded token sequence and its masked log-probability."""

    tokens: Tokens
    logprob: float

    def __post_init__(self) -> None:
        """Reject positive log-probabilities."""
        if self.logprob > 1e-12:
            raise ValueError(f"logprob must be <= 0, got {self.logprob}")


class MaskedStep(NamedTuple):
    """Candidates of one decoding step with their renormalized log-probabilities."""

    tokens: list[str]
    logprobs: np.ndarray


class PromptedLM:
    """A token LM conditioned on a plan prompt.

    The prompt's non-empty lines are fitted as a small n-gram model of the same
    order as the wrapped one, and each next-token distribution is the linear
    interpolation ``weight * prompt + (1 - weight) * base``. An empty prompt
    leaves the wrapped model unchanged.
    """

    def __init__(
        self, lm: TokenLM, prompt: str, *, weight: float = 0.5, smoothing_alpha: float = 0.1
    ) -> None:
        if not 0.0 < weight < 1.0:
            raise ValueError(f"weight must be in (0, 1), got {weight}")
        self.lm = lm
        self.weight = weight
        self.prompt_lines: tuple[Tokens, ...] = tuple(
            tuple(tokenize(line)) for line in prompt.splitlines() if line.strip()
        )
        self.prompt_model: NGramModel | None = None
        if self.prompt_lines:
            self.prompt_model = train_ngram(
                self.prompt_lines, lm.context_size + 1, smoothing_alpha, extra_vocabulary=lm.vocabulary
            )
        self._cache: dict[Tokens, TokenDistribution] = {}

    @property
    def vocabulary(self) -> frozenset[str]:
        """Wrapped vocabulary plus any token only the prompt uses."""
        if self.prompt_model is None:
            return self.lm.vocabulary
        return self.lm.vocabulary | self.prompt_model.vocabulary

    @property
    def context_size(self) -> int:
        """Context size of the wrapped model."""
        return self.lm.context_size

    def next_token_logprobs(self, prefix: Sequence[str]) -> TokenDistribution:
        """Interpolated distribution of the token following ``prefix``."""
        if self.prompt_model is None:
            return self.lm.next_token_logprobs(prefix)
        size = self.context_size
        key = tuple(prefix[-size:]) if size else ()
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        base = self.lm.next_token_logprobs(prefix)
        local = self.prompt_model.next_token_logprobs(prefix)
        log_weight, log_rest = math.log(self.weight), math.log1p(-self.weight)
        scores = {
            token: float(np.logaddexp(log_weight + local.logprob(token), log_rest + base.logprob(token)))
            for token in sorted(self.vocabulary)
        }
        distribution = TokenDistribution.from_scores(scores)
        self._cache[key] = distribution
        return distribution


def masked_step(distribution: TokenDistribution, allowed: AllowedTokens, *, can_extend: bool = True) -> MaskedStep:
    """Restrict ``distribution`` to the allowed continuations and renormalize.

    Tokens outside the model vocabulary take the unknown-marker probability. If
    every candidate has zero probability the step falls back to uniform.
    """
    candidates = sorted(allowed.tokens) if can_extend else []
    if allowed.eos:
        candidates.append(EOS)
    scores = np.array([distribution.logprob(token) for token in candidates], dtype=float)
    if not np.any(np.isfinite(scores)):
        scores = np.zeros(len(candidates))
    return MaskedStep(candidates, scores - logsumexp(scores))


def _choose(step: MaskedStep, rng: np.random.Generator, temperature: float) -> int:
    if temperature == 0:
        # Greedy; ties go to the lexicographically smallest token.
        return min(range(len(step.tokens)), key=lambda i: (-step.logprobs[i], step.tokens[i]))
    probabilities = softmax(step.logprobs / temperature)
    return int(rng.choice(len(step.tokens), p=probabilities))


def _recognizer_for(grammar: Grammar, pools: ReplacementPools, recognizer: PrefixRecognizer | None) -> PrefixRecognizer:
    recognizer = recognizer or PrefixRecognizer(grammar, pools)
    if recognizer.is_empty:
        raise DeadEndError(f"Grammar with start {grammar.start} has an empty language")
    return recognizer


def constrained_sample(
    lm: TokenLM,
    grammar: Grammar,
    pools: ReplacementPools,
    rng: np.random.Generator,
    params: DecodeParams,
    *,
    recognizer: PrefixRecognizer | None = None,
) -> ScoredSequence:
    """Sample one grammar-valid sequence.

    Parameters
    ----------
    lm : TokenLM
        Source of next-token distributions.
    grammar : Grammar
        Task grammar.
    pools : ReplacementPools
        Slot values admitted by the grammar constraint.
    rng : numpy.random.Generator
        Random source owned by this call.
    params : DecodeParams
        ``max_len`` and ``temperature`` are used; ``mode`` must be ``sample``.
    recognizer : PrefixRecognizer | None
        Prebuilt recognizer for ``grammar`` and ``pools``, reused across calls.

    Raises
    ------
    DeadEndError
        If no continuation is allowed before the sentence is complete.
    LengthExceededError
        If ``max_len`` tokens are generated without completing a sentence.
    """
    if params.mode != "sample":
        raise ValueError(f"constrained_sample needs mode='sample', got {params.mode!r}")
    state = _recognizer_for(grammar, pools, recognizer).initial()
    tokens: list[str] = []
    total = 0.0
    while True:
        allowed = state.allowed()
        if allowed.is_dead:
            raise DeadEndError(f"No continuation after {detokenize(tokens)!r}")
        can_extend = len(tokens) < params.max_len
        if not can_extend and not allowed.eos:
            raise LengthExceededError(f"Reached max_len={params.max_len} without completing a sentence")
        step = masked_step(lm.next_token_logprobs(tokens), allowed, can_extend=can_extend)
        index = _choose(step, rng, params.temperature)
        total += float(step.logprobs[index])
        token = step.tokens[index]
        if token == EOS:
            return ScoredSequence(tuple(tokens), min(total, 0.0))
        advanced = state.advance(token)
        assert advanced is not None
        state = advanced
        tokens.append(token)


class _Hypothesis(NamedTuple):
    logprob: float
    tokens: Tokens
    state: RecognizerState | None

    @property
    def finished(self) -> bool:
        return self.state is None


def constrained_beam(
    lm: TokenLM,
    grammar: Grammar,
    pools: ReplacementPools,
    params: DecodeParams,
    *,
    recognizer: PrefixRecognizer | None = None,
) -> list[ScoredSequence]:
    """Beam search for the k best grammar-valid sequences.

    Each step pools every extension of every live hypothesis, finished ones
    included, and keeps the ``beam_width`` best. Hypotheses that can neither
    grow nor end are dropped.

    Returns
    -------
    list[ScoredSequence]
        Up to ``beam_width`` sequences by log-probability descending, ties
        broken lexicographically by tokens.

    Raises
    ------
    EmptyBeamError
        If every hypothesis died.
    """
    if params.mode != "beam":
        raise ValueError(f"constrained_beam needs mode='beam', got {params.mode!r}")
    width = params.beam_width
    alive = [_Hypothesis(0.0, (), _recognizer_for(grammar, pools, recognizer).initial())]
    completed: list[ScoredSequence] = []

    while alive:
        extensions: list[_Hypothesis] = []
        for hypothesis in alive:
            assert hypothesis.state is not None
            allowed = hypothesis.state.allowed()
            can_extend = len(hypothesis.tokens) < params.max_len
            if allowed.is_dead or (not can_extend and not allowed.eos):
                logger.trace("Dropping dead hypothesis {}", detokenize(hypothesis.tokens))
                continue
            step = masked_step(lm.next_token_logprobs(hypothesis.tokens), allowed, can_extend=can_extend)
            for token, logprob in zip(step.tokens, step.logprobs.tolist(), strict=True):
                if logprob == -math.inf:
                    continue
                score = hypothesis.logprob + logprob
                if token == EOS:
                    extensions.append(_Hypothesis(score, hypothesis.tokens, None))
                    continue
                advanced = hypothesis.state.advance(token)
                if advanced is not None:
                    extensions.append(_Hypothesis(score, (*hypothesis.tokens, token), advanced))

        extensions.sort(key=lambda h: (-h.logprob, h.tokens, not h.finished))
        alive = []
        for hypothesis in extensions[:width]:
            if hypothesis.finished:
                completed.append(ScoredSequence(hypothesis.tokens, min(hypothesis.logprob, 0.0)))
            else:
                alive.append(hypothesis)

        if len(completed) >= width:
            threshold = sorted(sequence.logprob for sequence in completed)[-width]
            if all(hypothesis.logprob < threshold for hypothesis in alive):
                break

    if not completed:
        raise EmptyBeamError(f"Every beam hypothesis died within max_len={params.max_len}")
    completed.sort(key=lambda sequence: (-sequence.logprob, sequence.tokens))
    return completed[:width]


def build_plan_prompt(seed: SeedDataset, rng: np.random.Generator, n_examples: int | None = None) -> str:
    """Concatenate seed canonicals in random order, one per line.

    ``n_examples`` defaults to ``min(20, |seed|)``. The prompt ends with a
    newline so generation starts a fresh plan.

    Raises
    ------
    EmptyCorpusError
        If the seed dataset is empty.
    """
    canonicals = seed.canonicals
    if not canonicals:
        raise EmptyCorpusError("Cannot build a plan prompt from an empty seed dataset")
    if n_examples is None:
        n_examples = min(MAX_PLAN_EXAMPLES, len(canonicals))
    if not 1 <= n_examples <= len(canonicals):
        raise ValueError(f"n_examples must be in [1, {len(canonicals)}], got {n_examples}")
    order = rng.permutation(len(canonicals))[:n_examples]
    return "".join(f"{detokenize(canonicals[int(index)])}\n" for index in order)
