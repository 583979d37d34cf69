"""Noisy-channel semantic parser decoded under the grammar constraint."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from loguru import logger

from ..config import ParserConfig
from ..exceptions import EmptyBeamError, EmptyCorpusError, NoParseError
from ..lm import EOS, NGramModel, train_ngram
from ..pii import ReplacementPools
from ..scfg import Derivation, Grammar, PrefixRecognizer, RecognizerState, can_parse, parse_canonical
from ..utils import QUOTE, Tokens, as_tokens, detokenize
from ._model1 import NULL, PROBABILITY_FLOOR, TranslationTable, channel_logprob, model1_em


@dataclass(frozen=True, slots=True)
class ParseResult:
    """Top-1 parse of a natural utterance."""

    canonical: Tokens
    derivation: Derivation
    logprob: float

    def __post_init__(self) -> None:
        """Check that the derivation renders to the canonical tokens."""
        if self.derivation.canonical() != self.canonical:
            raise ValueError("Derivation does not render to the canonical tokens")


@dataclass(frozen=True, slots=True)
class NoisyChannelParser:
    """``argmax_c prior(c) * channel(n | c)`` over the grammar's language.

    Attributes
    ----------
    channel : TranslationTable
        Model 1 table ``t(natural | canonical)``.
    prior : NGramModel
        N-gram model over canonical tokens.
    grammar : Grammar
        Task grammar restricting the search.
    pools : ReplacementPools
        Slot values offered as candidates besides spans of the utterance.
    config : ParserConfig
        Decoding settings.
    """

    channel: TranslationTable
    prior: NGramModel
    grammar: Grammar
    pools: ReplacementPools
    config: ParserConfig = field(default_factory=ParserConfig)

    def __post_init__(self) -> None:
        """Require the prior to know every grammar terminal."""
        missing = sorted(self.grammar.terminals - self.prior.vocabulary)
        if missing:
            raise ValueError(f"Prior vocabulary misses grammar terminals {missing}")

    def score_parse(self, natural: Sequence[str] | str, canonical: Sequence[str] | str) -> float:
        """Shorthand for :func:`score_parse`."""
        return score_parse(self, natural, canonical)

    def parse_top1(self, natural: Sequence[str] | str) -> ParseResult:
        """Shorthand for :func:`parse_top1`."""
        return parse_top1(self, natural)


def train_parser(
    pairs: Sequence[tuple[Sequence[str], Sequence[str]]],
    config: ParserConfig | None = None,
    *,
    grammar: Grammar,
    pools: ReplacementPools,
) -> NoisyChannelParser:
    """Fit the prior on canonical sides and the channel on ``(natural, canonical)`` pairs.

    Raises
    ------
    EmptyCorpusError
        If ``pairs`` is empty.
    """
    config = config or ParserConfig()
    if not pairs:
        raise EmptyCorpusError("Cannot train a parser without (natural, canonical) pairs")
    corpus = [(as_tokens(natural), as_tokens(canonical)) for natural, canonical in pairs]
    prior = train_ngram(
        [canonical for _, canonical in corpus],
        config.order,
        config.smoothing_alpha,
        extra_vocabulary=grammar.terminals,
    )
    channel = model1_em(corpus, config.em_iterations, copy_prob=config.copy_prob)
    logger.debug("Trained parser on {} pairs (|V_prior|={})", len(corpus), len(prior.vocabulary))
    return NoisyChannelParser(channel=channel, prior=prior, grammar=grammar, pools=pools, config=config)


def _score(parser: NoisyChannelParser, natural: Tokens, canonical: Tokens) -> float:
    return parser.prior.sequence_logprob(canonical) + channel_logprob(parser.channel, natural, canonical)


def score_parse(parser: NoisyChannelParser, natural: Sequence[str] | str, canonical: Sequence[str] | str) -> float:
    """Log prior of ``canonical`` plus the Model 1 channel log-probability of ``natural``.

    Raises
    ------
    NoParseError
        If ``canonical`` is outside the grammar's language.
    """
    canonical_tokens = as_tokens(canonical)
    if not can_parse(parser.grammar, canonical_tokens):
        raise NoParseError(f"{detokenize(canonical_tokens)!r} is not a canonical utterance of the grammar")
    return _score(parser, as_tokens(natural), canonical_tokens)


def slot_candidates(natural: Sequence[str], max_span: int) -> tuple[Tokens, ...]:
    """Spans of ``natural`` offered as slot values.

    Spans enclosed by a pair of quote tokens come first, then every quote-free
    span of at most ``max_span`` tokens in reading order.

    Examples
    --------
    >>> slot_candidates(("find", '"', "team", "lunch", '"'), 1)
    (('team', 'lunch'), ('find',), ('team',), ('lunch',))
    """
    tokens = tuple(natural)
    found: dict[Tokens, None] = {}
    quotes = [position for position, token in enumerate(tokens) if token == QUOTE]
    for opening, closing in zip(quotes[::2], quotes[1::2], strict=False):
        if closing - opening > 1:
            found.setdefault(tokens[opening + 1 : closing])
    for start in range(len(tokens)):
        for end in range(start + 1, min(len(tokens), start + max_span) + 1):
            span = tokens[start:end]
            if QUOTE in span:
                break
            found.setdefault(span)
    return tuple(found)


class _Hypothesis(NamedTuple):
    heuristic: float
    tokens: Tokens
    state: RecognizerState | None
    prior: float
    sums: np.ndarray


class _ChannelColumns:
    """Caches ``t(n_j | c)`` over the natural positions ``j`` for each canonical token."""

    def __init__(self, table: TranslationTable, natural: Tokens) -> None:
        self._table = table
        self._natural = natural
        self._columns: dict[str, np.ndarray] = {}

    def __call__(self, canonical: str) -> np.ndarray:
        column = self._columns.get(canonical)
        if column is None:
            column = np.array([self._table.prob(token, canonical) for token in self._natural], dtype=float)
            self._columns[canonical] = column
        return column


def _partial_channel(sums: np.ndarray, length: int) -> float:
    if not sums.size:
        return 0.0
    return float(np.sum(np.log(np.maximum(sums / (length + 1), PROBABILITY_FLOOR))))


def parse_top1(parser: NoisyChannelParser, natural: Sequence[str] | str) -> ParseResult:
    """Most probable canonical utterance for ``natural`` under the grammar.

    A beam over grammar prefixes is ranked by the prior of the prefix plus the
    channel score of the natural utterance given the prefix; completed
    sequences are ranked by the exact :func:`score_parse` value, ties broken
    lexicographically. Slots admit pool values and spans of the utterance (see
    :func:`slot_candidates`).

    Raises
    ------
    EmptyBeamError
        If the grammar's language is empty within ``config.max_len``.
    """
    config = parser.config
    natural_tokens = as_tokens(natural)
    candidates = slot_candidates(natural_tokens, config.max_slot_span)
    pools = parser.pools
    if candidates and parser.grammar.slot_categories:
        pools = pools.extended({category: candidates for category in parser.grammar.slot_categories})
    recognizer = PrefixRecognizer(parser.grammar, pools)
    if recognizer.is_empty:
        raise EmptyBeamError(f"Grammar with start {parser.grammar.start} has an empty language")

    column = _ChannelColumns(parser.channel, natural_tokens)
    alive = [_Hypothesis(0.0, (), recognizer.initial(), 0.0, column(NULL).copy())]
    completed: dict[Tokens, float] = {}

    while alive:
        extensions: list[_Hypothesis] = []
        for hypothesis in alive:
            assert hypothesis.state is not None
            allowed = hypothesis.state.allowed()
            distribution = parser.prior.next_token_logprobs(hypothesis.tokens)
            if allowed.eos:
                prior = hypothesis.prior + distribution.logprob(EOS)
                channel = _partial_channel(hypothesis.sums, len(hypothesis.tokens))
                extensions.append(_Hypothesis(prior + channel, hypothesis.tokens, None, prior, hypothesis.sums))
            if len(hypothesis.tokens) >= config.max_len:
                continue
            for token in sorted(allowed.tokens):
                advanced = hypothesis.state.advance(token)
                if advanced is None:
                    continue
                prior = hypothesis.prior + distribution.logprob(token)
                sums = hypothesis.sums + column(token)
                tokens = (*hypothesis.tokens, token)
                channel = _partial_channel(sums, len(tokens))
                extensions.append(_Hypothesis(prior + channel, tokens, advanced, prior, sums))

        extensions.sort(key=lambda h: (-h.heuristic, h.tokens, h.state is not None))
        alive = []
        for hypothesis in extensions[: config.beam_width]:
            if hypothesis.state is None:
                completed[hypothesis.tokens] = _score(parser, natural_tokens, hypothesis.tokens)
            else:
                alive.append(hypothesis)

    if not completed:
        raise EmptyBeamError(f"No complete parse within max_len={config.max_len}")
    best = min(completed, key=lambda tokens: (-completed[tokens], tokens))
    score = completed[best]
    if not math.isfinite(score):
        logger.warning("Non-finite parse score for {!r}", detokenize(natural_tokens))
    return ParseResult(canonical=best, derivation=parse_canonical(parser.grammar, best), logprob=score)
