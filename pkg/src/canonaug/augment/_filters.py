"""Silver-pair filters: rerank by parser score and edit distance, cycle consistency, or no ranking."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import editdistance

from ..config import RerankWeights
from ..exceptions import EmptyCorpusError
from ..parser import NoisyChannelParser
from ..scfg import Derivation, parse_canonical
from ..utils import Tokens, as_tokens
from ._datasets import Provenance, SilverPair


def edit_distance(a: Sequence[str], b: Sequence[str]) -> int:
    """Token-level Levenshtein distance with unit costs.

    Examples
    --------
    >>> edit_distance(["a", "b"], ["a", "c", "b"])
    1
    """
    return int(editdistance.eval(list(a), list(b)))


def rerank_score(parser: NoisyChannelParser, canonical: Tokens, natural: Tokens, weights: RerankWeights) -> float:
    """Weighted sum of the per-token parser log-prob and the capped, normalized edit distance."""
    if not canonical:
        raise ValueError("Cannot rerank against an empty canonical utterance")
    cap = weights.cap_ratio * len(canonical)
    logprob = parser.score_parse(natural, canonical) / max(1, len(canonical))
    distance = min(edit_distance(natural, canonical), cap) / cap
    return weights.alpha * logprob + weights.beta * distance


def rerank_filter(
    parser: NoisyChannelParser,
    canonical: Sequence[str],
    naturals: Sequence[Sequence[str]],
    weights: RerankWeights | None = None,
    *,
    derivation: Derivation | None = None,
    provenance: Provenance = Provenance.FROM_U,
) -> SilverPair:
    """Pick the natural with the highest rerank score; earlier candidates win ties.

    Raises
    ------
    EmptyCorpusError
        If ``naturals`` is empty.
    NoParseError
        If ``canonical`` is outside the grammar's language.
    """
    weights = weights or RerankWeights()
    if not naturals:
        raise EmptyCorpusError("rerank_filter needs at least one candidate")
    canonical_tokens = as_tokens(canonical)
    scores = [rerank_score(parser, canonical_tokens, as_tokens(natural), weights) for natural in naturals]
    best = max(range(len(scores)), key=lambda index: (scores[index], -index))
    return SilverPair(
        canonical=canonical_tokens,
        natural=as_tokens(naturals[best]),
        derivation=derivation or parse_canonical(parser.grammar, canonical_tokens),
        filter_score=scores[best],
        filter_kind="rerank",
        provenance=provenance,
    )


def norank_filter(
    canonical: Sequence[str],
    naturals: Sequence[Sequence[str]],
    derivation: Derivation,
    *,
    provenance: Provenance = Provenance.FROM_U,
) -> SilverPair:
    """Keep the first simulated natural without scoring."""
    if not naturals:
        raise EmptyCorpusError("norank_filter needs at least one candidate")
    return SilverPair(
        canonical=as_tokens(canonical),
        natural=as_tokens(naturals[0]),
        derivation=derivation,
        filter_score=0.0,
        filter_kind="norank",
        provenance=provenance,
    )


@dataclass(frozen=True, slots=True)
class CycleOutcome:
    """Pairs accepted by the cycle filter and the share of candidates that cycled."""

    accepted: tuple[SilverPair, ...]
    checked: int

    @property
    def rate(self) -> float:
        """Accepted over checked candidates; 0 when nothing was checked."""
        return len(self.accepted) / self.checked if self.checked else 0.0


def cycle_filter(
    parser: NoisyChannelParser,
    candidates: Sequence[tuple[Sequence[str], Sequence[str]]],
    *,
    provenance: Provenance = Provenance.FROM_U,
) -> CycleOutcome:
    """Keep ``(c, n)`` pairs whose natural parses back to exactly ``c``."""
    accepted = []
    for canonical, natural in candidates:
        canonical_tokens = as_tokens(canonical)
        result = parser.parse_top1(natural)
        if result.canonical != canonical_tokens:
            continue
        accepted.append(
            SilverPair(
                canonical=canonical_tokens,
                natural=as_tokens(natural),
                derivation=result.derivation,
                filter_score=result.logprob,
                filter_kind="cycle",
                provenance=provenance,
            )
        )
    return CycleOutcome(tuple(accepted), len(candidates))
