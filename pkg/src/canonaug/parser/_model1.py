"""Lexical translation table P(natural token | canonical token) estimated by Model 1 EM."""

from __future__ import annotations

import math
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import Any

from loguru import logger

from ..exceptions import EmptyCorpusError
from ..utils import Tokens

NULL = "<null>"
PROBABILITY_FLOOR = 1e-12
ROW_TOLERANCE = 1e-6

Pair = tuple[Tokens, Tokens]


@dataclass(frozen=True, slots=True)
class TranslationTable:
    """Translation probabilities ``t(n | c)``, one row per canonical token.

    Canonical tokens without a row (never seen in training) use a copy
    distribution over ``natural_vocabulary`` plus the token itself: the token
    translates to itself with ``copy_prob`` on top of an even share of the rest.

    Attributes
    ----------
    rows : Mapping[str, Mapping[str, float]]
        Canonical token (or :data:`NULL`) to natural-token probabilities.
    natural_vocabulary : frozenset[str]
        Natural tokens observed in training.
    copy_prob : float
        Self-translation mass for unseen canonical tokens.
    """

    rows: Mapping[str, Mapping[str, float]]
    natural_vocabulary: frozenset[str]
    copy_prob: float = 0.5

    def __post_init__(self) -> None:
        """Check that every row is a probability distribution."""
        if NULL not in self.rows:
            raise ValueError(f"Translation table needs a {NULL} row")
        if not 0 < self.copy_prob < 1:
            raise ValueError(f"copy_prob must be in (0, 1), got {self.copy_prob}")
        for canonical, row in self.rows.items():
            if any(not 0.0 <= value <= 1.0 for value in row.values()):
                raise ValueError(f"Row {canonical!r} holds values outside [0, 1]")
            if abs(math.fsum(row.values()) - 1.0) > ROW_TOLERANCE:
                raise ValueError(f"Row {canonical!r} does not sum to 1")

    def prob(self, natural: str, canonical: str) -> float:
        """``t(natural | canonical)``."""
        row = self.rows.get(canonical)
        if row is not None:
            return row.get(natural, 0.0)
        support = len(self.natural_vocabulary | {canonical})
        share = (1.0 - self.copy_prob) / support
        if natural == canonical:
            return self.copy_prob + share
        return share if natural in self.natural_vocabulary else 0.0

    def row(self, canonical: str) -> dict[str, float]:
        """Full distribution of ``canonical``, copy rows included."""
        if canonical in self.rows:
            return dict(self.rows[canonical])
        support = sorted(self.natural_vocabulary | {canonical})
        return {natural: self.prob(natural, canonical) for natural in support}

    def to_payload(self) -> dict[str, Any]:
        """Plain, sorted representation for serialization."""
        return {
            "copy_prob": self.copy_prob,
            "natural_vocabulary": sorted(self.natural_vocabulary),
            "rows": {canonical: dict(sorted(row.items())) for canonical, row in sorted(self.rows.items())},
        }

    @classmethod
    def from_payload(cls, payload: Mapping[str, Any]) -> TranslationTable:
        """Rebuild a table from :meth:`to_payload` output."""
        return cls(
            rows={canonical: dict(row) for canonical, row in payload["rows"].items()},
            natural_vocabulary=frozenset(payload["natural_vocabulary"]),
            copy_prob=float(payload["copy_prob"]),
        )


def channel_logprob(table: TranslationTable, natural: Sequence[str], canonical: Sequence[str]) -> float:
    """Model 1 log-likelihood of ``natural`` given ``canonical``.

    Each natural token contributes ``log(mean t(n | c))`` over the canonical
    tokens and :data:`NULL`, floored at :data:`PROBABILITY_FLOOR`.
    """
    sources = [*canonical, NULL]
    total = 0.0
    for token in natural:
        mean = math.fsum(table.prob(token, source) for source in sources) / len(sources)
        total += math.log(max(mean, PROBABILITY_FLOOR))
    return total


def corpus_log_likelihood(table: TranslationTable, pairs: Iterable[tuple[Sequence[str], Sequence[str]]]) -> float:
    """Sum of :func:`channel_logprob` over ``(natural, canonical)`` pairs."""
    return math.fsum(channel_logprob(table, natural, canonical) for natural, canonical in pairs)


def _normalize_pairs(pairs: Iterable[tuple[Sequence[str], Sequence[str]]]) -> list[Pair]:
    corpus = [(tuple(natural), tuple(canonical)) for natural, canonical in pairs]
    if not corpus:
        raise EmptyCorpusError("Model 1 needs at least one (natural, canonical) pair")
    if not any(natural for natural, _ in corpus):
        raise EmptyCorpusError("Model 1 needs at least one non-empty natural utterance")
    return corpus


def model1_em_trace(
    pairs: Iterable[tuple[Sequence[str], Sequence[str]]],
    iterations: int,
    *,
    copy_prob: float = 0.5,
) -> tuple[TranslationTable, list[float]]:
    """Run Model 1 EM and report the corpus log-likelihood along the way.

    Returns
    -------
    tuple[TranslationTable, list[float]]
        The final table and ``iterations + 1`` log-likelihoods, starting with
        the uniform initialization.
    """
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    corpus = _normalize_pairs(pairs)
    natural_vocabulary = frozenset(token for natural, _ in corpus for token in natural)
    sources = sorted({token for _, canonical in corpus for token in canonical} | {NULL})
    uniform = 1.0 / len(natural_vocabulary)
    rows: dict[str, dict[str, float]] = {
        source: dict.fromkeys(sorted(natural_vocabulary), uniform) for source in sources
    }

    table = TranslationTable(rows, natural_vocabulary, copy_prob)
    trace = [corpus_log_likelihood(table, corpus)]
    for iteration in range(iterations):
        expected: dict[str, defaultdict[str, float]] = {source: defaultdict(float) for source in sources}
        for natural, canonical in corpus:
            aligned = [*canonical, NULL]
            for token in natural:
                weights = [rows[source].get(token, 0.0) for source in aligned]
                normalizer = math.fsum(weights)
                if normalizer <= 0.0:
                    continue
                for source, weight in zip(aligned, weights, strict=True):
                    expected[source][token] += weight / normalizer

        for source in sources:
            counts = expected[source]
            total = math.fsum(counts.values())
            if total > 0.0:
                rows[source] = {token: counts[token] / total for token in sorted(counts)}

        table = TranslationTable({source: dict(row) for source, row in rows.items()}, natural_vocabulary, copy_prob)
        trace.append(corpus_log_likelihood(table, corpus))
        logger.trace("Model 1 iteration {}: log-likelihood {:.6f}", iteration + 1, trace[-1])
    return table, trace


def model1_em(
    pairs: Iterable[tuple[Sequence[str], Sequence[str]]],
    iterations: int,
    *,
    copy_prob: float = 0.5,
) -> TranslationTable:
    """Estimate ``t(natural | canonical)`` with Model 1 EM.

    The table starts uniform over the natural vocabulary for every canonical
    token and :data:`NULL`; each iteration redistributes every natural token's
    count over the canonical tokens of its pair in proportion to the current
    table.

    Parameters
    ----------
    pairs : Iterable[tuple[Sequence[str], Sequence[str]]]
        ``(natural, canonical)`` token pairs.
    iterations : int
        EM iterations, at least 1.
    copy_prob : float
        Self-translation mass for canonical tokens absent from ``pairs``.

    Raises
    ------
    EmptyCorpusError
        If ``pairs`` is empty or holds no natural tokens.

    Examples
    --------
    >>> table = model1_em([(["hi"], ["hello"])], iterations=5)
    >>> table.prob("hi", "hello")
    1.0
    """
    table, _ = model1_em_trace(pairs, iterations, copy_prob=copy_prob)
    return table
