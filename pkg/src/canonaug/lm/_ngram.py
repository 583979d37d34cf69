"""Additive-smoothing n-gram model with stupid backoff over unseen contexts."""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..exceptions import EmptyCorpusError
from ..utils import Tokens
from ._types import BOS, EOS, MARKERS, UNK, TokenDistribution

BACKOFF_FACTOR = 0.4


@dataclass(frozen=True, slots=True)
class NGramModel:
    """Count-based n-gram model.

    Attributes
    ----------
    order : int
        Tokens per n-gram; contexts hold ``order - 1`` tokens.
    vocabulary : frozenset[str]
        Every predictable token, including the begin, end and unknown markers.
    counts : Mapping[Tokens, Mapping[str, int]]
        Context to next-token counts, for every context length below ``order``.
    smoothing_alpha : float
        Additive smoothing constant.
    """

    order: int
    vocabulary: frozenset[str]
    counts: Mapping[Tokens, Mapping[str, int]]
    smoothing_alpha: float
    _cache: dict[Tokens, TokenDistribution] = field(
        default_factory=dict, init=False, repr=False, compare=False, hash=False
    )

    def __post_init__(self) -> None:
        """Check the order, smoothing constant and stored counts."""
        if self.order < 1:
            raise ValueError(f"order must be >= 1, got {self.order}")
        if self.smoothing_alpha <= 0:
            raise ValueError(f"smoothing_alpha must be positive, got {self.smoothing_alpha}")
        if not MARKERS <= self.vocabulary:
            raise ValueError("Vocabulary must contain the begin, end and unknown markers")
        for context, row in self.counts.items():
            if len(context) >= self.order:
                raise ValueError(f"Context {context} is too long for order {self.order}")
            if any(count <= 0 for count in row.values()):
                raise ValueError(f"Counts for context {context} must be positive")

    @property
    def context_size(self) -> int:
        """Number of previous tokens the model conditions on."""
        return self.order - 1

    def context_for(self, prefix: Sequence[str]) -> Tokens:
        """Map a prefix to the padded, unknown-normalized context it conditions on."""
        if self.order == 1:
            return ()
        history = [token if token in self.vocabulary else UNK for token in prefix[-self.context_size :]]
        padding = [BOS] * (self.context_size - len(history))
        return (*padding, *history)

    def next_token_logprobs(self, prefix: Sequence[str]) -> TokenDistribution:
        """Distribution of the token following ``prefix``."""
        return self._distribution(self.context_for(prefix))

    def _distribution(self, context: Tokens) -> TokenDistribution:
        cached = self._cache.get(context)
        if cached is not None:
            return cached
        tokens = sorted(self.vocabulary)
        if context and context not in self.counts:
            shorter = self._distribution(context[1:])
            scores = {token: shorter.entries[token] + math.log(BACKOFF_FACTOR) for token in tokens}
            distribution = TokenDistribution.from_scores(scores)
        else:
            row = self.counts.get(context, {})
            observed = np.array([row.get(token, 0) for token in tokens], dtype=float)
            denominator = observed.sum() + self.smoothing_alpha * len(tokens)
            logprobs = np.log((observed + self.smoothing_alpha) / denominator)
            distribution = TokenDistribution(dict(zip(tokens, logprobs.tolist(), strict=True)))
        self._cache[context] = distribution
        return distribution

    def logprob(self, token: str, prefix: Sequence[str]) -> float:
        """Log-probability of ``token`` after ``prefix``."""
        return self.next_token_logprobs(prefix).logprob(token if token in self.vocabulary else UNK)

    def sequence_logprob(self, tokens: Sequence[str]) -> float:
        """Sum of next-token log-probabilities over ``tokens`` and the end marker."""
        sequence = list(tokens)
        return sum(self.logprob(token, sequence[:position]) for position, token in enumerate([*sequence, EOS]))

    def to_payload(self) -> dict[str, Any]:
        """Plain, sorted representation for serialization."""
        return {
            "order": self.order,
            "smoothing_alpha": self.smoothing_alpha,
            "vocabulary": sorted(self.vocabulary),
            "counts": [
                [list(context), dict(sorted(row.items()))]
                for context, row in sorted(self.counts.items(), key=lambda item: (len(item[0]), item[0]))
            ],
        }

    @classmethod
    def from_payload(cls, payload: Mapping[str, Any]) -> NGramModel:
        """Rebuild a model from :meth:`to_payload` output."""
        return cls(
            order=int(payload["order"]),
            vocabulary=frozenset(payload["vocabulary"]),
            counts={tuple(context): dict(row) for context, row in payload["counts"]},
            smoothing_alpha=float(payload["smoothing_alpha"]),
        )


def train_ngram(
    corpus: Iterable[Sequence[str]],
    order: int,
    smoothing_alpha: float,
    *,
    extra_vocabulary: Iterable[str] = (),
) -> NGramModel:
    """Count n-grams over ``corpus``.

    Each sentence is padded with ``order - 1`` begin markers and closed with the
    end marker; every context length from 0 to ``order - 1`` is counted so that
    unseen contexts can back off.

    Parameters
    ----------
    corpus : Iterable[Sequence[str]]
        Token sequences.
    order : int
        N-gram order, at least 1.
    smoothing_alpha : float
        Additive smoothing constant.
    extra_vocabulary : Iterable[str], optional
        Tokens to include in the vocabulary even when the corpus never uses them.

    Raises
    ------
    EmptyCorpusError
        If ``corpus`` has no sentences.

    Examples
    --------
    >>> model = train_ngram([["a", "b"]], order=2, smoothing_alpha=1.0)
    >>> round(model.next_token_logprobs(["a"]).probability("b"), 4)
    0.3333
    """
    sentences = [tuple(sentence) for sentence in corpus]
    if not sentences:
        raise EmptyCorpusError("Cannot train an n-gram model on an empty corpus")
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")

    counts: dict[Tokens, Counter[str]] = {}
    for sentence in sentences:
        padded = (BOS,) * (order - 1) + sentence + (EOS,)
        for position in range(order - 1, len(padded)):
            target = padded[position]
            for width in range(order):
                counts.setdefault(padded[position - width : position], Counter())[target] += 1

    vocabulary = frozenset(token for sentence in sentences for token in sentence) | set(extra_vocabulary) | MARKERS
    return NGramModel(
        order=order,
        vocabulary=vocabulary,
        counts={context: dict(row) for context, row in counts.items()},
        smoothing_alpha=smoothing_alpha,
    )


def next_token_logprobs(model: NGramModel, prefix: Sequence[str]) -> TokenDistribution:
    """Distribution of the token following ``prefix`` under ``model``."""
    return model.next_token_logprobs(prefix)


def sequence_logprob(model: NGramModel, tokens: Sequence[str]) -> float:
    """Log-probability of ``tokens`` followed by the end marker."""
    return model.sequence_logprob(tokens)
