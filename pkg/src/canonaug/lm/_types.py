"""Token distributions and the language-model protocol."""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np
from scipy.special import logsumexp

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"
MARKERS = frozenset({BOS, EOS, UNK})

NORMALIZATION_TOLERANCE = 1e-6


@dataclass(frozen=True, slots=True)
class TokenDistribution:
    """Natural-log probabilities over a vocabulary.

    Attributes
    ----------
    entries : Mapping[str, float]
        Token to log-probability. Values are finite, at most 0, and their
        exponentials sum to one.
    """

    entries: Mapping[str, float]

    def __post_init__(self) -> None:
        """Reject non-finite or unnormalized entries."""
        if not self.entries:
            raise ValueError("A token distribution needs at least one entry")
        values = np.fromiter(self.entries.values(), dtype=float, count=len(self.entries))
        if not np.all(np.isfinite(values)) or np.any(values > 0):
            raise ValueError("Log-probabilities must be finite and <= 0")
        total = float(np.exp(logsumexp(values)))
        if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
            raise ValueError(f"Distribution sums to {total}, expected 1")

    @classmethod
    def from_scores(cls, scores: Mapping[str, float]) -> TokenDistribution:
        """Normalize unnormalized log-scores into a distribution.

        Examples
        --------
        >>> dist = TokenDistribution.from_scores({"a": 0.0, "b": 0.0})
        >>> round(dist.probability("a"), 3)
        0.5
        """
        tokens = list(scores)
        values = np.array([scores[token] for token in tokens], dtype=float)
        normalized = values - logsumexp(values)
        return cls(dict(zip(tokens, normalized.tolist(), strict=True)))

    @classmethod
    def uniform(cls, tokens: Iterable[str]) -> TokenDistribution:
        """Uniform distribution over ``tokens``."""
        vocabulary = sorted(set(tokens))
        return cls(dict.fromkeys(vocabulary, -math.log(len(vocabulary))))

    def logprob(self, token: str, *, fallback: str | None = UNK) -> float:
        """Log-probability of ``token``; out-of-vocabulary tokens take the fallback's value."""
        if token in self.entries:
            return self.entries[token]
        if fallback is not None and fallback in self.entries:
            return self.entries[fallback]
        return -math.inf

    def probability(self, token: str) -> float:
        """Probability of ``token`` with the unknown-marker fallback."""
        return math.exp(self.logprob(token))

    def argmax(self) -> str:
        """Most likely token; ties go to the lexicographically smallest."""
        return min(self.entries, key=lambda token: (-self.entries[token], token))

    def __len__(self) -> int:
        """Number of tokens with an entry."""
        return len(self.entries)


@runtime_checkable
class TokenLM(Protocol):
    """Anything that yields next-token distributions over a fixed vocabulary."""

    @property
    def vocabulary(self) -> frozenset[str]:
        """Tokens the model assigns probability to, markers included."""
        ...

    @property
    def context_size(self) -> int:
        """How many previous tokens the model conditions on."""
        ...

    def next_token_logprobs(self, prefix: Sequence[str]) -> TokenDistribution:
        """Distribution of the token following ``prefix``."""
        ...
