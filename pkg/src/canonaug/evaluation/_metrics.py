"""Top-1 exact-match accuracy."""

from __future__ import annotations

from collections.abc import Sequence
from typing import Protocol

from loguru import logger

from ..exceptions import CanonAugError, EmptyCorpusError
from ..utils import Tokens, as_tokens, detokenize


class _Parsed(Protocol):
    @property
    def canonical(self) -> Tokens: ...


class TopOneParser(Protocol):
    """Anything that returns a single best parse with a ``canonical`` attribute."""

    def parse_top1(self, natural: Sequence[str] | str) -> _Parsed: ...


def top1_match(parser: TopOneParser, test: Sequence[tuple[Sequence[str] | str, Sequence[str] | str]]) -> float:
    """Percentage of ``(natural, canonical)`` items whose top parse equals the gold canonical.

    Equality is exact on canonical tokens. An utterance the parser cannot parse
    counts as a miss.

    Raises
    ------
    EmptyCorpusError
        If ``test`` is empty.

    Examples
    --------
    >>> class Echo:
    ...     def parse_top1(self, natural):
    ...         from types import SimpleNamespace
    ...         return SimpleNamespace(canonical=tuple(natural.split()))
    >>> top1_match(Echo(), [("a b", "a b"), ("a", "b")])
    50.0
    """
    if not test:
        raise EmptyCorpusError("top1_match needs a non-empty test set")
    hits = 0
    for natural, canonical in test:
        try:
            predicted = parser.parse_top1(natural).canonical
        except CanonAugError as exc:
            logger.debug("No parse for {!r}: {}", natural if isinstance(natural, str) else detokenize(natural), exc)
            continue
        hits += predicted == as_tokens(canonical)
    return 100.0 * hits / len(test)
