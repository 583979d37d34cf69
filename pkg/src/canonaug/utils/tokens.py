"""Tokenization shared by canonical and natural utterances."""

from __future__ import annotations

import re
from collections.abc import Iterable, Sequence
from typing import TypeAlias

Tokens: TypeAlias = tuple[str, ...]

QUOTE = '"'
_QUOTE_PATTERN = re.compile(r'"')


def tokenize(text: str) -> Tokens:
    """Lowercase and split on whitespace, keeping double quotes as standalone tokens.

    Examples
    --------
    >>> tokenize('Find event called "Picnic"')
    ('find', 'event', 'called', '"', 'picnic', '"')
    """
    return tuple(_QUOTE_PATTERN.sub(f" {QUOTE} ", text.lower()).split())


def detokenize(tokens: Iterable[str]) -> str:
    """Join tokens with single spaces."""
    return " ".join(tokens)


def as_tokens(value: str | Sequence[str]) -> Tokens:
    """Accept either raw text or an existing token sequence."""
    if isinstance(value, str):
        return tokenize(value)
    return tuple(value)


def contains_subsequence(haystack: Sequence[str], needle: Sequence[str]) -> list[int]:
    """Return every start index where ``needle`` occurs contiguously in ``haystack``."""
    width = len(needle)
    if width == 0 or width > len(haystack):
        return []
    first = needle[0]
    return [
        start
        for start in range(len(haystack) - width + 1)
        if haystack[start] == first and tuple(haystack[start : start + width]) == tuple(needle)
    ]
