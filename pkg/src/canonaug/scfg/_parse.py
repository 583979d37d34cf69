"""Span parser mapping canonical token sequences back to derivations."""

from __future__ import annotations

import sys
from collections.abc import Sequence
from typing import Final

from ..exceptions import NoParseError
from ..utils import QUOTE, Tokens, as_tokens
from ._types import Derivation, Grammar, SlotFill, SymbolKind, SyncProduction

_ACYCLIC: Final = sys.maxsize

Children = tuple["Derivation | SlotFill", ...]


class _SpanParser:
    """Memoized top-down parser over token spans.

    ``_nonterminal(nt, i, j)`` returns the preferred derivation of ``tokens[i:j]``:
    the earliest-listed production that matches wins, and within a production
    placeholders try their longest span first. A slot matches any non-empty
    span that contains no quote token.

    A span reached again while it is still being parsed (a unit cycle) fails on
    that path. Results that saw such a failure for a span other than their own
    are not memoized, since the span may still succeed once it completes.
    """

    def __init__(self, grammar: Grammar, tokens: Tokens) -> None:
        self._grammar = grammar
        self._tokens = tokens
        self._spans: dict[tuple[str, int, int], Derivation | None] = {}
        # Spans being parsed, by stack depth; _lowest is the shallowest one hit.
        self._active: dict[tuple[str, int, int], int] = {}
        self._lowest = _ACYCLIC
        self._suffixes: dict[tuple[int, int, int, int], Children | None] = {}
        self._index = {id(production): n for n, production in enumerate(grammar.productions)}
        # next_quote[i]: first quote position at or after i.
        next_quote = [len(tokens)] * (len(tokens) + 1)
        for position in range(len(tokens) - 1, -1, -1):
            next_quote[position] = position if tokens[position] == QUOTE else next_quote[position + 1]
        self._next_quote = next_quote

    def parse(self) -> Derivation | None:
        return self._nonterminal(self._grammar.start, 0, len(self._tokens))

    def _nonterminal(self, name: str, i: int, j: int) -> Derivation | None:
        key = (name, i, j)
        depth = self._active.get(key)
        if depth is not None:
            self._lowest = min(self._lowest, depth)
            return None
        if key in self._spans:
            return self._spans[key]
        depth = len(self._active)
        self._active[key] = depth
        outer, self._lowest = self._lowest, _ACYCLIC
        result: Derivation | None = None
        for production in self._grammar.productions_for(name):
            children = self._match(production, 0, i, j)
            if children is not None:
                result = Derivation(production, children)
                break
        del self._active[key]
        if self._lowest >= depth:
            self._spans[key] = result
        self._lowest = min(outer, self._lowest)
        return result

    def _match(self, production: SyncProduction, k: int, i: int, j: int) -> Children | None:
        rhs = production.canonical_rhs
        if k == len(rhs):
            return () if i == j else None
        if j - i < len(rhs) - k:
            return None

        key = (self._index[id(production)], k, i, j)
        if key in self._suffixes:
            return self._suffixes[key]

        outer, self._lowest = self._lowest, _ACYCLIC
        symbol = rhs[k]
        result: Children | None = None
        if symbol.kind is SymbolKind.TERMINAL:
            if self._tokens[i] == symbol.name:
                result = self._match(production, k + 1, i + 1, j)
        else:
            min_rest = len(rhs) - k - 1
            longest = j - min_rest
            if symbol.kind is SymbolKind.SLOT:
                longest = min(longest, self._next_quote[i])
            for end in range(longest, i, -1):
                child: Derivation | SlotFill | None
                if symbol.kind is SymbolKind.SLOT:
                    assert symbol.slot_category is not None
                    child = SlotFill(symbol.slot_category, self._tokens[i:end])
                else:
                    child = self._nonterminal(symbol.name, i, end)
                if child is None:
                    continue
                rest = self._match(production, k + 1, end, j)
                if rest is not None:
                    result = (child, *rest)
                    break

        if self._lowest >= len(self._active):
            self._suffixes[key] = result
        self._lowest = min(outer, self._lowest)
        return result


def parse_canonical(grammar: Grammar, tokens: Sequence[str] | str) -> Derivation:
    """Parse a canonical utterance into its derivation.

    Parameters
    ----------
    grammar : Grammar
        Task grammar.
    tokens : Sequence[str] | str
        Canonical tokens, or raw text which is tokenized first.

    Returns
    -------
    Derivation
        A derivation rendering exactly to ``tokens``. Ambiguity resolves to the
        earliest-listed production at each choice point.

    Raises
    ------
    NoParseError
        If the sequence is not in the grammar's language.
    """
    token_tuple = as_tokens(tokens)
    derivation = _SpanParser(grammar, token_tuple).parse() if token_tuple else None
    if derivation is None:
        raise NoParseError(f"No parse for {' '.join(token_tuple)!r} under start {grammar.start}")
    return derivation


def can_parse(grammar: Grammar, tokens: Sequence[str] | str) -> bool:
    """Return True when ``tokens`` is in the grammar's language."""
    token_tuple = as_tokens(tokens)
    return bool(token_tuple) and _SpanParser(grammar, token_tuple).parse() is not None
