"""Incremental prefix recognizer used as the decoding constraint oracle.

The grammar is compiled together with replacement pools into a plain CFG in
which every slot category becomes a nonterminal whose rules spell out the pool
values token by token. An Earley chart over that CFG answers which tokens may
follow a prefix. Unproductive nonterminals are removed first, so every item
left in the chart can still reach a complete sentence and the predicted tokens
are exactly the viable continuations.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from typing import TYPE_CHECKING, TypeAlias

from ._types import Grammar, SymbolKind

if TYPE_CHECKING:
    from ..pii import ReplacementPools

Item: TypeAlias = tuple[int, int, int]  # (rule, dot, origin)


@dataclass(frozen=True, slots=True)
class _Nt:
    name: str


_Sym: TypeAlias = "str | _Nt"


@dataclass(frozen=True, slots=True)
class AllowedTokens:
    """Viable next tokens after a prefix."""

    tokens: frozenset[str]
    eos: bool

    @property
    def is_dead(self) -> bool:
        """Return True when the prefix cannot be continued or ended."""
        return not self.tokens and not self.eos


def slot_nonterminal(category: str) -> str:
    """Name of the compiled nonterminal standing for a slot category."""
    return f"<slot:{category}>"


class PrefixRecognizer:
    """Earley recognizer over a grammar with slots expanded from pools."""

    def __init__(self, grammar: Grammar, pools: ReplacementPools) -> None:
        pools.require(grammar.slot_categories)
        rules: list[tuple[str, tuple[_Sym, ...]]] = []
        for production in grammar.productions:
            rhs: list[_Sym] = []
            for symbol in production.canonical_rhs:
                if symbol.kind is SymbolKind.TERMINAL:
                    rhs.append(symbol.name)
                elif symbol.kind is SymbolKind.SLOT:
                    assert symbol.slot_category is not None
                    rhs.append(_Nt(slot_nonterminal(symbol.slot_category)))
                else:
                    rhs.append(_Nt(symbol.name))
            rules.append((production.lhs, tuple(rhs)))
        for category in sorted(grammar.slot_categories):
            rules.extend((slot_nonterminal(category), tuple(value)) for value in pools.values(category))

        productive = _productive(rules)
        self._rules = [
            (lhs, rhs)
            for lhs, rhs in rules
            if lhs in productive and all(not isinstance(s, _Nt) or s.name in productive for s in rhs)
        ]
        self._by_lhs: dict[str, list[int]] = {}
        for index, (lhs, _) in enumerate(self._rules):
            self._by_lhs.setdefault(lhs, []).append(index)
        self._start = grammar.start
        self._initial = self._closure({(index, 0, 0) for index in self._by_lhs.get(self._start, [])}, [], 0)

    @property
    def is_empty(self) -> bool:
        """Return True when the language is empty."""
        return not self._initial

    def initial(self) -> RecognizerState:
        """State for the empty prefix."""
        return RecognizerState(self, (self._initial,))

    def state_for(self, prefix: Sequence[str]) -> RecognizerState | None:
        """Advance from the empty prefix through ``prefix``; None if it dies."""
        state: RecognizerState | None = self.initial()
        for token in prefix:
            assert state is not None
            state = state.advance(token)
            if state is None:
                return None
        return state

    def allowed(self, prefix: Sequence[str]) -> AllowedTokens:
        """Viable continuations of ``prefix``."""
        state = self.state_for(prefix)
        if state is None:
            return AllowedTokens(frozenset(), False)
        return state.allowed()

    def _closure(self, seed: set[Item], chart: list[frozenset[Item]], position: int) -> frozenset[Item]:
        items = set(seed)
        agenda = list(seed)
        while agenda:
            rule, dot, origin = agenda.pop()
            lhs, rhs = self._rules[rule]
            if dot < len(rhs):
                symbol = rhs[dot]
                if isinstance(symbol, _Nt):
                    for predicted in self._by_lhs.get(symbol.name, ()):
                        item = (predicted, 0, position)
                        if item not in items:
                            items.add(item)
                            agenda.append(item)
                continue
            # Rules never derive the empty string, so origin < position here.
            for parent_rule, parent_dot, parent_origin in chart[origin]:
                parent_rhs = self._rules[parent_rule][1]
                if parent_dot < len(parent_rhs) and parent_rhs[parent_dot] == _Nt(lhs):
                    item = (parent_rule, parent_dot + 1, parent_origin)
                    if item not in items:
                        items.add(item)
                        agenda.append(item)
        return frozenset(items)

    def _scan(self, chart: tuple[frozenset[Item], ...], token: str) -> frozenset[Item]:
        seed = set()
        for rule, dot, origin in chart[-1]:
            rhs = self._rules[rule][1]
            if dot < len(rhs) and rhs[dot] == token:
                seed.add((rule, dot + 1, origin))
        if not seed:
            return frozenset()
        return self._closure(seed, list(chart), len(chart))

    def _allowed(self, items: frozenset[Item]) -> AllowedTokens:
        tokens = set()
        eos = False
        for rule, dot, origin in items:
            lhs, rhs = self._rules[rule]
            if dot < len(rhs):
                if isinstance(rhs[dot], str):
                    tokens.add(rhs[dot])
            elif origin == 0 and lhs == self._start:
                eos = True
        return AllowedTokens(frozenset(tokens), eos)  # type: ignore[arg-type]


@dataclass(frozen=True, slots=True)
class RecognizerState:
    """Immutable Earley chart for one prefix; advancing shares earlier sets."""

    recognizer: PrefixRecognizer
    chart: tuple[frozenset[Item], ...]

    @property
    def length(self) -> int:
        """Number of tokens consumed."""
        return len(self.chart) - 1

    def advance(self, token: str) -> RecognizerState | None:
        """Consume one token; None when the prefix becomes dead."""
        items = self.recognizer._scan(self.chart, token)
        if not items:
            return None
        return RecognizerState(self.recognizer, (*self.chart, items))

    def allowed(self) -> AllowedTokens:
        """Viable continuations of the consumed prefix."""
        return self.recognizer._allowed(self.chart[-1])


def _productive(rules: Sequence[tuple[str, tuple[_Sym, ...]]]) -> set[str]:
    productive: set[str] = set()
    changed = True
    while changed:
        changed = False
        for lhs, rhs in rules:
            if lhs in productive:
                continue
            if all(not isinstance(symbol, _Nt) or symbol.name in productive for symbol in rhs):
                productive.add(lhs)
                changed = True
    return productive


def prefix_allowed(grammar: Grammar, prefix: Sequence[str], pools: ReplacementPools) -> AllowedTokens:
    """Return the tokens that can follow ``prefix`` and whether it is complete.

    Parameters
    ----------
    grammar : Grammar
        Task grammar.
    prefix : Sequence[str]
        Canonical tokens generated so far.
    pools : ReplacementPools
        Slot values; a slot admits exactly the token sequences of its pool.

    Returns
    -------
    AllowedTokens
        ``t`` is in ``tokens`` iff ``prefix + [t]`` prefixes a sentence; ``eos``
        is set iff ``prefix`` itself is a sentence. A dead prefix gives an empty
        set with ``eos`` False.
    """
    return PrefixRecognizer(grammar, pools).allowed(tuple(prefix))
