"""Sampling derivations from a grammar and enumerating its bounded language."""

from __future__ import annotations

import math
from collections import deque
from typing import TYPE_CHECKING

import numpy as np

from ..exceptions import DepthExhaustedError, EnumerationLimitError
from ..utils import Tokens
from ._types import Derivation, Grammar, SlotFill, SymbolKind, SyncProduction

if TYPE_CHECKING:
    from ..pii import ReplacementPools

DEFAULT_FRONTIER_CAP = 10**6
MAX_ENUMERATION_LENGTH = 20


def min_depth_table(grammar: Grammar) -> dict[str, float]:
    """Minimum derivation depth per nonterminal; ``inf`` when it cannot terminate.

    A production whose children are only terminals and slots has depth 1.
    """
    depth: dict[str, float] = dict.fromkeys(grammar.nonterminals, math.inf)
    changed = True
    while changed:
        changed = False
        for production in grammar.productions:
            candidate = production_depth(production, depth)
            if candidate < depth[production.lhs]:
                depth[production.lhs] = candidate
                changed = True
    return depth


def production_depth(production: SyncProduction, depth: dict[str, float]) -> float:
    """Depth of the shallowest derivation rooted at ``production``."""
    below = [depth[symbol.name] for symbol in production.canonical_rhs if symbol.kind is SymbolKind.NONTERMINAL]
    return 1 + max(below, default=0)


def sample_derivation(
    grammar: Grammar,
    rng: np.random.Generator,
    max_depth: int,
    pools: ReplacementPools,
) -> Derivation:
    """Sample a derivation top-down.

    Each nonterminal picks uniformly among its productions that can still
    terminate within the remaining depth; slots draw uniformly from their pool.

    Raises
    ------
    DepthExhaustedError
        If no production of a nonterminal fits the remaining depth.
    """
    if max_depth < 1:
        raise ValueError(f"max_depth must be >= 1, got {max_depth}")
    pools.require(grammar.slot_categories)
    depth = min_depth_table(grammar)

    def _expand(nonterminal: str, remaining: int) -> Derivation:
        viable = [
            production
            for production in grammar.productions_for(nonterminal)
            if production_depth(production, depth) <= remaining
        ]
        if not viable:
            raise DepthExhaustedError(f"No production of {nonterminal} terminates within depth {remaining}")
        production = viable[int(rng.integers(len(viable)))]
        children: list[Derivation | SlotFill] = []
        for symbol in production.placeholders:
            if symbol.kind is SymbolKind.SLOT:
                assert symbol.slot_category is not None
                values = pools.values(symbol.slot_category)
                children.append(SlotFill(symbol.slot_category, values[int(rng.integers(len(values)))]))
            else:
                children.append(_expand(symbol.name, remaining - 1))
        return Derivation(production, tuple(children))

    return _expand(grammar.start, max_depth)


def _min_lengths(grammar: Grammar, pools: ReplacementPools) -> dict[str, float]:
    shortest_slot = {category: min(len(v) for v in pools.values(category)) for category in grammar.slot_categories}
    lengths: dict[str, float] = dict.fromkeys(grammar.nonterminals, math.inf)
    changed = True
    while changed:
        changed = False
        for production in grammar.productions:
            total = 0.0
            for symbol in production.canonical_rhs:
                if symbol.kind is SymbolKind.TERMINAL:
                    total += 1
                elif symbol.kind is SymbolKind.SLOT:
                    total += shortest_slot[symbol.slot_category]  # type: ignore[index]
                else:
                    total += lengths[symbol.name]
            if total < lengths[production.lhs]:
                lengths[production.lhs] = total
                changed = True
    return lengths


def enumerate_language(
    grammar: Grammar,
    max_len: int,
    pools: ReplacementPools,
    *,
    frontier_cap: int = DEFAULT_FRONTIER_CAP,
) -> list[Tokens]:
    """List every sentence of at most ``max_len`` tokens, sorted and unique.

    Sentential forms are expanded leftmost-first; forms whose shortest possible
    yield exceeds ``max_len`` are pruned and repeated forms are skipped, which
    keeps unary cycles finite.

    Raises
    ------
    ValueError
        If ``max_len`` is above the supported bound.
    EnumerationLimitError
        If the number of pending or visited forms exceeds ``frontier_cap``.
    """
    if max_len > MAX_ENUMERATION_LENGTH:
        raise ValueError(f"max_len must be <= {MAX_ENUMERATION_LENGTH}, got {max_len}")
    if max_len <= 0:
        return []
    pools.require(grammar.slot_categories)
    lengths = _min_lengths(grammar, pools)

    # Forms hold terminal strings and ("nt", name) / ("slot", category) markers.
    Form = tuple[object, ...]

    def _expand_rhs(production: SyncProduction) -> Form:
        return tuple(
            symbol.name
            if symbol.kind is SymbolKind.TERMINAL
            else ("slot", symbol.slot_category)
            if symbol.kind is SymbolKind.SLOT
            else ("nt", symbol.name)
            for symbol in production.canonical_rhs
        )

    def _min_length(form: Form) -> float:
        total = 0.0
        for item in form:
            if isinstance(item, str):
                total += 1
            elif item[0] == "slot":  # type: ignore[index]
                total += min(len(v) for v in pools.values(item[1]))  # type: ignore[index]
            else:
                total += lengths[item[1]]  # type: ignore[index]
        return total

    sentences: set[Tokens] = set()
    start: Form = (("nt", grammar.start),)
    frontier: deque[Form] = deque([start])
    seen: set[Form] = {start}

    while frontier:
        if len(frontier) > frontier_cap or len(seen) > frontier_cap:
            raise EnumerationLimitError(f"Enumeration frontier exceeded {frontier_cap} forms")
        form = frontier.popleft()
        position = next((i for i, item in enumerate(form) if not isinstance(item, str)), None)
        if position is None:
            sentences.add(form)  # type: ignore[arg-type]
            continue
        kind, name = form[position]  # type: ignore[misc]
        if kind == "slot":
            expansions: list[Form] = [tuple(value) for value in pools.values(name)]
        else:
            expansions = [_expand_rhs(production) for production in grammar.productions_for(name)]
        for expansion in expansions:
            successor = (*form[:position], *expansion, *form[position + 1 :])
            if successor in seen or _min_length(successor) > max_len:
                continue
            seen.add(successor)
            frontier.append(successor)

    return sorted(sentences)
