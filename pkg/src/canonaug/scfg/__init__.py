"""Synchronous context-free grammars over canonical utterances and logical forms.

A :class:`Grammar` pairs each canonical right-hand side with a logical
template. A :class:`Derivation` is the single source from which both the
canonical tokens (:func:`render_canonical`) and the logical form
(:func:`render_logical`) are produced, and :func:`parse_canonical` maps
canonical tokens back to a derivation. Slots (``<slot:category>``) hold PII
values; their categories key the replacement pools.

Notes
-----
* Tokens are lowercase, whitespace separated; ``"`` is always its own token.
* Ambiguous parses resolve to the earliest-listed production.
* :func:`prefix_allowed` and :func:`enumerate_language` read slot values from
  pools, :func:`parse_canonical` accepts any quote-free span in a slot.
"""

from __future__ import annotations

__all__ = [
    "AllowedTokens",
    "Derivation",
    "Grammar",
    "PrefixRecognizer",
    "RecognizerState",
    "SlotFill",
    "Symbol",
    "SymbolKind",
    "SyncProduction",
    "can_parse",
    "enumerate_language",
    "iter_slot_fills",
    "load_grammar",
    "load_grammar_file",
    "min_depth_table",
    "parse_canonical",
    "prefix_allowed",
    "render_canonical",
    "render_logical",
    "sample_derivation",
]

from ._loader import load_grammar, load_grammar_file
from ._parse import can_parse, parse_canonical
from ._recognizer import AllowedTokens, PrefixRecognizer, RecognizerState, prefix_allowed
from ._sample import enumerate_language, min_depth_table, sample_derivation
from ._types import (
    Derivation,
    Grammar,
    SlotFill,
    Symbol,
    SymbolKind,
    SyncProduction,
    iter_slot_fills,
    render_canonical,
    render_logical,
)
