"""Grammar, production and derivation types."""

from __future__ import annotations

import re
from collections.abc import Mapping
from dataclasses import dataclass, field
from enum import Enum
from typing import TypeAlias

from ..exceptions import AlignmentArityError, GrammarError, UndefinedNonterminalError
from ..utils import QUOTE, Tokens, sha256_hex

HOLE_PATTERN = re.compile(r"\{(\d+)\}")


class SymbolKind(str, Enum):
    """Kinds of symbols on the canonical side of a production."""

    NONTERMINAL = "nonterminal"
    TERMINAL = "terminal"
    SLOT = "slot"


@dataclass(frozen=True, slots=True)
class Symbol:
    """One canonical right-hand-side symbol.

    Slots carry the PII category whose pool supplies their values; terminals
    are literal canonical tokens.
    """

    kind: SymbolKind
    name: str
    slot_category: str | None = None

    def __post_init__(self) -> None:
        """Validate the identifier and the slot category pairing."""
        if not self.name or any(ch.isspace() for ch in self.name):
            raise GrammarError(f"Symbol identifiers must be non-empty without whitespace, got {self.name!r}")
        if (self.kind is SymbolKind.SLOT) != (self.slot_category is not None):
            raise GrammarError(f"slot_category must be set exactly for slot symbols: {self!r}")
        if self.slot_category is not None and (
            not self.slot_category or any(ch.isspace() for ch in self.slot_category)
        ):
            raise GrammarError(f"Invalid slot category {self.slot_category!r}")

    @classmethod
    def nonterminal(cls, name: str) -> Symbol:
        """Build a nonterminal symbol."""
        return cls(SymbolKind.NONTERMINAL, name)

    @classmethod
    def terminal(cls, token: str) -> Symbol:
        """Build a terminal token symbol."""
        return cls(SymbolKind.TERMINAL, token)

    @classmethod
    def slot(cls, category: str) -> Symbol:
        """Build a slot symbol for a PII category."""
        return cls(SymbolKind.SLOT, category, slot_category=category)

    @property
    def is_placeholder(self) -> bool:
        """Return True for symbols aligned with a logical hole."""
        return self.kind is not SymbolKind.TERMINAL

    def __str__(self) -> str:
        """Render the symbol in grammar-file syntax."""
        if self.kind is SymbolKind.NONTERMINAL:
            return f"<{self.name}>"
        if self.kind is SymbolKind.SLOT:
            return f"<slot:{self.slot_category}>"
        return self.name


@dataclass(frozen=True, slots=True)
class SyncProduction:
    """A synchronous rule pairing a canonical right-hand side with a logical template.

    ``alignment[k]`` is the template hole filled by the k-th nonterminal or slot
    occurrence of ``canonical_rhs``.
    """

    lhs: str
    canonical_rhs: tuple[Symbol, ...]
    logical_template: str
    alignment: tuple[int, ...]

    def __post_init__(self) -> None:
        """Check the right-hand side and the placeholder/hole bijection."""
        if not self.canonical_rhs:
            raise GrammarError(f"Production for {self.lhs} has an empty canonical right-hand side")
        holes = [int(match) for match in HOLE_PATTERN.findall(self.logical_template)]
        arity = sum(1 for symbol in self.canonical_rhs if symbol.is_placeholder)
        if len(self.alignment) != arity:
            raise AlignmentArityError(
                f"{self.lhs}: {arity} placeholder(s) but alignment lists {len(self.alignment)} hole(s)"
            )
        if sorted(holes) != sorted(self.alignment) or len(set(holes)) != len(holes):
            raise AlignmentArityError(
                f"{self.lhs}: template holes {sorted(holes)} do not match placeholders {list(self.alignment)}"
            )

    @property
    def placeholders(self) -> tuple[Symbol, ...]:
        """Nonterminal and slot occurrences in canonical order."""
        return tuple(symbol for symbol in self.canonical_rhs if symbol.is_placeholder)

    @property
    def arity(self) -> int:
        """Number of children a derivation of this production has."""
        return len(self.alignment)

    @property
    def key(self) -> str:
        """``LHS -> rhs`` identifier, unique within a grammar unless rules repeat."""
        return f"{self.lhs} -> {' '.join(str(symbol) for symbol in self.canonical_rhs)}"

    def __str__(self) -> str:
        """Render the production in grammar-file syntax."""
        return f"{self.key} => {self.logical_template}"


@dataclass(frozen=True, slots=True)
class Grammar:
    """A synchronous context-free grammar over canonical and logical forms."""

    start: str
    productions: tuple[SyncProduction, ...]
    slot_categories: frozenset[str]
    _by_lhs: Mapping[str, tuple[SyncProduction, ...]] = field(
        init=False, repr=False, compare=False, hash=False, default_factory=dict
    )

    def __post_init__(self) -> None:
        """Index productions and enforce grammar invariants."""
        index: dict[str, list[SyncProduction]] = {}
        for production in self.productions:
            index.setdefault(production.lhs, []).append(production)
        object.__setattr__(self, "_by_lhs", {lhs: tuple(prods) for lhs, prods in index.items()})

        if self.start not in index:
            raise UndefinedNonterminalError(f"Start symbol {self.start} has no production")
        for production in self.productions:
            for symbol in production.canonical_rhs:
                if symbol.kind is SymbolKind.NONTERMINAL and symbol.name not in index:
                    raise UndefinedNonterminalError(f"{production.lhs} references undefined {symbol.name}")
                if symbol.kind is SymbolKind.SLOT and symbol.slot_category not in self.slot_categories:
                    raise GrammarError(f"Slot category {symbol.slot_category} is not declared")

    @property
    def nonterminals(self) -> tuple[str, ...]:
        """Nonterminals in order of first definition."""
        return tuple(self._by_lhs)

    @property
    def terminals(self) -> frozenset[str]:
        """Every literal canonical token used by the grammar."""
        return frozenset(
            symbol.name
            for production in self.productions
            for symbol in production.canonical_rhs
            if symbol.kind is SymbolKind.TERMINAL
        )

    def productions_for(self, nonterminal: str) -> tuple[SyncProduction, ...]:
        """Return productions of a nonterminal in file order."""
        return self._by_lhs.get(nonterminal, ())

    def to_text(self) -> str:
        """Render the grammar back to the line-oriented file format."""
        lines = [f"start {self.start}"]
        lines.extend(str(production) for production in self.productions)
        return "\n".join(lines) + "\n"

    def fingerprint(self) -> str:
        """Return a stable hash identifying this grammar."""
        return sha256_hex(self.to_text())


@dataclass(frozen=True, slots=True)
class SlotFill:
    """A concrete value for a slot, e.g. an attendee name."""

    category: str
    value: Tokens

    def __post_init__(self) -> None:
        """Check that the value is a non-empty token sequence without quotes."""
        if not self.value:
            raise GrammarError(f"Slot value for {self.category} must be non-empty")
        if QUOTE in self.value:
            raise GrammarError(f"Slot value for {self.category} cannot contain a quote token")

    def render_logical(self) -> str:
        """Render as a quoted string literal."""
        return f'"{" ".join(self.value)}"'


Child: TypeAlias = "Derivation | SlotFill"


@dataclass(frozen=True, slots=True)
class Derivation:
    """A parse tree under a grammar; canonical and logical strings both render from it."""

    production: SyncProduction
    children: tuple[Child, ...] = ()

    def __post_init__(self) -> None:
        """Check arity and that each child fits its placeholder."""
        placeholders = self.production.placeholders
        if len(self.children) != len(placeholders):
            raise GrammarError(
                f"{self.production.lhs} expects {len(placeholders)} children, got {len(self.children)}"
            )
        for symbol, child in zip(placeholders, self.children, strict=True):
            if symbol.kind is SymbolKind.SLOT:
                if not isinstance(child, SlotFill) or child.category != symbol.slot_category:
                    raise GrammarError(f"Slot <slot:{symbol.slot_category}> needs a matching SlotFill")
            elif not isinstance(child, Derivation) or child.production.lhs != symbol.name:
                raise GrammarError(f"Placeholder <{symbol.name}> needs a derivation of {symbol.name}")

    def canonical(self) -> Tokens:
        """Shorthand for :func:`render_canonical`."""
        return render_canonical(self)

    def logical(self) -> str:
        """Shorthand for :func:`render_logical`."""
        return render_logical(self)


def render_canonical(derivation: Derivation) -> Tokens:
    """Render the canonical token sequence of a derivation.

    Terminals are emitted as they appear in ``canonical_rhs``; nonterminals and
    slots expand in place.

    Examples
    --------
    >>> from canonaug.scfg import load_grammar, parse_canonical
    >>> grammar = load_grammar("start ROOT\\nROOT -> hello => (Greet)")
    >>> render_canonical(parse_canonical(grammar, ("hello",)))
    ('hello',)
    """
    tokens: list[str] = []
    children = iter(derivation.children)
    for symbol in derivation.production.canonical_rhs:
        if symbol.kind is SymbolKind.TERMINAL:
            tokens.append(symbol.name)
            continue
        child = next(children)
        tokens.extend(child.value if isinstance(child, SlotFill) else render_canonical(child))
    return tuple(tokens)


def render_logical(derivation: Derivation) -> str:
    """Render the logical form by substituting children into the template holes."""
    rendered = {
        hole: child.render_logical() if isinstance(child, SlotFill) else render_logical(child)
        for hole, child in zip(derivation.production.alignment, derivation.children, strict=True)
    }
    return HOLE_PATTERN.sub(lambda match: rendered[int(match.group(1))], derivation.production.logical_template)


def iter_slot_fills(derivation: Derivation) -> list[tuple[tuple[int, ...], SlotFill]]:
    """Return ``(path, fill)`` for every slot in canonical left-to-right order.

    A path lists child indices from the root down to the slot.
    """
    found: list[tuple[tuple[int, ...], SlotFill]] = []

    def _walk(node: Derivation, path: tuple[int, ...]) -> None:
        for index, child in enumerate(node.children):
            if isinstance(child, SlotFill):
                found.append(((*path, index), child))
            else:
                _walk(child, (*path, index))

    _walk(derivation, ())
    return found
