"""Reader for the line-oriented grammar file format.

Format::

    # comment
    start ROOT
    ROOT -> create event with <slot:name> => (CreateEvent :attendee {0})
    ROOT -> delete <ROOT_FIND> => (Delete {0})

Hole ``{k}`` receives the k-th ``<NT>`` or ``<slot:category>`` placeholder of the
canonical side. A ``#`` starts a comment when it opens a line or follows
whitespace and is followed by whitespace, so logical forms such as
``#(String "x")`` survive.
"""

from __future__ import annotations

import re
from pathlib import Path

from loguru import logger

from ..exceptions import AlignmentArityError, GrammarSyntaxError, UndefinedNonterminalError
from ..utils import QUOTE
from ._types import HOLE_PATTERN, Grammar, Symbol, SymbolKind, SyncProduction

_COMMENT = re.compile(r"(?:^|\s)#(?:\s|$).*$")
_IDENTIFIER = re.compile(r"^[^\s<>]+$")
_PLACEHOLDER = re.compile(r"^<(?:(slot):)?([^\s<>]+)>$")


def _strip_comment(line: str) -> str:
    return _COMMENT.sub("", line).strip()


def _parse_symbol(raw: str, *, line: int) -> Symbol:
    match = _PLACEHOLDER.match(raw)
    if match:
        is_slot, name = match.groups()
        return Symbol.slot(name) if is_slot else Symbol.nonterminal(name)
    if "<" in raw or ">" in raw:
        raise GrammarSyntaxError(f"Malformed placeholder {raw!r}", line=line)
    return Symbol.terminal(raw.lower())


def _split_rhs(raw: str, *, line: int) -> list[Symbol]:
    # Quotes are standalone tokens on the canonical side.
    pieces = raw.replace(QUOTE, f" {QUOTE} ").split()
    if not pieces:
        raise GrammarSyntaxError("Empty canonical right-hand side", line=line)
    return [_parse_symbol(piece, line=line) for piece in pieces]


def _parse_production(text: str, *, line: int) -> SyncProduction:
    if "->" not in text or "=>" not in text:
        raise GrammarSyntaxError("Expected 'NT -> canonical => logical'", line=line)
    lhs, rest = (part.strip() for part in text.split("->", 1))
    canonical, template = (part.strip() for part in rest.split("=>", 1))
    if not _IDENTIFIER.match(lhs):
        raise GrammarSyntaxError(f"Invalid left-hand side {lhs!r}", line=line)
    if not template:
        raise GrammarSyntaxError("Empty logical template", line=line)

    rhs = _split_rhs(canonical, line=line)
    arity = sum(1 for symbol in rhs if symbol.is_placeholder)
    holes = sorted(int(hole) for hole in HOLE_PATTERN.findall(template))
    if holes != list(range(arity)):
        raise AlignmentArityError(
            f"line {line}: {arity} placeholder(s) need holes {{0}}..{{{arity - 1}}} exactly once, found {holes}"
        )
    return SyncProduction(
        lhs=lhs,
        canonical_rhs=tuple(rhs),
        logical_template=template,
        alignment=tuple(range(arity)),
    )


def load_grammar(text: str) -> Grammar:
    """Parse grammar-file content into a :class:`Grammar`.

    Parameters
    ----------
    text : str
        Grammar file content.

    Returns
    -------
    Grammar
        The grammar, with productions in file order.

    Raises
    ------
    GrammarSyntaxError
        For malformed lines, or when no ``start`` line is present.
    UndefinedNonterminalError
        When a right-hand side references a nonterminal without productions.
    AlignmentArityError
        When placeholders and template holes do not pair up.
    """
    start: str | None = None
    productions: list[SyncProduction] = []
    first_use: dict[str, int] = {}
    line_count = 0

    for line_number, raw_line in enumerate(text.splitlines(), start=1):
        line_count = line_number
        line = _strip_comment(raw_line)
        if not line:
            continue
        if start is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "start" or not _IDENTIFIER.match(parts[1]):
                raise GrammarSyntaxError("First non-comment line must be 'start <NT>'", line=line_number)
            start = parts[1]
            continue
        production = _parse_production(line, line=line_number)
        productions.append(production)
        for symbol in production.canonical_rhs:
            if symbol.kind is SymbolKind.NONTERMINAL:
                first_use.setdefault(symbol.name, line_number)

    if start is None:
        raise GrammarSyntaxError("No start symbol", line=max(line_count, 1))

    defined = {production.lhs for production in productions}
    for name, line_number in first_use.items():
        if name not in defined:
            raise UndefinedNonterminalError(f"line {line_number}: nonterminal {name} has no production")
    if start not in defined:
        raise UndefinedNonterminalError(f"Start symbol {start} has no production")

    categories = frozenset(
        symbol.slot_category
        for production in productions
        for symbol in production.canonical_rhs
        if symbol.slot_category is not None
    )
    grammar = Grammar(start=start, productions=tuple(productions), slot_categories=categories)
    logger.debug(
        "Loaded grammar start={} productions={} slots={}", start, len(productions), sorted(categories)
    )
    return grammar


def load_grammar_file(fpath: Path | str) -> Grammar:
    """Read and parse a grammar file."""
    return load_grammar(Path(fpath).read_text(encoding="utf-8"))
