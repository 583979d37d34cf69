"""Structural PII detection and replacement over derivations."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np
from loguru import logger

from ..scfg import Derivation, SlotFill, iter_slot_fills
from ..utils import Tokens, contains_subsequence
from ._pools import ReplacementPools


@dataclass(frozen=True, slots=True)
class PIISpan:
    """A slot value located inside a derivation.

    ``path`` lists child indices from the root to the :class:`SlotFill`.
    """

    path: tuple[int, ...]
    category: str
    value: Tokens

    def resolve(self, derivation: Derivation) -> SlotFill:
        """Follow ``path`` and return the slot fill it names."""
        node: Derivation | SlotFill = derivation
        for index in self.path:
            assert isinstance(node, Derivation)
            node = node.children[index]
        if not isinstance(node, SlotFill) or node.category != self.category:
            raise ValueError(f"Path {self.path} does not resolve to a {self.category} slot")
        return node


@dataclass(frozen=True, slots=True)
class Leak:
    """One occurrence of an original PII value in a corpus sentence."""

    sentence: int
    start: int
    value: Tokens


@dataclass(frozen=True, slots=True)
class LeakReport:
    """Result of :func:`assert_no_leak`; empty means no original value survived."""

    leaks: tuple[Leak, ...]

    @property
    def is_clean(self) -> bool:
        """Return True when no leak was found."""
        return not self.leaks

    def __len__(self) -> int:
        """Number of leaked occurrences."""
        return len(self.leaks)


def detect_pii(derivation: Derivation) -> list[PIISpan]:
    """Return every slot fill of a derivation in canonical left-to-right order.

    Examples
    --------
    >>> from canonaug.scfg import load_grammar, parse_canonical
    >>> grammar = load_grammar("start ROOT\\nROOT -> create event with <slot:name> => (CreateEvent :attendee {0})")
    >>> detect_pii(parse_canonical(grammar, "create event with dana"))
    [PIISpan(path=(0,), category='name', value=('dana',))]
    """
    return [PIISpan(path, fill.category, fill.value) for path, fill in iter_slot_fills(derivation)]


def replace_pii(derivation: Derivation, pools: ReplacementPools, rng: np.random.Generator) -> Derivation:
    """Replace every slot value with a fresh draw from the same category.

    The production tree and slot categories are preserved; only values change,
    and a replacement never equals the value it replaces.

    Raises
    ------
    MissingCategoryError
        If a slot category has no pool.
    ExhaustedPoolError
        If a pool's only value is the original.
    """
    pools.require(span.category for span in detect_pii(derivation))

    def _rebuild(node: Derivation) -> Derivation:
        children: list[Derivation | SlotFill] = []
        for child in node.children:
            if isinstance(child, SlotFill):
                children.append(SlotFill(child.category, pools.draw(child.category, rng, exclude=child.value)))
            else:
                children.append(_rebuild(child))
        return Derivation(node.production, tuple(children))

    return _rebuild(derivation)


def assert_no_leak(original_values: Iterable[Sequence[str]], corpus: Sequence[Sequence[str]]) -> LeakReport:
    """Report every contiguous occurrence of an original value in the corpus."""
    originals = sorted({tuple(value) for value in original_values if value})
    leaks = [
        Leak(sentence=index, start=start, value=value)
        for index, sentence in enumerate(corpus)
        for value in originals
        for start in contains_subsequence(sentence, value)
    ]
    if leaks:
        logger.warning("Found {} PII leak(s) across {} sentence(s)", len(leaks), len({leak.sentence for leak in leaks}))
    return LeakReport(tuple(leaks))
