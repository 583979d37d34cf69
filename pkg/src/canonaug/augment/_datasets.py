"""Seed, unlabeled, canonical and silver datasets with their JSONL records."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Literal

from ..exceptions import NoParseError
from ..scfg import Derivation, Grammar, parse_canonical
from ..utils import Tokens, as_tokens, detokenize, iter_jsonl, write_jsonl

SilverFilter = Literal["rerank", "cycle", "norank"]


class Provenance(str, Enum):
    """Where the canonical utterances of a set came from."""

    FROM_U = "from_u"
    FROM_D = "from_d"
    GRAMMAR_SAMPLE = "grammar_sample"


@dataclass(frozen=True, slots=True)
class SeedExample:
    """One gold pair of the seed dataset."""

    natural: Tokens
    canonical: Tokens
    derivation: Derivation

    def __post_init__(self) -> None:
        """Check that the derivation renders to the canonical tokens."""
        if self.derivation.canonical() != self.canonical:
            raise ValueError(f"Derivation does not render to {detokenize(self.canonical)!r}")


@dataclass(frozen=True, slots=True)
class SeedDataset:
    """The small gold set of ``(natural, canonical)`` pairs."""

    examples: tuple[SeedExample, ...]

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[Sequence[str] | str, Sequence[str] | str]], grammar: Grammar) -> SeedDataset:
        """Parse every canonical side under ``grammar``.

        Raises
        ------
        NoParseError
            If a canonical side is outside the grammar's language.
        """
        examples = []
        for index, (natural, canonical) in enumerate(pairs):
            canonical_tokens = as_tokens(canonical)
            try:
                derivation = parse_canonical(grammar, canonical_tokens)
            except NoParseError as exc:
                raise NoParseError(f"seed pair {index}: {exc}") from exc
            examples.append(SeedExample(as_tokens(natural), canonical_tokens, derivation))
        return cls(tuple(examples))

    @classmethod
    def read(cls, fpath: Path | str, grammar: Grammar) -> SeedDataset:
        """Read ``{natural, canonical}`` records."""
        return cls.from_pairs(((r["natural"], r["canonical"]) for r in iter_jsonl(Path(fpath))), grammar)

    def write(self, fpath: Path | str) -> int:
        """Write ``{natural, canonical}`` records."""
        return write_jsonl(Path(fpath), (pair_record(e.natural, e.canonical) for e in self.examples))

    @property
    def canonicals(self) -> list[Tokens]:
        """Canonical sides in dataset order."""
        return [example.canonical for example in self.examples]

    def pairs(self) -> list[tuple[Tokens, Tokens]]:
        """``(natural, canonical)`` pairs in dataset order."""
        return [(example.natural, example.canonical) for example in self.examples]

    def __len__(self) -> int:
        """Number of pairs."""
        return len(self.examples)


@dataclass(frozen=True, slots=True)
class UnlabeledSet:
    """Natural utterances without parses."""

    utterances: tuple[Tokens, ...]

    def __post_init__(self) -> None:
        """Reject empty utterances."""
        if any(not utterance for utterance in self.utterances):
            raise ValueError("Unlabeled utterances must be non-empty")

    @classmethod
    def from_texts(cls, texts: Iterable[Sequence[str] | str]) -> UnlabeledSet:
        """Tokenize raw texts, skipping blank ones."""
        return cls(tuple(tokens for tokens in (as_tokens(text) for text in texts) if tokens))

    @classmethod
    def read(cls, fpath: Path | str) -> UnlabeledSet:
        """Read ``{natural}`` records."""
        return cls.from_texts(record["natural"] for record in iter_jsonl(Path(fpath)))

    def write(self, fpath: Path | str) -> int:
        """Write ``{natural}`` records."""
        return write_jsonl(Path(fpath), ({"natural": detokenize(u)} for u in self.utterances))

    def __len__(self) -> int:
        """Number of utterances."""
        return len(self.utterances)


@dataclass(frozen=True, slots=True)
class CanonicalSet:
    """Generated derivations, unique by rendered canonical string and sorted by it."""

    items: tuple[Derivation, ...]
    provenance: Provenance

    @classmethod
    def from_derivations(cls, derivations: Iterable[Derivation], provenance: Provenance) -> CanonicalSet:
        """Deduplicate by canonical string, keeping the first derivation of each."""
        unique: dict[str, Derivation] = {}
        for derivation in derivations:
            unique.setdefault(detokenize(derivation.canonical()), derivation)
        return cls(tuple(unique[key] for key in sorted(unique)), provenance)

    @property
    def canonicals(self) -> list[Tokens]:
        """Rendered canonical utterances."""
        return [derivation.canonical() for derivation in self.items]

    def to_records(self) -> list[dict[str, Any]]:
        """``{canonical, provenance}`` records."""
        return [{"canonical": detokenize(c), "provenance": self.provenance.value} for c in self.canonicals]

    def __len__(self) -> int:
        """Number of unique canonicals."""
        return len(self.items)


@dataclass(frozen=True, slots=True)
class SilverPair:
    """An automatically generated training pair."""

    canonical: Tokens
    natural: Tokens
    derivation: Derivation
    filter_score: float
    filter_kind: SilverFilter
    provenance: Provenance

    def __post_init__(self) -> None:
        """Check that the derivation renders to the canonical tokens."""
        if self.derivation.canonical() != self.canonical:
            raise ValueError(f"Derivation does not render to {detokenize(self.canonical)!r}")

    @property
    def key(self) -> tuple[Tokens, Tokens]:
        """Deduplication key."""
        return (self.canonical, self.natural)

    def to_record(self) -> dict[str, Any]:
        """Silver JSONL record."""
        return {
            **pair_record(self.natural, self.canonical),
            "filter_kind": self.filter_kind,
            "filter_score": self.filter_score,
            "provenance": self.provenance.value,
        }


def pair_record(natural: Sequence[str], canonical: Sequence[str]) -> dict[str, str]:
    """``{natural, canonical}`` record."""
    return {"natural": detokenize(natural), "canonical": detokenize(canonical)}


def merge_silver(*batches: Iterable[SilverPair]) -> tuple[SilverPair, ...]:
    """Union of silver batches, unique by ``(canonical, natural)``, sorted by that key.

    The first pair seen for a key wins.
    """
    merged: dict[tuple[Tokens, Tokens], SilverPair] = {}
    for batch in batches:
        for pair in batch:
            merged.setdefault(pair.key, pair)
    return tuple(merged[key] for key in sorted(merged))


def read_pairs(fpath: Path | str) -> list[tuple[Tokens, Tokens]]:
    """Read ``(natural, canonical)`` pairs from ``{natural, canonical}`` records."""
    return [(as_tokens(r["natural"]), as_tokens(r["canonical"])) for r in iter_jsonl(Path(fpath))]


def write_pairs(fpath: Path | str, pairs: Iterable[tuple[Sequence[str], Sequence[str]]]) -> int:
    """Write ``(natural, canonical)`` pairs as records."""
    return write_jsonl(Path(fpath), (pair_record(natural, canonical) for natural, canonical in pairs))
