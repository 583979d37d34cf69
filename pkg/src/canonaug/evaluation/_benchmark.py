"""Synthetic ToyCal-style benchmark: gold pairs rendered from grammar samples through noisy templates."""

from __future__ import annotations

import re
from collections.abc import Mapping
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
from loguru import logger

from ..augment import SeedDataset, UnlabeledSet, write_pairs
from ..config import BenchmarkConfig
from ..exceptions import TemplateCoverageError
from ..pii import ReplacementPools
from ..scfg import Derivation, Grammar, SlotFill, load_grammar_file, sample_derivation
from ..utils import QUOTE, Tokens, as_tokens, read_json, write_json

_HOLE = re.compile(r"^\{(\d+)\}$")
MAX_DRAW_FACTOR = 50


@dataclass(frozen=True, slots=True)
class NaturalRenderer:
    """Natural-language templates per production plus a token noise model.

    Templates are whitespace-tokenized; a ``{k}`` token is filled by the k-th
    child of the derivation, quotes are separate tokens. Noise touches template
    words only: each may be swapped for a synonym with ``synonym_prob``, or
    dropped with ``drop_prob``. Slot values and quotes pass through untouched.
    """

    templates: Mapping[str, tuple[Tokens, ...]]
    synonyms: Mapping[str, tuple[str, ...]]
    synonym_prob: float = 0.0
    drop_prob: float = 0.0

    @classmethod
    def from_file(cls, fpath: Path | str, *, synonym_prob: float = 0.0, drop_prob: float = 0.0) -> NaturalRenderer:
        """Read ``{"templates": {key: [text]}, "synonyms": {word: [word]}}``."""
        content = read_json(Path(fpath))
        return cls(
            templates={key: tuple(as_tokens(text) for text in texts) for key, texts in content["templates"].items()},
            synonyms={word: tuple(options) for word, options in content.get("synonyms", {}).items()},
            synonym_prob=synonym_prob,
            drop_prob=drop_prob,
        )

    def check_coverage(self, grammar: Grammar) -> None:
        """Raise :class:`TemplateCoverageError` when a production has no template."""
        missing = [production.key for production in grammar.productions if not self.templates.get(production.key)]
        if missing:
            raise TemplateCoverageError(f"No natural template for production(s): {missing}")

    def render(self, derivation: Derivation, rng: np.random.Generator) -> Tokens:
        """Render one natural utterance for ``derivation``."""
        options = self.templates[derivation.production.key]
        template = options[int(rng.integers(len(options)))]
        tokens: list[str] = []
        for token in template:
            hole = _HOLE.match(token)
            if hole is not None:
                child = derivation.children[int(hole.group(1))]
                tokens.extend(child.value if isinstance(child, SlotFill) else self.render(child, rng))
                continue
            if token == QUOTE:
                tokens.append(token)
                continue
            tokens.extend(self._perturb(token, rng))
        return tuple(tokens)

    def _perturb(self, token: str, rng: np.random.Generator) -> list[str]:
        if self.drop_prob and rng.random() < self.drop_prob:
            return []
        synonyms = self.synonyms.get(token)
        if synonyms and self.synonym_prob and rng.random() < self.synonym_prob:
            return list(as_tokens(synonyms[int(rng.integers(len(synonyms)))]))
        return [token]


@dataclass(frozen=True, slots=True)
class BenchmarkSplits:
    """Disjoint seed, unlabeled and test splits of one benchmark draw."""

    seed: SeedDataset
    unlabeled: UnlabeledSet
    test: tuple[tuple[Tokens, Tokens], ...]

    def write(self, folder: Path | str) -> Path:
        """Write ``seed.jsonl``, ``unlabeled.jsonl`` and ``test.jsonl``."""
        folder = Path(folder)
        folder.mkdir(parents=True, exist_ok=True)
        self.seed.write(folder / "seed.jsonl")
        self.unlabeled.write(folder / "unlabeled.jsonl")
        write_pairs(folder / "test.jsonl", self.test)
        return folder


@dataclass(frozen=True, slots=True)
class SyntheticBenchmark:
    """Grammar, pools and renderer from which gold data is drawn.

    Attributes
    ----------
    grammar : Grammar
        Task grammar.
    pools : ReplacementPools
        Pools handed to the augmentation pipeline.
    generator_pools : ReplacementPools
        Slot values of the gold data; disjoint from ``pools`` in ToyCal.
    renderer : NaturalRenderer
        Templates and noise.
    sizes : tuple[int, int, int]
        ``(|D|, |U|, |test|)``.
    max_depth : int
        Derivation depth bound.
    """

    grammar: Grammar
    pools: ReplacementPools
    generator_pools: ReplacementPools
    renderer: NaturalRenderer
    sizes: tuple[int, int, int]
    max_depth: int = 6

    def __post_init__(self) -> None:
        """Check template coverage."""
        self.renderer.check_coverage(self.grammar)

    @classmethod
    def from_config(cls, config: BenchmarkConfig) -> SyntheticBenchmark:
        """Load every file named by ``config``."""
        return cls(
            grammar=load_grammar_file(config.grammar),
            pools=ReplacementPools.from_directory(config.pools),
            generator_pools=ReplacementPools.from_directory(config.generator_pools),
            renderer=NaturalRenderer.from_file(
                config.templates, synonym_prob=config.synonym_prob, drop_prob=config.drop_prob
            ),
            sizes=(config.n_seed, config.n_unlabeled, config.n_test),
            max_depth=config.max_depth,
        )

    def sample(self, rng: np.random.Generator) -> BenchmarkSplits:
        """Draw gold pairs and split them into seed, unlabeled and test.

        Pairs are unique by ``(natural, canonical)``, so the splits are disjoint.

        Raises
        ------
        ValueError
            If the grammar cannot produce enough distinct pairs.
        """
        n_seed, n_unlabeled, n_test = self.sizes
        total = n_seed + n_unlabeled + n_test
        pairs: dict[tuple[Tokens, Tokens], None] = {}
        for _ in range(MAX_DRAW_FACTOR * total):
            if len(pairs) == total:
                break
            derivation = sample_derivation(self.grammar, rng, self.max_depth, self.generator_pools)
            natural = self.renderer.render(derivation, rng)
            if natural:
                pairs.setdefault((natural, derivation.canonical()), None)
        if len(pairs) < total:
            raise ValueError(f"Only {len(pairs)} distinct pairs after {MAX_DRAW_FACTOR * total} draws, need {total}")

        ordered = list(pairs)
        shuffled = [ordered[int(index)] for index in rng.permutation(total)]
        seed = SeedDataset.from_pairs(shuffled[:n_seed], self.grammar)
        unlabeled = UnlabeledSet(tuple(natural for natural, _ in shuffled[n_seed : n_seed + n_unlabeled]))
        test = tuple(shuffled[n_seed + n_unlabeled :])
        logger.debug("Sampled benchmark splits: seed={}, unlabeled={}, test={}", n_seed, n_unlabeled, n_test)
        return BenchmarkSplits(seed=seed, unlabeled=unlabeled, test=test)

    def manifest(self) -> dict[str, Any]:
        """Description written next to emitted splits."""
        n_seed, n_unlabeled, n_test = self.sizes
        return {
            "grammar_hash": self.grammar.fingerprint(),
            "sizes": {"seed": n_seed, "unlabeled": n_unlabeled, "test": n_test},
            "synonym_prob": self.renderer.synonym_prob,
            "drop_prob": self.renderer.drop_prob,
            "max_depth": self.max_depth,
        }


def make_benchmark(config: BenchmarkConfig, rng: np.random.Generator) -> tuple[SyntheticBenchmark, BenchmarkSplits]:
    """Load the benchmark described by ``config`` and draw one set of splits.

    Raises
    ------
    TemplateCoverageError
        If a grammar production has no natural template.
    """
    benchmark = SyntheticBenchmark.from_config(config)
    return benchmark, benchmark.sample(rng)


def write_benchmark(benchmark: SyntheticBenchmark, splits: BenchmarkSplits, folder: Path | str) -> Path:
    """Write the splits and a ``benchmark.json`` manifest."""
    folder = splits.write(folder)
    write_json(folder / "benchmark.json", benchmark.manifest())
    return folder

