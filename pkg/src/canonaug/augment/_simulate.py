"""Natural-utterance simulation by prompting a completion backend with seed pairs."""

from __future__ import annotations

import re
from collections.abc import Sequence

import numpy as np
from loguru import logger

from ..config import SimulationConfig
from ..exceptions import EmptyCorpusError
from ..lm import CompletionBackend, CompletionRequest, truncate_at_stop
from ..parser import TranslationTable, model1_em
from ..utils import Tokens, as_tokens, detokenize, sha256_hex
from ._datasets import SeedDataset

CANONICAL_PREFIX = "C: "
NATURAL_PREFIX = "N: "
STOP = "\n"

_BLOCK = re.compile(r"^C: (?P<canonical>.*)\nN: (?P<natural>.*)$", re.MULTILINE)


def format_simulation_prompt(pairs: Sequence[tuple[Sequence[str], Sequence[str]]], canonical: Sequence[str]) -> str:
    """Render ``C:``/``N:`` blocks for ``(natural, canonical)`` pairs, ending with an open ``N: `` line.

    Examples
    --------
    >>> print(format_simulation_prompt([(["hi"], ["hello"])], ["hello"]), end="|")
    C: hello
    N: hi
    <BLANKLINE>
    C: hello
    N: |
    """
    blocks = [f"{CANONICAL_PREFIX}{detokenize(c)}\n{NATURAL_PREFIX}{detokenize(n)}" for n, c in pairs]
    blocks.append(f"{CANONICAL_PREFIX}{detokenize(canonical)}\n{NATURAL_PREFIX}")
    return "\n\n".join(blocks)


def parse_simulation_prompt(prompt: str) -> tuple[list[tuple[Tokens, Tokens]], Tokens]:
    """Recover the ``(natural, canonical)`` example pairs and the target canonical of a prompt."""
    body, separator, tail = prompt.rpartition(f"\n\n{CANONICAL_PREFIX}")
    if not separator:
        body, tail = "", prompt.removeprefix(CANONICAL_PREFIX)
    target = tail.removesuffix(NATURAL_PREFIX).rstrip("\n")
    pairs = [
        (as_tokens(match.group("natural")), as_tokens(match.group("canonical"))) for match in _BLOCK.finditer(body)
    ]
    return pairs, as_tokens(target)


def build_simulation_request(
    seed: SeedDataset,
    canonical: Sequence[str],
    rng: np.random.Generator,
    config: SimulationConfig | None = None,
) -> CompletionRequest:
    """Completion request asking for ``config.k`` naturals of ``canonical``.

    Seed pairs are shuffled with ``rng``; ``config.prompt_examples`` caps how
    many are shown.

    Raises
    ------
    EmptyCorpusError
        If the seed dataset is empty.
    """
    config = config or SimulationConfig()
    if not len(seed):
        raise EmptyCorpusError("Cannot simulate naturals without seed pairs")
    pairs = seed.pairs()
    order = rng.permutation(len(pairs))
    if config.prompt_examples is not None:
        order = order[: config.prompt_examples]
    return CompletionRequest(
        prompt=format_simulation_prompt([pairs[int(index)] for index in order], canonical),
        max_tokens=config.max_tokens,
        temperature=config.temperature,
        n_samples=config.k,
        stop=STOP,
    )


def postprocess_completions(completions: Sequence[str]) -> list[Tokens]:
    """Cut each completion at its first newline, tokenize, and drop empty results."""
    naturals = [as_tokens(truncate_at_stop(text, STOP)) for text in completions]
    return [natural for natural in naturals if natural]


def simulate_naturals(
    backend: CompletionBackend,
    seed: SeedDataset,
    canonical: Sequence[str],
    k: int,
    rng: np.random.Generator,
    *,
    config: SimulationConfig | None = None,
) -> list[Tokens]:
    """Ask ``backend`` for ``k`` natural paraphrases of ``canonical``.

    Raises
    ------
    EmptyCorpusError
        If the seed dataset is empty.
    RemoteError
        Propagated from the backend.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    config = (config or SimulationConfig()).model_copy(update={"k": k})
    request = build_simulation_request(seed, canonical, rng, config)
    naturals = postprocess_completions(backend.complete(request))
    logger.trace("Simulated {} natural(s) for {!r}", len(naturals), detokenize(canonical))
    return naturals


class TranslationSimulator:
    """Local completion backend that paraphrases by lexical translation.

    The example pairs of a simulation prompt train a Model 1 table
    ``t(natural | canonical)``; each completion then emits one natural token per
    canonical token of the target, sampled from that token's tempered row.
    Randomness is seeded from ``seed`` and the request fingerprint, so equal
    requests get equal completions.
    """

    def __init__(self, seed: int = 0, *, em_iterations: int = 5, copy_prob: float = 0.5) -> None:
        self.seed = seed
        self.em_iterations = em_iterations
        self.copy_prob = copy_prob
        self._tables: dict[str, TranslationTable] = {}

    def _table(self, pairs: list[tuple[Tokens, Tokens]]) -> TranslationTable:
        key = sha256_hex("\n".join(sorted(f"{detokenize(c)}\t{detokenize(n)}" for n, c in pairs)))
        table = self._tables.get(key)
        if table is None:
            table = model1_em(pairs, self.em_iterations, copy_prob=self.copy_prob)
            self._tables[key] = table
        return table

    def complete(self, request: CompletionRequest) -> list[str]:
        """Return ``n_samples`` simulated naturals for the prompt's target canonical."""
        pairs, target = parse_simulation_prompt(request.prompt)
        if not pairs:
            return [detokenize(target)] * request.n_samples
        table = self._table(pairs)
        rng = np.random.default_rng([self.seed, int(request.fingerprint()[:16], 16)])
        rows = [table.row(token) for token in target]
        return [
            detokenize(self._sample(rows, rng, request.temperature)[: request.max_tokens])
            for _ in range(request.n_samples)
        ]

    @staticmethod
    def _sample(rows: list[dict[str, float]], rng: np.random.Generator, temperature: float) -> list[str]:
        tokens = []
        for row in rows:
            support = sorted(row)
            weights = np.array([row[token] for token in support], dtype=float)
            if temperature == 0:
                tokens.append(support[int(np.argmax(weights))])
                continue
            weights = weights ** (1.0 / temperature)
            tokens.append(support[int(rng.choice(len(support), p=weights / weights.sum()))])
        return tokens
