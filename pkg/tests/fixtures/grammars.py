"""Random acyclic grammars for property tests."""

import numpy as np
import pytest

from canonaug.pii import ReplacementPools
from canonaug.scfg import load_grammar

RANDOM_TERMINALS = ("a", "b", "c", "d", "e")
RANDOM_POOLS = {"item": ["x", "y z"]}


def random_grammar_text(seed: int) -> str:
    """Grammar whose nonterminal N<i> only references N<j> with j > i.

    The last nonterminal has terminal-only rules, so every nonterminal is
    productive and derivations are at most as deep as the number of
    nonterminals.
    """
    rng = np.random.default_rng(seed)
    n_nonterminals = int(rng.integers(2, 5))
    names = [f"N{i}" for i in range(n_nonterminals)]
    lines = ["start N0"]
    for position, name in enumerate(names):
        for _ in range(int(rng.integers(1, 4))):
            rhs = []
            for _ in range(int(rng.integers(1, 4))):
                roll = rng.random()
                if roll < 0.3 and position + 1 < n_nonterminals:
                    rhs.append(f"<{names[int(rng.integers(position + 1, n_nonterminals))]}>")
                elif roll < 0.45:
                    rhs.append("<slot:item>")
                else:
                    rhs.append(RANDOM_TERMINALS[int(rng.integers(len(RANDOM_TERMINALS)))])
            holes = sum(1 for symbol in rhs if symbol.startswith("<"))
            template = "(R" + "".join(f" {{{hole}}}" for hole in range(holes)) + ")"
            lines.append(f"{name} -> {' '.join(rhs)} => {template}")
    return "\n".join(lines) + "\n"


@pytest.fixture(scope="session")
def random_pools():
    return ReplacementPools.from_mapping(RANDOM_POOLS)


@pytest.fixture(scope="session")
def random_grammars():
    """Ten random grammars; the slot category is declared only when used."""
    return [load_grammar(random_grammar_text(seed)) for seed in range(10)]
