import itertools

import numpy as np
import pytest

from canonaug.augment import (
    CycleOutcome,
    Provenance,
    cycle_filter,
    edit_distance,
    norank_filter,
    rerank_filter,
    rerank_score,
)
from canonaug.config import RerankWeights
from canonaug.exceptions import EmptyCorpusError, NoParseError
from canonaug.parser import train_parser
from canonaug.scfg import parse_canonical
from canonaug.utils import tokenize

CANONICAL = tokenize("create event with dana")
NATURALS = [tokenize("create event with dana"), tokenize("set up a meeting with dana"), ("hello",)]


def _levenshtein(a, b):
    previous = list(range(len(b) + 1))
    for i, left in enumerate(a, start=1):
        current = [i]
        for j, right in enumerate(b, start=1):
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (left != right)))
        previous = current
    return previous[-1]


@pytest.fixture
def toycal_parser(toycal_seed, toycal_grammar, toycal_pools):
    return train_parser(toycal_seed.pairs(), grammar=toycal_grammar, pools=toycal_pools)


def test_edit_distance_on_short_sequences():
    alphabet = ("a", "b", "c")
    sequences = [seq for length in range(5) for seq in itertools.product(alphabet, repeat=length)]
    for a, b in itertools.product(sequences, repeat=2):
        assert edit_distance(a, b) == _levenshtein(a, b)


def test_edit_distance_on_random_sequences():
    rng = np.random.default_rng(0)
    vocabulary = ["w0", "w1", "w2", "w3", "w4", "w5"]
    for _ in range(10_000):
        a = list(rng.choice(vocabulary, size=int(rng.integers(0, 9))))
        b = list(rng.choice(vocabulary, size=int(rng.integers(0, 9))))
        assert edit_distance(a, b) == _levenshtein(a, b)


def test_edit_distance_is_token_level():
    assert edit_distance(["meeting"], ["meting"]) == 1
    assert edit_distance(("set", "up"), ()) == 2


def test_rerank_score_formula(toycal_parser):
    weights = RerankWeights(alpha=0.7, beta=0.3, cap_ratio=0.5)
    natural = NATURALS[1]
    expected = 0.7 * toycal_parser.score_parse(natural, CANONICAL) / 4 + 0.3 * min(4, 2.0) / 2.0
    assert rerank_score(toycal_parser, CANONICAL, natural, weights) == pytest.approx(expected)


def test_rerank_rejects_empty_canonical(toycal_parser):
    with pytest.raises(ValueError, match="empty"):
        rerank_score(toycal_parser, (), ("hi",), RerankWeights())


def test_rerank_choice_survives_common_scaling(toycal_parser):
    base = rerank_filter(toycal_parser, CANONICAL, NATURALS, RerankWeights(alpha=1.0, beta=0.5))
    scaled = rerank_filter(toycal_parser, CANONICAL, NATURALS, RerankWeights(alpha=4.0, beta=2.0))

    assert scaled.natural == base.natural
    assert scaled.filter_score == pytest.approx(4 * base.filter_score)


def test_rerank_without_edit_term_follows_parser(toycal_parser):
    chosen = rerank_filter(toycal_parser, CANONICAL, NATURALS, RerankWeights(alpha=1.0, beta=0.0))
    best = max(NATURALS, key=lambda natural: toycal_parser.score_parse(natural, CANONICAL))
    assert chosen.natural == best


def test_rerank_ties_keep_earliest(toycal_parser):
    chosen = rerank_filter(toycal_parser, CANONICAL, NATURALS, RerankWeights(alpha=0.0, beta=1.0))

    assert chosen.natural == NATURALS[1]
    assert chosen.filter_score == 1.0
    assert chosen.filter_kind == "rerank"
    assert chosen.derivation == parse_canonical(toycal_parser.grammar, CANONICAL)


def test_rerank_errors(toycal_parser):
    with pytest.raises(EmptyCorpusError):
        rerank_filter(toycal_parser, CANONICAL, [])
    with pytest.raises(NoParseError):
        rerank_filter(toycal_parser, ("create", "event"), NATURALS)


def test_norank_keeps_first(toycal_grammar):
    derivation = parse_canonical(toycal_grammar, CANONICAL)
    pair = norank_filter(CANONICAL, NATURALS[1:], derivation, provenance=Provenance.FROM_D)

    assert pair.natural == NATURALS[1]
    assert pair.filter_kind == "norank"
    assert pair.provenance is Provenance.FROM_D
    with pytest.raises(EmptyCorpusError):
        norank_filter(CANONICAL, [], derivation)


def test_cycle_filter_keeps_pairs_that_parse_back(toycal_parser):
    candidates = [
        (CANONICAL, NATURALS[1]),
        (CANONICAL, ("hello",)),
        (tokenize('find event called " retro "'), tokenize('find the event called "retro"')),
    ]
    outcome = cycle_filter(toycal_parser, candidates)

    assert outcome.checked == 3
    assert [pair.natural for pair in outcome.accepted] == [NATURALS[1], tokenize('find the event called "retro"')]
    assert outcome.rate == pytest.approx(2 / 3)
    for pair in outcome.accepted:
        assert toycal_parser.parse_top1(pair.natural).canonical == pair.canonical
        assert pair.filter_kind == "cycle"


def test_cycle_rate_without_candidates():
    assert CycleOutcome(accepted=(), checked=0).rate == 0.0
