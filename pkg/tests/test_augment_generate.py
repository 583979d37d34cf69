import numpy as np
import pytest

from canonaug.augment import Provenance, UnlabeledSet, gen_from_d, gen_from_u, grammar_sample_set
from canonaug.config import DecodeParams
from canonaug.exceptions import DepthExhaustedError
from canonaug.lm import train_ngram
from canonaug.parser import train_parser
from canonaug.scfg import can_parse, iter_slot_fills, load_grammar


@pytest.fixture
def seed_lm(toycal_seed, toycal_grammar):
    return train_ngram(toycal_seed.canonicals, 3, 0.1, extra_vocabulary=toycal_grammar.terminals)


def test_from_d_stays_in_grammar(seed_lm, toycal_grammar, toycal_seed, toycal_pools):
    outcome = gen_from_d(seed_lm, toycal_grammar, toycal_seed, toycal_pools, 40, np.random.default_rng(0))

    assert outcome.attempted == 40
    assert outcome.skipped == 0
    assert outcome.canonicals.provenance is Provenance.FROM_D
    assert 0 < outcome.generated <= 40
    for derivation in outcome.canonicals.items:
        assert can_parse(toycal_grammar, derivation.canonical())
        for _, fill in iter_slot_fills(derivation):
            assert fill.value in toycal_pools.values(fill.category)


def test_from_d_is_reproducible(seed_lm, toycal_grammar, toycal_seed, toycal_pools):
    params = DecodeParams(temperature=0.8)
    first = gen_from_d(seed_lm, toycal_grammar, toycal_seed, toycal_pools, 15, np.random.default_rng(5), params=params)
    second = gen_from_d(seed_lm, toycal_grammar, toycal_seed, toycal_pools, 15, np.random.default_rng(5), params=params)
    assert first == second


def test_from_d_counts_decode_failures(seed_lm, toycal_grammar, toycal_seed, toycal_pools):
    outcome = gen_from_d(
        seed_lm, toycal_grammar, toycal_seed, toycal_pools, 5, np.random.default_rng(0), params=DecodeParams(max_len=1)
    )
    assert outcome.attempted == 5
    assert outcome.generated + outcome.skipped <= 5
    assert outcome.generated <= 1


def test_generators_need_draws(seed_lm, toycal_grammar, toycal_seed, toycal_pools):
    with pytest.raises(ValueError, match="n must be"):
        gen_from_d(seed_lm, toycal_grammar, toycal_seed, toycal_pools, 0, np.random.default_rng(0))
    with pytest.raises(ValueError, match="n must be"):
        grammar_sample_set(toycal_grammar, toycal_pools, 0, np.random.default_rng(0))


def test_grammar_sample_covers_small_language(toycal_grammar, singleton_pools):
    outcome = grammar_sample_set(toycal_grammar, singleton_pools, 200, np.random.default_rng(0))

    assert outcome.attempted == 200
    assert outcome.generated == 5
    assert outcome.canonicals.provenance is Provenance.GRAMMAR_SAMPLE
    assert outcome.canonicals.canonicals == sorted(outcome.canonicals.canonicals, key=" ".join)


def test_grammar_sample_depth(random_pools):
    grammar = load_grammar("start A\nA -> x <B> => (X {0})\nB -> y <A> => (Y {0})")
    with pytest.raises(DepthExhaustedError):
        grammar_sample_set(grammar, random_pools, 3, np.random.default_rng(0), max_depth=4)


def test_from_u_replaces_values(toycal_seed, toycal_grammar, toycal_pools):
    parser = train_parser(toycal_seed.pairs(), grammar=toycal_grammar, pools=toycal_pools)
    unlabeled = UnlabeledSet.from_texts(["set up a meeting with zoe", "hi there", 'cancel the "gala" event'])
    outcome = gen_from_u(parser, unlabeled, toycal_pools, np.random.default_rng(0))

    assert outcome.attempted == 3
    assert outcome.skipped == 0
    assert outcome.canonicals.provenance is Provenance.FROM_U
    assert {("zoe",), ("gala",)} <= outcome.original_values
    for derivation in outcome.canonicals.items:
        for _, fill in iter_slot_fills(derivation):
            assert fill.value in toycal_pools.values(fill.category)
