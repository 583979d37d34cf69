"""ToyCal grammar, pools, seed pairs and benchmarks shared across tests."""

import pytest

from canonaug.augment import SeedDataset
from canonaug.config import TOYCAL_DIR, BenchmarkConfig
from canonaug.evaluation import SyntheticBenchmark
from canonaug.pii import ReplacementPools
from canonaug.scfg import load_grammar_file

TOYCAL_SEED_PAIRS = [
    ("set up a meeting with dana", "create event with dana"),
    ("schedule an event with kai", "create event with kai"),
    ("create a meeting with mei", "create event with mei"),
    ('find the event called "picnic"', 'find event called " picnic "'),
    ('show me the "team lunch" meeting', 'find event called " team lunch "'),
    ('cancel the "standup" event', 'delete find event called " standup "'),
    ('delete the meeting called "retro"', 'delete find event called " retro "'),
    ('when does the "picnic" event start', 'start time of find event called " picnic "'),
    ('what time is the "standup" meeting', 'start time of find event called " standup "'),
    ("hello", "hello"),
    ("hi there", "hello"),
]


@pytest.fixture(scope="session")
def toycal_grammar():
    return load_grammar_file(TOYCAL_DIR / "grammar.scfg")


@pytest.fixture(scope="session")
def toycal_pools():
    return ReplacementPools.from_directory(TOYCAL_DIR / "pools")


@pytest.fixture(scope="session")
def bench_pools():
    return ReplacementPools.from_directory(TOYCAL_DIR / "bench_pools")


@pytest.fixture(scope="session")
def singleton_pools():
    return ReplacementPools.from_mapping({"name": ["dana"], "title": ["picnic"]})


@pytest.fixture
def toycal_seed(toycal_grammar):
    return SeedDataset.from_pairs(TOYCAL_SEED_PAIRS, toycal_grammar)


@pytest.fixture(scope="session")
def small_benchmark():
    """Noisy ToyCal benchmark small enough for pipeline runs."""
    config = BenchmarkConfig(n_seed=30, n_unlabeled=40, n_test=30)
    return SyntheticBenchmark.from_config(config)


@pytest.fixture(scope="session")
def noiseless_benchmark():
    config = BenchmarkConfig(synonym_prob=0.0, drop_prob=0.0, n_seed=30, n_unlabeled=60, n_test=40)
    return SyntheticBenchmark.from_config(config)
