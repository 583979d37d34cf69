from collections import Counter

import numpy as np
import pytest

from canonaug.augment import UnlabeledSet, gen_from_u
from canonaug.config import BenchmarkConfig
from canonaug.evaluation import SyntheticBenchmark
from canonaug.exceptions import ExhaustedPoolError, MissingCategoryError
from canonaug.lm import RemoteCompletionClient
from canonaug.parser import train_parser
from canonaug.pii import (
    PIISpan,
    ReplacementPools,
    assert_no_leak,
    detect_pii,
    fill_pool,
    fill_prompt,
    replace_pii,
)
from canonaug.scfg import iter_slot_fills, parse_canonical
from canonaug.utils import tokenize

ENDPOINT = "http://completions.test"


def _production_keys(derivation):
    keys = [derivation.production.key]
    for child in derivation.children:
        if hasattr(child, "production"):
            keys.extend(_production_keys(child))
    return keys


def test_detect_pii_paths(toycal_grammar):
    derivation = parse_canonical(toycal_grammar, 'start time of find event called " team lunch "')
    spans = detect_pii(derivation)

    assert spans == [PIISpan(path=(0, 0), category="title", value=("team", "lunch"))]
    assert spans[0].resolve(derivation).value == ("team", "lunch")


def test_detect_pii_without_slots(toycal_grammar):
    assert detect_pii(parse_canonical(toycal_grammar, "hello")) == []


def test_resolve_rejects_wrong_path(toycal_grammar):
    derivation = parse_canonical(toycal_grammar, "create event with dana")
    with pytest.raises(ValueError, match="does not resolve"):
        PIISpan(path=(0,), category="title", value=("dana",)).resolve(derivation)


def test_replace_keeps_structure(toycal_grammar, toycal_pools):
    rng = np.random.default_rng(3)
    for text in ("create event with dana", 'delete find event called " picnic "', "hello"):
        original = parse_canonical(toycal_grammar, text)
        replaced = replace_pii(original, toycal_pools, rng)

        assert _production_keys(replaced) == _production_keys(original)
        for (path, before), (other_path, after) in zip(
            iter_slot_fills(original), iter_slot_fills(replaced), strict=True
        ):
            assert path == other_path
            assert after.category == before.category
            assert after.value != before.value
            assert after.value in toycal_pools.values(after.category)


def test_replace_is_deterministic(toycal_grammar, toycal_pools):
    derivation = parse_canonical(toycal_grammar, 'start time of find event called " retro "')
    first = replace_pii(derivation, toycal_pools, np.random.default_rng(11))
    second = replace_pii(derivation, toycal_pools, np.random.default_rng(11))
    assert first == second


def test_replace_from_exhausted_pool(toycal_grammar, singleton_pools):
    derivation = parse_canonical(toycal_grammar, "create event with dana")
    with pytest.raises(ExhaustedPoolError):
        replace_pii(derivation, singleton_pools, np.random.default_rng(0))


def test_replace_with_missing_category(toycal_grammar):
    derivation = parse_canonical(toycal_grammar, 'find event called " picnic "')
    pools = ReplacementPools.from_mapping({"name": ["dana"]})
    with pytest.raises(MissingCategoryError, match="title"):
        replace_pii(derivation, pools, np.random.default_rng(0))


def test_draw_never_returns_excluded():
    pools = ReplacementPools.from_mapping({"name": ["dana", "kai"]})
    rng = np.random.default_rng(0)
    assert {pools.draw("name", rng, exclude=("dana",)) for _ in range(50)} == {("kai",)}


def test_balanced_draws_pick_groups_uniformly():
    pools = ReplacementPools.from_mapping(
        {"name": ["ada", "bo", "cy", "di"]},
        balance_groups={"small": ["ada"], "large": ["bo", "cy", "di"]},
    )
    rng = np.random.default_rng(7)
    counts = Counter(pools.draw("name", rng) for _ in range(4000))

    assert counts[("ada",)] / 4000 == pytest.approx(0.5, abs=0.03)
    assert counts[("bo",)] / 4000 == pytest.approx(1 / 6, abs=0.03)


def test_toycal_pools_have_balance_groups(toycal_pools):
    assert toycal_pools.balance_groups is not None
    assert sorted(len(group) for group in toycal_pools.balance_groups.values()) == [8, 8, 8]


@pytest.mark.parametrize(
    ("pools", "groups", "message"),
    [
        ({"name": []}, None, "empty"),
        ({"title": ['a " b']}, None, "invalid value"),
        ({"name": ["ada", "bo"]}, {"g": ["ada"]}, "cover"),
        ({"name": ["ada"]}, {"g": ["ada"], "h": ["ada"]}, "disjoint"),
    ],
)
def test_invalid_pools(pools, groups, message):
    with pytest.raises(ValueError, match=message):
        ReplacementPools.from_mapping(pools, balance_groups=groups)


def test_directory_round_trip(tmp_path, toycal_pools):
    folder = toycal_pools.to_directory(tmp_path / "pools")
    restored = ReplacementPools.from_directory(folder)

    assert restored == toycal_pools
    assert (folder / "name.groups").read_text().splitlines()[0].startswith("1-8 ")


def test_empty_directory(tmp_path):
    with pytest.raises(FileNotFoundError):
        ReplacementPools.from_directory(tmp_path)


def test_extended_and_singleton(toycal_pools):
    extended = toycal_pools.extended({"name": [("zoe",), ("dana",)], "city": [("oslo",)]})

    assert extended.values("name")[-1] == ("zoe",)
    assert len(extended.values("name")) == len(toycal_pools.values("name")) + 1
    assert extended.values("city") == (("oslo",),)
    assert extended.balance_groups is None
    assert toycal_pools.singleton().values("title") == (("picnic",),)


def test_leak_report():
    corpus = [tokenize("create event with dana"), tokenize('find event called " team lunch "'), ("team",)]
    report = assert_no_leak([("dana",), ("team", "lunch"), ("omar",)], corpus)

    assert not report.is_clean
    assert len(report) == 2
    assert [(leak.sentence, leak.start) for leak in report.leaks] == [(0, 3), (1, 4)]
    assert assert_no_leak([("omar",)], corpus).is_clean


def test_leak_report_logs(caplog):
    assert_no_leak([("dana",)], [("dana",), ("dana", "dana")])
    assert "Found 3 PII leak(s) across 2 sentence(s)" in caplog.text


def test_unlabeled_values_never_reach_canonicals(small_benchmark):
    splits = small_benchmark.sample(np.random.default_rng(1))
    parser = train_parser(splits.seed.pairs(), grammar=small_benchmark.grammar, pools=small_benchmark.pools)
    outcome = gen_from_u(parser, splits.unlabeled, small_benchmark.pools, np.random.default_rng(2))

    assert outcome.attempted == len(splits.unlabeled)
    assert outcome.generated > 0
    assert assert_no_leak(small_benchmark.generator_pools.all_values(), outcome.canonicals.canonicals).is_clean


@pytest.mark.slow
def test_no_leak_over_large_unlabeled_set():
    benchmark = SyntheticBenchmark.from_config(BenchmarkConfig(n_seed=30, n_unlabeled=300, n_test=10))
    splits = benchmark.sample(np.random.default_rng(5))
    parser = train_parser(splits.seed.pairs(), grammar=benchmark.grammar, pools=benchmark.pools)
    outcome = gen_from_u(parser, splits.unlabeled, benchmark.pools, np.random.default_rng(6))

    assert len(splits.unlabeled) == 300
    assert assert_no_leak(benchmark.generator_pools.all_values(), outcome.canonicals.canonicals).is_clean


def test_without_replacement_values_survive(toycal_seed, toycal_grammar, toycal_pools):
    parser = train_parser(toycal_seed.pairs(), grammar=toycal_grammar, pools=toycal_pools)
    unlabeled = UnlabeledSet.from_texts(["set up a meeting with zoe"])
    outcome = gen_from_u(parser, unlabeled, toycal_pools, np.random.default_rng(0), replace=False)

    assert outcome.canonicals.canonicals == [tokenize("create event with zoe")]
    assert outcome.original_values == frozenset({("zoe",)})


def test_fill_prompt_lists_examples():
    assert fill_prompt("title", (("team", "lunch"), ("retro",))) == (
        "Examples of title values, one per line:\nteam lunch\nretro\n"
    )


def test_fill_pool_adds_new_values(scripted_service, toycal_pools):
    service = scripted_service(["zoe", "ines"])
    with RemoteCompletionClient(ENDPOINT, transport=service.transport(), backoff=0.0) as client:
        filled = fill_pool(client, toycal_pools, "name", 2)

    assert filled.values("name")[-2:] == (("zoe",), ("ines",))
    assert filled.values("title") == toycal_pools.values("title")
    assert service.calls == 1
    body = service.bodies()[0]
    assert body["n"] == 2
    assert body["stop"] == "\n"
    assert body["prompt"].startswith("Examples of name values, one per line:\ndana\n")


def test_fill_pool_drops_known_and_invalid_values(scripted_service, toycal_pools, caplog):
    service = scripted_service(["zoe", "kai", 'x " y'], ["ines\nmore", "zoe"])
    with RemoteCompletionClient(ENDPOINT, transport=service.transport(), backoff=0.0) as client:
        filled = fill_pool(client, toycal_pools, "name", 3)

    added = filled.values("name")[len(toycal_pools.values("name")) :]
    assert added == (("zoe",), ("ines",))
    assert [body["n"] for body in service.bodies()] == [3, 2, 1, 1, 1]
    assert "zoe" in service.bodies()[1]["prompt"]
    assert "received 2 of 3" in caplog.text


def test_fill_pool_new_category(scripted_service, toycal_pools):
    service = scripted_service(["oslo"])
    with RemoteCompletionClient(ENDPOINT, transport=service.transport(), backoff=0.0) as client:
        filled = fill_pool(client, toycal_pools, "city", 1)
    assert filled.values("city") == (("oslo",),)


def test_fill_pool_count(toycal_pools):
    with pytest.raises(ValueError, match="count"):
        fill_pool(None, toycal_pools, "name", 0)
