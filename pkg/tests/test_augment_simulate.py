import numpy as np
import pytest

from canonaug.augment import (
    SeedDataset,
    TranslationSimulator,
    build_simulation_request,
    format_simulation_prompt,
    parse_simulation_prompt,
    postprocess_completions,
    simulate_naturals,
)
from canonaug.config import SimulationConfig
from canonaug.exceptions import EmptyCorpusError
from canonaug.lm import CompletionRequest, RemoteCompletionClient
from canonaug.utils import tokenize

ENDPOINT = "http://completions.test"


def test_prompt_layout():
    prompt = format_simulation_prompt(
        [(("hi",), ("hello",)), (("meet", "kai"), ("create", "event", "with", "kai"))], ("hello",)
    )
    assert prompt == "C: hello\nN: hi\n\nC: create event with kai\nN: meet kai\n\nC: hello\nN: "


def test_prompt_parses_back(toycal_seed):
    target = tokenize('delete find event called " retro "')
    pairs, parsed_target = parse_simulation_prompt(format_simulation_prompt(toycal_seed.pairs(), target))

    assert pairs == toycal_seed.pairs()
    assert parsed_target == target


def test_prompt_without_examples():
    assert parse_simulation_prompt(format_simulation_prompt([], ("hello",))) == ([], ("hello",))


def test_request_settings(toycal_seed):
    config = SimulationConfig(k=7, temperature=0.5, max_tokens=12, prompt_examples=2)
    request = build_simulation_request(toycal_seed, ("hello",), np.random.default_rng(0), config)

    assert request.n_samples == 7
    assert request.temperature == 0.5
    assert request.max_tokens == 12
    assert request.stop == "\n"
    assert request.prompt.count("C: ") == 3
    assert request.prompt.endswith("C: hello\nN: ")


def test_request_is_reproducible(toycal_seed):
    first = build_simulation_request(toycal_seed, ("hello",), np.random.default_rng(4))
    second = build_simulation_request(toycal_seed, ("hello",), np.random.default_rng(4))
    assert first == second
    assert first.n_samples == 20


def test_request_needs_seed():
    with pytest.raises(EmptyCorpusError):
        build_simulation_request(SeedDataset(()), ("hello",), np.random.default_rng(0))


def test_postprocess_completions():
    assert postprocess_completions(["Hi there\nC: hello", "", "   ", "hey"]) == [("hi", "there"), ("hey",)]


def test_simulate_naturals_through_service(scripted_service, toycal_seed):
    service = scripted_service(["set up a meeting with kai", "meet kai\nC: hello", ""])
    with RemoteCompletionClient(ENDPOINT, transport=service.transport(), backoff=0.0) as client:
        naturals = simulate_naturals(client, toycal_seed, tokenize("create event with kai"), 3, np.random.default_rng(0))

    assert naturals == [tokenize("set up a meeting with kai"), ("meet", "kai")]
    body = service.bodies()[0]
    assert body["n"] == 3
    assert body["prompt"].endswith("C: create event with kai\nN: ")


def test_simulate_naturals_k(toycal_seed):
    with pytest.raises(ValueError, match="k must be"):
        simulate_naturals(TranslationSimulator(), toycal_seed, ("hello",), 0, np.random.default_rng(0))


def test_simulator_emits_one_token_per_canonical_token(toycal_seed):
    target = tokenize('start time of find event called " picnic "')
    request = build_simulation_request(toycal_seed, target, np.random.default_rng(0), SimulationConfig(k=5))
    completions = TranslationSimulator(seed=1).complete(request)

    assert len(completions) == 5
    assert all(len(tokenize(text)) == len(target) for text in completions)


def test_simulator_is_deterministic(toycal_seed):
    request = build_simulation_request(toycal_seed, ("hello",), np.random.default_rng(0), SimulationConfig(k=4))
    assert TranslationSimulator(seed=3).complete(request) == TranslationSimulator(seed=3).complete(request)


def test_simulator_at_zero_temperature(toycal_seed):
    config = SimulationConfig(k=3, temperature=0.0)
    request = build_simulation_request(toycal_seed, ("hello",), np.random.default_rng(0), config)
    completions = TranslationSimulator().complete(request)
    assert len(set(completions)) == 1


def test_simulator_without_examples_echoes_target():
    request = CompletionRequest(prompt="C: hello\nN: ", n_samples=2)
    assert TranslationSimulator().complete(request) == ["hello", "hello"]


def test_simulator_respects_max_tokens(toycal_seed):
    target = tokenize('delete find event called " picnic "')
    request = build_simulation_request(
        toycal_seed, target, np.random.default_rng(0), SimulationConfig(k=2, max_tokens=2)
    )
    assert all(len(tokenize(text)) == 2 for text in TranslationSimulator().complete(request))
