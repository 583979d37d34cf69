import threading
import time

import httpx
import pytest

from canonaug.exceptions import (
    AuthenticationError,
    MalformedResponseError,
    RemoteNetworkError,
    ReplayMissError,
)
from canonaug.lm import (
    CompletionBackend,
    CompletionRequest,
    RemoteCompletionClient,
    ReplayBackend,
    ReplayMode,
    ReplayStore,
    complete_many,
    complete_remote,
    replay_from_env,
    truncate_at_stop,
)

ENDPOINT = "http://completions.test"


def _client(service, **kwargs):
    kwargs.setdefault("backoff", 0.0)
    return RemoteCompletionClient(ENDPOINT, transport=service.transport(), **kwargs)


def test_request_fingerprint_tracks_wire_body():
    request = CompletionRequest(prompt="C: hello\nN: ", n_samples=3, stop="\n")

    assert request.fingerprint() == CompletionRequest(prompt="C: hello\nN: ", n_samples=3, stop="\n").fingerprint()
    assert request.fingerprint() != request.model_copy(update={"prompt": "C: hi\nN: "}).fingerprint()
    assert request.wire_body() == {"prompt": "C: hello\nN: ", "max_tokens": 32, "temperature": 1.0, "n": 3, "stop": "\n"}


def test_truncate_at_stop():
    assert truncate_at_stop("hi there\nC: next", "\n") == "hi there"
    assert truncate_at_stop("no stop", "\n") == "no stop"
    assert truncate_at_stop("a\nb", None) == "a\nb"


def test_complete_posts_body_and_truncates(scripted_service):
    service = scripted_service(["hi there\nC: more", "hey"])
    with _client(service, api_key="secret") as client:
        completions = client.complete(CompletionRequest(prompt="C: hello\nN: ", n_samples=2, stop="\n"))

    assert completions == ["hi there", "hey"]
    assert service.calls == 1
    request = service.requests[0]
    assert request.url.path == "/v1/complete"
    assert request.headers["Authorization"] == "Bearer secret"
    assert service.bodies()[0]["n"] == 2


def test_api_key_from_environment(monkeypatch, scripted_service):
    monkeypatch.setenv("CANONAUG_API_KEY", "from-env")
    service = scripted_service(["x"])
    with _client(service) as client:
        client.complete(CompletionRequest(prompt="p"))

    assert service.requests[0].headers["Authorization"] == "Bearer from-env"


def test_transient_failures_are_retried(scripted_service):
    service = scripted_service(httpx.Response(503), httpx.Response(429), ["ok"])
    with _client(service) as client:
        assert client.complete(CompletionRequest(prompt="p")) == ["ok"]
    assert service.calls == 3


def test_unreachable_service_gives_up_after_retries(scripted_service, caplog):
    service = scripted_service(httpx.ConnectError("connection refused"))
    with _client(service, retries=3) as client, pytest.raises(RemoteNetworkError, match="after 3 retries"):
        client.complete(CompletionRequest(prompt="p"))

    assert service.calls == 4
    assert caplog.text.count("Retrying completion request") == 3


def test_rejected_credentials_are_not_retried(scripted_service):
    service = scripted_service(httpx.Response(401))
    with _client(service) as client, pytest.raises(AuthenticationError):
        client.complete(CompletionRequest(prompt="p"))
    assert service.calls == 1


@pytest.mark.parametrize(
    "response",
    [
        httpx.Response(200, content=b"not json"),
        httpx.Response(200, json={"text": "hi"}),
        httpx.Response(200, json={"completions": [1, 2]}),
        httpx.Response(200, json={"completions": ["only one"]}),
        httpx.Response(404),
    ],
)
def test_malformed_responses(scripted_service, response):
    service = scripted_service(response)
    with _client(service) as client, pytest.raises(MalformedResponseError):
        client.complete(CompletionRequest(prompt="p", n_samples=2))


def test_negative_retries_rejected():
    with pytest.raises(ValueError, match="retries"):
        RemoteCompletionClient(ENDPOINT, retries=-1)


class _SlowBackend:
    def __init__(self):
        self.active = 0
        self.peak = 0
        self._lock = threading.Lock()

    def complete(self, request):
        with self._lock:
            self.active += 1
            self.peak = max(self.peak, self.active)
        time.sleep(0.01 * (len(request.prompt) % 3))
        with self._lock:
            self.active -= 1
        return [request.prompt.upper()]


def test_complete_many_keeps_order_and_bounds_concurrency():
    backend = _SlowBackend()
    requests = [CompletionRequest(prompt=f"p{index}") for index in range(12)]

    results = complete_many(backend, requests, max_in_flight=3)

    assert results == [[f"P{index}"] for index in range(12)]
    assert backend.peak <= 3
    assert isinstance(backend, CompletionBackend)


def test_complete_many_rejects_zero_in_flight():
    with pytest.raises(ValueError):
        complete_many(_SlowBackend(), [], max_in_flight=0)


def test_record_then_replay(tmp_path, scripted_service):
    service = scripted_service(["first", "second"])
    store = ReplayStore(tmp_path / "replay")
    request = CompletionRequest(prompt="C: hello\nN: ", n_samples=2)
    with _client(service) as client:
        recorded = ReplayBackend(client, store, ReplayMode.RECORD).complete(request)

    replayed = ReplayBackend(None, store, ReplayMode.REPLAY).complete(request)

    assert recorded == replayed == ["first", "second"]
    assert store.path_for(request).name == f"{request.fingerprint()}.json"
    assert service.calls == 1


def test_replay_miss(tmp_path):
    backend = ReplayBackend(None, ReplayStore(tmp_path), ReplayMode.REPLAY)
    with pytest.raises(ReplayMissError):
        backend.complete(CompletionRequest(prompt="never recorded"))


def test_replay_needs_backend_outside_replay_mode(tmp_path):
    with pytest.raises(ValueError):
        ReplayBackend(None, ReplayStore(tmp_path), ReplayMode.RECORD)


def test_replay_from_env(monkeypatch, tmp_path, no_replay):
    backend = _SlowBackend()
    assert replay_from_env(backend) is backend

    monkeypatch.setenv("CANONAUG_REPLAY_MODE", "replay")
    with pytest.raises(ValueError, match="CANONAUG_REPLAY_DIR"):
        replay_from_env(backend)

    monkeypatch.setenv("CANONAUG_REPLAY_DIR", str(tmp_path))
    wrapped = replay_from_env(None)
    assert isinstance(wrapped, ReplayBackend)
    assert wrapped.mode is ReplayMode.REPLAY


def test_complete_remote_records_in_record_mode(monkeypatch, tmp_path, scripted_service):
    monkeypatch.setenv("CANONAUG_REPLAY_MODE", "record")
    monkeypatch.setenv("CANONAUG_REPLAY_DIR", str(tmp_path))
    service = scripted_service(["hi"])
    request = CompletionRequest(prompt="C: hello\nN: ")

    assert complete_remote(ENDPOINT, request, transport=service.transport(), backoff=0.0) == ["hi"]

    monkeypatch.setenv("CANONAUG_REPLAY_MODE", "replay")
    assert complete_remote(ENDPOINT, request, transport=service.transport()) == ["hi"]
    assert service.calls == 1
