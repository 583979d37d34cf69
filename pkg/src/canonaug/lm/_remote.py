"""Completion backends: the HTTP client and deterministic record/replay."""

from __future__ import annotations

import os
import time
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from pathlib import Path
from typing import Any, Protocol, runtime_checkable

import httpx
import orjson
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from ..exceptions import AuthenticationError, MalformedResponseError, RemoteNetworkError, ReplayMissError
from ..utils import dumps, read_json, sha256_hex, write_json

REPLAY_DIR_ENV = "CANONAUG_REPLAY_DIR"
REPLAY_MODE_ENV = "CANONAUG_REPLAY_MODE"
API_KEY_ENV = "CANONAUG_API_KEY"

COMPLETE_ROUTE = "/v1/complete"
DEFAULT_MAX_IN_FLIGHT = 4
DEFAULT_RETRIES = 3
_RETRYABLE_STATUS = frozenset({429, 500, 502, 503, 504})


class CompletionRequest(BaseModel):
    """One text-completion request."""

    model_config = ConfigDict(frozen=True)

    prompt: str
    max_tokens: int = Field(default=32, ge=1, description="Maximum tokens per completion.")
    temperature: float = Field(default=1.0, ge=0.0, description="Sampling temperature.")
    n_samples: int = Field(default=1, ge=1, description="Number of completions to return.")
    stop: str | None = Field(default=None, description="Completions are cut at the first occurrence.")

    def wire_body(self) -> dict[str, Any]:
        """Body sent to ``/v1/complete``."""
        return {
            "prompt": self.prompt,
            "max_tokens": self.max_tokens,
            "temperature": self.temperature,
            "n": self.n_samples,
            "stop": self.stop,
        }

    def fingerprint(self) -> str:
        """sha256 over the canonicalized wire body."""
        return sha256_hex(dumps(self.wire_body()))


def truncate_at_stop(text: str, stop: str | None) -> str:
    """Cut ``text`` at the first ``stop`` occurrence."""
    if not stop:
        return text
    index = text.find(stop)
    return text if index < 0 else text[:index]


@runtime_checkable
class CompletionBackend(Protocol):
    """Anything that turns a completion request into ``n_samples`` texts."""

    def complete(self, request: CompletionRequest) -> list[str]:
        """Return the completions for one request."""
        ...


def complete_many(
    backend: CompletionBackend,
    requests: Sequence[CompletionRequest],
    *,
    max_in_flight: int = DEFAULT_MAX_IN_FLIGHT,
) -> list[list[str]]:
    """Run requests with at most ``max_in_flight`` outstanding; results keep input order."""
    if max_in_flight < 1:
        raise ValueError(f"max_in_flight must be >= 1, got {max_in_flight}")
    if max_in_flight == 1 or len(requests) <= 1:
        return [backend.complete(request) for request in requests]
    with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
        return list(pool.map(backend.complete, requests))


class RemoteCompletionClient:
    """HTTP client for a completion service.

    Parameters
    ----------
    endpoint : str
        Service base address; requests go to ``<endpoint>/v1/complete``.
    api_key : str | None
        Bearer token. Defaults to ``$CANONAUG_API_KEY``.
    retries : int
        Extra attempts after a transient failure.
    backoff : float
        Base delay in seconds; retry ``k`` waits ``backoff * 2**(k - 1)``.
    transport : httpx.BaseTransport | None
        Custom transport, e.g. ``httpx.MockTransport`` in tests.
    """

    def __init__(
        self,
        endpoint: str,
        *,
        api_key: str | None = None,
        timeout: float = 30.0,
        retries: int = DEFAULT_RETRIES,
        backoff: float = 0.5,
        transport: httpx.BaseTransport | None = None,
    ) -> None:
        if retries < 0:
            raise ValueError(f"retries must be >= 0, got {retries}")
        self.endpoint = endpoint.rstrip("/")
        self.retries = retries
        self.backoff = backoff
        token = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        headers = {"Authorization": f"Bearer {token}"} if token else {}
        self._client = httpx.Client(base_url=self.endpoint, headers=headers, timeout=timeout, transport=transport)

    def close(self) -> None:
        """Release the underlying connection pool."""
        self._client.close()

    def __enter__(self) -> RemoteCompletionClient:
        return self

    def __exit__(self, *_: object) -> None:
        self.close()

    def complete(self, request: CompletionRequest) -> list[str]:
        """POST one request, retrying transient failures.

        Raises
        ------
        RemoteNetworkError
            If the service stays unreachable or failing after all retries.
        AuthenticationError
            If the service rejects the credentials.
        MalformedResponseError
            If the body is not ``{"completions": [text, ...]}`` with enough entries.
        """
        response = self._post_with_retries(request)
        try:
            payload = orjson.loads(response.content)
        except orjson.JSONDecodeError as exc:
            raise MalformedResponseError(f"Response is not JSON: {exc}") from exc
        completions = payload.get("completions") if isinstance(payload, dict) else None
        if not isinstance(completions, list) or not all(isinstance(text, str) for text in completions):
            raise MalformedResponseError("Response body must hold a 'completions' list of strings")
        if len(completions) < request.n_samples:
            raise MalformedResponseError(f"Expected {request.n_samples} completions, got {len(completions)}")
        return [truncate_at_stop(text, request.stop) for text in completions[: request.n_samples]]

    def _post_with_retries(self, request: CompletionRequest) -> httpx.Response:
        last_error = "no attempt made"
        for attempt in range(self.retries + 1):
            if attempt:
                delay = self.backoff * 2 ** (attempt - 1)
                logger.warning("Retrying completion request ({}/{}) in {:.2f}s", attempt, self.retries, delay)
                time.sleep(delay)
            try:
                response = self._client.post(COMPLETE_ROUTE, content=dumps(request.wire_body()))
            except httpx.TransportError as exc:
                last_error = f"{type(exc).__name__}: {exc}"
                continue
            if response.status_code in (401, 403):
                raise AuthenticationError(f"Completion service rejected credentials ({response.status_code})")
            if response.status_code in _RETRYABLE_STATUS:
                last_error = f"HTTP {response.status_code}"
                continue
            if response.is_error:
                raise MalformedResponseError(f"Completion service answered HTTP {response.status_code}")
            return response
        raise RemoteNetworkError(f"{self.endpoint}{COMPLETE_ROUTE} failed after {self.retries} retries: {last_error}")


class ReplayMode(str, Enum):
    """How recorded completions are used."""

    OFF = "off"
    RECORD = "record"
    REPLAY = "replay"


class ReplayStore:
    """Directory of ``<request hash>.json`` recordings."""

    def __init__(self, directory: Path | str) -> None:
        self.directory = Path(directory)

    def path_for(self, request: CompletionRequest) -> Path:
        """File that holds the recording of ``request``."""
        return self.directory / f"{request.fingerprint()}.json"

    def load(self, request: CompletionRequest) -> list[str] | None:
        """Recorded completions, or None when the request was never recorded."""
        fpath = self.path_for(request)
        if not fpath.exists():
            return None
        return list(read_json(fpath)["completions"])

    def save(self, request: CompletionRequest, completions: Sequence[str]) -> Path:
        """Record completions for ``request``."""
        return write_json(
            self.path_for(request), {"request": request.wire_body(), "completions": list(completions)}
        )


class ReplayBackend:
    """Wraps a backend with recording or replay."""

    def __init__(self, backend: CompletionBackend | None, store: ReplayStore, mode: ReplayMode) -> None:
        if backend is None and mode is not ReplayMode.REPLAY:
            raise ValueError(f"A backend is required in {mode.value} mode")
        self.backend = backend
        self.store = store
        self.mode = mode

    def complete(self, request: CompletionRequest) -> list[str]:
        """Serve from the store in replay mode, otherwise call through (and record)."""
        if self.mode is ReplayMode.REPLAY:
            recorded = self.store.load(request)
            if recorded is None:
                raise ReplayMissError(f"No recording for request {request.fingerprint()} in {self.store.directory}")
            return recorded
        assert self.backend is not None
        completions = self.backend.complete(request)
        if self.mode is ReplayMode.RECORD:
            self.store.save(request, completions)
        return completions


def replay_from_env(backend: CompletionBackend | None) -> CompletionBackend:
    """Apply ``$CANONAUG_REPLAY_MODE`` and ``$CANONAUG_REPLAY_DIR`` to ``backend``."""
    mode = ReplayMode(os.environ.get(REPLAY_MODE_ENV, ReplayMode.OFF.value).lower())
    if mode is ReplayMode.OFF:
        if backend is None:
            raise ValueError("A backend is required when replay is off")
        return backend
    directory = os.environ.get(REPLAY_DIR_ENV)
    if not directory:
        raise ValueError(f"{REPLAY_DIR_ENV} must be set when {REPLAY_MODE_ENV}={mode.value}")
    logger.debug("Completion replay mode={} dir={}", mode.value, directory)
    return ReplayBackend(backend, ReplayStore(directory), mode)


def complete_remote(
    endpoint: str,
    request: CompletionRequest,
    *,
    transport: httpx.BaseTransport | None = None,
    backoff: float = 0.5,
) -> list[str]:
    """Request completions from ``endpoint``, honouring the replay environment."""
    with RemoteCompletionClient(endpoint, transport=transport, backoff=backoff) as client:
        return replay_from_env(client).complete(request)
