import pytest
from loguru import logger

from canonaug.logger import setup_logging

pytest_plugins = [
    "fixtures.toycal",
    "fixtures.grammars",
    "fixtures.models",
    "fixtures.remote",
]


def pytest_configure(config: pytest.Config) -> None:
    """Register markers used across the suite."""
    config.addinivalue_line(
        "markers",
        "doctest: tests for documentation examples",
    )


@pytest.fixture
def caplog(caplog):
    # verbosity=2 enables DEBUG level
    setup_logging(verbosity=2)
    handler_id = logger.add(caplog.handler, format="{message}")
    yield caplog
    logger.remove(handler_id)


@pytest.fixture
def no_replay(monkeypatch):
    monkeypatch.delenv("CANONAUG_REPLAY_MODE", raising=False)
    monkeypatch.delenv("CANONAUG_REPLAY_DIR", raising=False)
