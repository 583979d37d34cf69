"""Tests for logging."""

import json
import sys
from datetime import datetime
from unittest import mock

import pytest
from loguru import logger

import canonaug.logger as logger_module
from canonaug.logger import (
    DEFAULT_LOG_LEVEL,
    DEFAULT_TIME_FORMAT,
    LEVEL_NAMES,
    LEVEL_STYLES,
    VERBOSITY_DEBUG,
    VERBOSITY_INFO,
    VERBOSITY_TRACE,
    VERBOSITY_WARNING,
    _format_timestamp,
    _get_console,
    _print_exception,
    format_json,
    format_tty,
    get_logger,
    log_counts,
    setup_logging,
    stage_logger,
    structured_sink,
)

STAMP = datetime(2026, 3, 2, 9, 15, 7, 250000)


def _level(name):
    level = mock.Mock()
    level.name = name
    return level


def _record(level="INFO", message="message", extra=None, exception=None):
    return {
        "level": _level(level),
        "time": STAMP,
        "message": message,
        "extra": extra or {},
        "exception": exception,
    }


def test_format_timestamp_default_format():
    assert _format_timestamp({"time": STAMP}) == "2026-03-02T09:15:07.250"


def test_format_timestamp_custom_format(monkeypatch):
    monkeypatch.setenv("LOG_TIME_FORMAT", "%H:%M:%S.{ms}")
    assert _format_timestamp({"time": STAMP}) == "09:15:07.250"


def test_print_exception_without_exception():
    _print_exception({"exception": None}, None)


def test_print_exception_with_incomplete_info():
    exc = mock.Mock()
    exc.type = None
    _print_exception({"exception": exc}, None)


def test_print_exception_plain(capsys):
    try:
        raise ValueError("broken grammar")
    except ValueError:
        exc_type, exc_value, exc_tb = sys.exc_info()
        _print_exception({"exception": mock.Mock(type=exc_type, value=exc_value, traceback=exc_tb)}, None)
    assert "broken grammar" in capsys.readouterr().err


def test_format_tty_plain_orders_stage_context_first(monkeypatch, capsys):
    monkeypatch.setattr(logger_module, "_verbosity", VERBOSITY_WARNING)
    monkeypatch.setattr(logger_module, "_get_console", lambda: None)

    format_tty(_record("WARNING", "filtered", extra={"accepted": 3, "stage": "filter", "iteration": 2}))

    line = capsys.readouterr().err.strip()
    assert line.startswith("WARN filtered")
    assert line.index("iteration=2") < line.index("stage=filter") < line.index("accepted=3")


def test_format_tty_hides_bound_name(monkeypatch, capsys):
    monkeypatch.setattr(logger_module, "_verbosity", VERBOSITY_WARNING)
    monkeypatch.setattr(logger_module, "_get_console", lambda: None)

    format_tty(_record("INFO", "loaded", extra={"name": "scfg"}))

    assert "name=" not in capsys.readouterr().err


def test_format_tty_shows_timestamp_at_trace(monkeypatch, capsys):
    monkeypatch.setattr(logger_module, "_verbosity", VERBOSITY_TRACE)
    monkeypatch.setattr(logger_module, "_get_console", lambda: None)

    format_tty(_record("DEBUG", "step"))

    assert "2026-03-02T09:15:07.250" in capsys.readouterr().err


def test_format_tty_with_rich(monkeypatch, capsys):
    monkeypatch.setattr(logger_module, "_verbosity", VERBOSITY_WARNING)
    _get_console.cache_clear()

    format_tty(_record("ERROR", "remote failed", extra={"stage": "simulate"}))

    output = capsys.readouterr().err
    assert "remote failed" in output
    assert "stage=simulate" in output


def test_format_json_basic():
    payload = json.loads(format_json(_record("INFO", "generated")))

    assert payload == {"ts": "2026-03-02T09:15:07.250", "level": "INFO", "msg": "generated"}


def test_format_json_with_logger_name_and_extras():
    payload = json.loads(format_json(_record(extra={"name": "parser", "stage": "retrain", "silver": 12})))

    assert payload["logger"] == "parser"
    assert payload["stage"] == "retrain"
    assert payload["silver"] == 12
    assert "name" not in payload


def test_format_json_with_exception():
    try:
        raise RuntimeError("no parse")
    except RuntimeError:
        exc_type, exc_value, exc_tb = sys.exc_info()
        record = _record("ERROR", exception=mock.Mock(type=exc_type, value=exc_value, traceback=exc_tb))
        payload = json.loads(format_json(record))

    assert payload["error"] == {"type": "RuntimeError", "message": "no parse"}


def test_structured_sink_json_mode(monkeypatch, capsys):
    monkeypatch.setattr(sys.stderr, "isatty", lambda: False)

    structured_sink(mock.Mock(record=_record("INFO", "json line")))

    assert json.loads(capsys.readouterr().err.strip())["msg"] == "json line"


def test_structured_sink_tty_mode(monkeypatch, capsys):
    monkeypatch.setattr(sys.stderr, "isatty", lambda: True)
    monkeypatch.setattr(logger_module, "_get_console", lambda: None)

    structured_sink(mock.Mock(record=_record("INFO", "tty line")))

    assert "tty line" in capsys.readouterr().err


def test_get_console_is_cached():
    _get_console.cache_clear()
    assert _get_console() is _get_console()


def test_level_tables_cover_loguru_levels():
    expected = {"TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"}
    assert set(LEVEL_NAMES) == expected
    assert set(LEVEL_STYLES) == expected


def test_default_constants():
    assert DEFAULT_LOG_LEVEL == "WARNING"
    assert (VERBOSITY_WARNING, VERBOSITY_INFO, VERBOSITY_DEBUG, VERBOSITY_TRACE) == (0, 1, 2, 3)
    assert DEFAULT_TIME_FORMAT == "%Y-%m-%dT%H:%M:%S.{ms}"


def test_setup_logging_requires_a_sink():
    with pytest.raises(ValueError, match="at least one sink"):
        setup_logging(log_to_console=False)


def test_setup_logging_writes_log_file(tmp_path):
    log_file = tmp_path / "run.log"
    setup_logging(VERBOSITY_WARNING, log_file=str(log_file), log_to_console=False)

    get_logger("tests").trace("trace goes to the file")
    logger.remove()

    assert "trace goes to the file" in log_file.read_text()


def test_stage_logger_binds_context(caplog):
    handler = logger.add(lambda message: records.append(message.record), level="INFO")
    records = []
    stage_logger("generate", iteration=1).info("stage line")
    stage_logger("filter").info("no iteration")
    logger.remove(handler)

    assert records[0]["extra"] == {"stage": "generate", "iteration": 1}
    assert records[1]["extra"] == {"stage": "filter"}


def test_log_counts_returns_counts_and_logs(caplog):
    counts = log_counts(stage_logger("retrain", iteration=2), "Retrained parser", seed=30, silver=41)

    assert counts == {"seed": 30, "silver": 41}
    assert "Retrained parser" in caplog.text
