"""Logging setup for canonaug built on loguru.

The package logger is disabled on import (see ``canonaug/__init__.py``) so that
library users see nothing unless they opt in. Applications and the CLI call
:func:`setup_logging` once. Records are rendered as a short coloured line when
stderr is a terminal and as JSON Lines otherwise, so that pipeline runs piped to
a file can be post-processed.

Pipeline stages attach ``stage`` and ``iteration`` extras through
:func:`stage_logger`; :func:`log_counts` emits the per-stage count summaries
that ``run_iteration`` also stores in ``report.json``.
"""

from __future__ import annotations

import os
import sys
import traceback
from functools import lru_cache
from typing import TYPE_CHECKING, Any

import orjson

if TYPE_CHECKING:
    import loguru
    from rich.console import Console

PACKAGE = "canonaug"

LEVEL_NAMES = {
    "TRACE": "TRACE",
    "DEBUG": "DEBUG",
    "INFO": " INFO",
    "SUCCESS": "   OK",
    "WARNING": " WARN",
    "ERROR": "ERROR",
    "CRITICAL": " CRIT",
}
LEVEL_STYLES = {
    "TRACE": "color(249)",
    "DEBUG": "color(33)",
    "INFO": "color(37)",
    "SUCCESS": "color(71)",
    "WARNING": "color(214)",
    "ERROR": "color(169)",
    "CRITICAL": "color(169) reverse",
}

VERBOSITY_WARNING = 0
VERBOSITY_INFO = 1
VERBOSITY_DEBUG = 2
VERBOSITY_TRACE = 3
DEFAULT_LOG_LEVEL = "WARNING"
DEFAULT_TIME_FORMAT = "%Y-%m-%dT%H:%M:%S.{ms}"

_VERBOSITY_TO_LEVEL = {
    VERBOSITY_WARNING: "WARNING",
    VERBOSITY_INFO: "INFO",
    VERBOSITY_DEBUG: "DEBUG",
    VERBOSITY_TRACE: "TRACE",
}

# Extras shown first, in this order, on terminal lines.
_LEADING_EXTRAS = ("iteration", "stage")

_verbosity: int = VERBOSITY_WARNING


@lru_cache(maxsize=1)
def _get_console() -> Console | None:
    """Return a cached Rich console bound to stderr, or None without Rich."""
    try:
        from rich.console import Console
    except ImportError:
        return None
    return Console(stderr=True, force_terminal=True)


def _format_timestamp(record: dict[str, Any]) -> str:
    """Format the record time with ``LOG_TIME_FORMAT`` or the default."""
    time_format = os.environ.get("LOG_TIME_FORMAT", DEFAULT_TIME_FORMAT)
    ms = f"{record['time'].microsecond // 1000:03d}"
    return str(record["time"].strftime(time_format.replace("{ms}", ms)))


def _ordered_extras(record: dict[str, Any]) -> list[tuple[str, Any]]:
    """Return user extras with stage context first, skipping the bound logger name."""
    extras = {k: v for k, v in record["extra"].items() if k != "name"}
    leading = [(k, extras.pop(k)) for k in _LEADING_EXTRAS if k in extras]
    return leading + sorted(extras.items())


def _print_exception(record: dict[str, Any], console: Console | None) -> None:
    """Print the traceback attached to a record, if any."""
    exc = record["exception"]
    if not exc or not exc.type or not exc.value or not exc.traceback:
        return
    if console is not None:
        from rich.traceback import Traceback

        console.print(Traceback.from_exception(exc.type, exc.value, exc.traceback))
        return
    print("".join(traceback.format_exception(exc.type, exc.value, exc.traceback)), file=sys.stderr)


def format_tty(record: dict[str, Any]) -> None:
    """Write a compact, human readable line for a record to stderr."""
    level = record["level"].name
    label = LEVEL_NAMES.get(level, f"{level:>5}")
    extras = "  ".join(f"{k}={v}" for k, v in _ordered_extras(record))
    show_timestamp = _verbosity >= VERBOSITY_TRACE
    console = _get_console()

    if console is None:
        parts = [_format_timestamp(record)] if show_timestamp else []
        parts.extend([label, record["message"]])
        if extras:
            parts.append(extras)
        print(" ".join(parts), file=sys.stderr)
        _print_exception(record, None)
        return

    from rich.text import Text

    text = Text()
    if show_timestamp:
        text.append(_format_timestamp(record) + " ", style="dim")
    text.append(label, style=f"{LEVEL_STYLES.get(level, 'white')} bold")
    text.append(" " + record["message"])
    if extras:
        text.append(f"  {extras}", style="dim")
    console.print(text)
    _print_exception(record, console)


def format_json(record: dict[str, Any]) -> str:
    """Serialize a record as one JSON line."""
    payload: dict[str, Any] = {
        "ts": record["time"].strftime(DEFAULT_TIME_FORMAT.replace("{ms}", f"{record['time'].microsecond // 1000:03d}")),
        "level": record["level"].name,
        "msg": record["message"],
    }
    name = record["extra"].get("name") or record.get("name")
    if name:
        payload["logger"] = name
    payload.update(dict(_ordered_extras(record)))

    exc = record["exception"]
    if exc and exc.type and exc.value:
        payload["error"] = {"type": exc.type.__name__, "message": str(exc.value)}
    return orjson.dumps(payload, default=str).decode()


def structured_sink(message: Any) -> None:
    """Dispatch to the terminal or JSON renderer depending on stderr."""
    record = message.record
    if sys.stderr.isatty():
        format_tty(record)
    else:
        print(format_json(record), file=sys.stderr)


def setup_logging(
    verbosity: int = VERBOSITY_WARNING,
    *,
    log_file: str | None = None,
    log_to_console: bool = True,
) -> None:
    """Enable canonaug logging and install sinks.

    Parameters
    ----------
    verbosity : int
        0 shows warnings, 1 (``-v``) adds stage summaries, 2 (``-vv``) adds
        per-item debug records, 3 (``-vvv``) traces with timestamps.
    log_file : str | None
        Optional file receiving every record at TRACE level.
    log_to_console : bool
        Whether to install the stderr sink.

    Raises
    ------
    ValueError
        If neither a file nor the console sink is requested.
    """
    if not log_file and not log_to_console:
        raise ValueError("setup_logging needs at least one sink: pass log_file or keep log_to_console=True.")

    global _verbosity
    from loguru import logger

    _verbosity = verbosity
    logger.enable(PACKAGE)
    logger.remove()

    if log_file:
        logger.add(
            log_file,
            level="TRACE",
            format="[{time:YYYY-MM-DD HH:mm:ss}] {level} {extra} {message}",
            mode="a",
        )
    if log_to_console:
        level = _VERBOSITY_TO_LEVEL.get(min(verbosity, VERBOSITY_TRACE), DEFAULT_LOG_LEVEL)
        logger.add(structured_sink, level=level, backtrace=True, diagnose=False)


def get_logger(name: str) -> loguru.Logger:
    """Return a logger bound to a component name."""
    from loguru import logger

    return logger.bind(name=name)


def stage_logger(stage: str, *, iteration: int | None = None) -> loguru.Logger:
    """Return a logger carrying pipeline stage context."""
    from loguru import logger

    if iteration is None:
        return logger.bind(stage=stage)
    return logger.bind(stage=stage, iteration=iteration)


def log_counts(log: loguru.Logger, message: str, **counts: int | float) -> dict[str, int | float]:
    """Log a stage summary at INFO and return the counts for reporting."""
    log.bind(**counts).info(message)
    return dict(counts)
