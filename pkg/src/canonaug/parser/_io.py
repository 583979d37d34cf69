"""Reading and writing trained parsers."""

from __future__ import annotations

from pathlib import Path
from typing import Any

import orjson
from loguru import logger
from pydantic import ValidationError

from ..config import ParserConfig
from ..exceptions import ParserFileError
from ..lm import NGramModel
from ..pii import ReplacementPools
from ..scfg import Grammar
from ..utils import dumps
from ._model1 import TranslationTable
from ._noisy_channel import NoisyChannelParser

PARSER_FORMAT = "canonaug-parser"
PARSER_VERSION = 1


def parser_payload(parser: NoisyChannelParser) -> dict[str, Any]:
    """Self-describing document for ``parser``."""
    return {
        "format": PARSER_FORMAT,
        "version": PARSER_VERSION,
        "grammar_hash": parser.grammar.fingerprint(),
        "prior": parser.prior.to_payload(),
        "channel": parser.channel.to_payload(),
        "config": parser.config.model_dump(),
    }


def save_parser(parser: NoisyChannelParser, fpath: Path | str) -> Path:
    """Write ``parser`` as one sorted-key JSON document."""
    fpath = Path(fpath)
    fpath.parent.mkdir(parents=True, exist_ok=True)
    fpath.write_bytes(dumps(parser_payload(parser)))
    logger.debug("Saved parser to {}", fpath)
    return fpath


def load_parser(fpath: Path | str, *, grammar: Grammar, pools: ReplacementPools) -> NoisyChannelParser:
    """Load a parser written by :func:`save_parser` for ``grammar``.

    Raises
    ------
    ParserFileError
        If the file is missing, unreadable, of another format, or was trained
        for a different grammar.
    """
    fpath = Path(fpath)
    try:
        payload = orjson.loads(fpath.read_bytes())
    except (OSError, orjson.JSONDecodeError) as exc:
        raise ParserFileError(f"Cannot read parser file {fpath}: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != PARSER_FORMAT:
        raise ParserFileError(f"{fpath} is not a {PARSER_FORMAT} file")
    if payload.get("version") != PARSER_VERSION:
        raise ParserFileError(f"{fpath} has unsupported version {payload.get('version')}")
    if payload.get("grammar_hash") != grammar.fingerprint():
        raise ParserFileError(f"{fpath} was trained for a different grammar")
    try:
        return NoisyChannelParser(
            channel=TranslationTable.from_payload(payload["channel"]),
            prior=NGramModel.from_payload(payload["prior"]),
            grammar=grammar,
            pools=pools,
            config=ParserConfig.model_validate(payload["config"]),
        )
    except (KeyError, TypeError, ValueError, ValidationError) as exc:
        raise ParserFileError(f"Corrupt parser file {fpath}: {exc}") from exc
