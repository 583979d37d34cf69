"""Noisy-channel semantic parser.

The parser scores a canonical utterance ``c`` for a natural utterance ``n`` as
``log prior(c) + log channel(n | c)``: an n-gram model over canonical tokens and
a lexical translation table estimated with Model 1 EM. Decoding searches the
grammar's language with a prefix-constrained beam.
"""

from __future__ import annotations

__all__ = [
    "NULL",
    "PARSER_FORMAT",
    "PROBABILITY_FLOOR",
    "NoisyChannelParser",
    "ParseResult",
    "TranslationTable",
    "channel_logprob",
    "corpus_log_likelihood",
    "load_parser",
    "model1_em",
    "model1_em_trace",
    "parse_top1",
    "parser_payload",
    "save_parser",
    "score_parse",
    "slot_candidates",
    "train_parser",
]

from ._io import PARSER_FORMAT, load_parser, parser_payload, save_parser
from ._model1 import (
    NULL,
    PROBABILITY_FLOOR,
    TranslationTable,
    channel_logprob,
    corpus_log_likelihood,
    model1_em,
    model1_em_trace,
)
from ._noisy_channel import NoisyChannelParser, ParseResult, parse_top1, score_parse, slot_candidates, train_parser
