"""Token-level language models and completion backends.

:class:`NGramModel` is the trainable local model consumed by the constrained
decoder and the parser prior. Text completion goes through any
:class:`CompletionBackend`: the HTTP :class:`RemoteCompletionClient`, or a
:class:`ReplayBackend` that records and replays responses keyed by a hash of
the request body.
"""

from __future__ import annotations

__all__ = [
    "BACKOFF_FACTOR",
    "BOS",
    "EOS",
    "MARKERS",
    "UNK",
    "CompletionBackend",
    "CompletionRequest",
    "NGramModel",
    "RemoteCompletionClient",
    "ReplayBackend",
    "ReplayMode",
    "ReplayStore",
    "TokenDistribution",
    "TokenLM",
    "complete_many",
    "complete_remote",
    "next_token_logprobs",
    "replay_from_env",
    "sequence_logprob",
    "train_ngram",
    "truncate_at_stop",
]

from ._ngram import BACKOFF_FACTOR, NGramModel, next_token_logprobs, sequence_logprob, train_ngram
from ._remote import (
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
from ._types import BOS, EOS, MARKERS, UNK, TokenDistribution, TokenLM
