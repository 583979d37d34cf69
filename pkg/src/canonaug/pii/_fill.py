"""Offline pool population through a completion backend."""

from __future__ import annotations

from loguru import logger

from ..lm import CompletionBackend, CompletionRequest, truncate_at_stop
from ..utils import QUOTE, Tokens, as_tokens, detokenize
from ._pools import ReplacementPools

FILL_STOP = "\n"
MAX_FILL_ROUNDS = 5


def fill_prompt(category: str, examples: tuple[Tokens, ...]) -> str:
    """Prompt listing known values of ``category``, one per line, ending on an open line.

    Examples
    --------
    >>> print(fill_prompt("name", (("kai",),)), end="|")
    Examples of name values, one per line:
    kai
    |
    """
    lines = [f"Examples of {category} values, one per line:", *(detokenize(value) for value in examples)]
    return "\n".join(lines) + "\n"


def fill_pool(
    backend: CompletionBackend,
    pools: ReplacementPools,
    category: str,
    count: int,
    *,
    temperature: float = 1.0,
    max_tokens: int = 8,
) -> ReplacementPools:
    """Ask ``backend`` for up to ``count`` new values of ``category`` and add them to ``pools``.

    Each completion proposes one value. Values already pooled, blank ones and
    ones holding a quote are dropped. Up to ``MAX_FILL_ROUNDS`` requests are
    made; fewer than ``count`` values may come back. The result carries no
    balance groups, since new values belong to none of them.

    Raises
    ------
    RemoteError
        Propagated from the backend.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    known = set(pools.values(category)) if category in pools.categories else set()
    examples = tuple(pools.values(category)) if category in pools.categories else ()
    added: list[Tokens] = []
    for round_index in range(MAX_FILL_ROUNDS):
        request = CompletionRequest(
            prompt=fill_prompt(category, (*examples, *added)),
            max_tokens=max_tokens,
            temperature=temperature,
            n_samples=count - len(added),
            stop=FILL_STOP,
        )
        for text in backend.complete(request):
            value = as_tokens(truncate_at_stop(text, FILL_STOP))
            if value and QUOTE not in value and value not in known:
                known.add(value)
                added.append(value)
        logger.debug("Pool fill round {} for {}: {} new value(s)", round_index, category, len(added))
        if len(added) >= count:
            break
    added = added[:count]
    if len(added) < count:
        logger.warning("Pool {} received {} of {} requested values", category, len(added), count)
    return pools.extended({category: added})
