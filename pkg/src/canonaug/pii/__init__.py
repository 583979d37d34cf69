"""PII handling in canonical space.

PII lives only in typed grammar slots, so detection is structural: every
:class:`~canonaug.scfg.SlotFill` of a derivation is PII, and replacement swaps
each value for a fresh draw from the pool of the same category.
"""

from __future__ import annotations

__all__ = [
    "BALANCED_CATEGORY",
    "Leak",
    "LeakReport",
    "PIISpan",
    "ReplacementPools",
    "assert_no_leak",
    "detect_pii",
    "fill_pool",
    "fill_prompt",
    "replace_pii",
]

from ._fill import fill_pool, fill_prompt
from ._pools import BALANCED_CATEGORY, ReplacementPools
from ._replace import Leak, LeakReport, PIISpan, assert_no_leak, detect_pii, replace_pii
