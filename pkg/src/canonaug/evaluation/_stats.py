"""Trial statistics: sample mean and deviation, paired t-test."""

from __future__ import annotations

from collections.abc import Sequence
from typing import NamedTuple

import numpy as np
from scipy.special import betainc

from ..exceptions import DegenerateInputError

ZERO_VARIANCE_TOLERANCE = 1e-12


class PairedTTest(NamedTuple):
    """Paired t statistic and its two-sided p-value."""

    statistic: float
    pvalue: float
    df: int


def sample_std(values: Sequence[float]) -> float:
    """Standard deviation with the ``n - 1`` denominator; 0 for a single value."""
    if len(values) < 2:
        return 0.0
    return float(np.std(np.asarray(values, dtype=float), ddof=1))


def paired_ttest(a: Sequence[float], b: Sequence[float]) -> PairedTTest:
    """Paired t-test of ``a`` against ``b``.

    The p-value is the two-sided tail of Student's t with ``n - 1`` degrees of
    freedom, ``I_{df/(df+t^2)}(df/2, 1/2)`` with ``I`` the regularized
    incomplete beta function.

    Raises
    ------
    ValueError
        If the samples differ in length.
    DegenerateInputError
        With fewer than two pairs or when the differences have zero variance.

    Examples
    --------
    >>> result = paired_ttest([10, 12, 14, 16], [9, 10, 12, 13])
    >>> round(result.statistic, 6), result.df
    (4.898979, 3)
    """
    if len(a) != len(b):
        raise ValueError(f"Paired samples differ in length: {len(a)} != {len(b)}")
    if len(a) < 2:
        raise DegenerateInputError("A paired t-test needs at least two pairs")
    differences = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    n = len(differences)
    mean = float(differences.mean())
    std = float(differences.std(ddof=1))
    if not np.isfinite(std) or std <= ZERO_VARIANCE_TOLERANCE * max(1.0, abs(mean)):
        raise DegenerateInputError("Differences have zero variance; the t statistic is undefined")
    statistic = mean / (std / np.sqrt(n))
    df = n - 1
    pvalue = float(betainc(df / 2.0, 0.5, df / (df + statistic**2)))
    return PairedTTest(float(statistic), min(1.0, pvalue), df)
