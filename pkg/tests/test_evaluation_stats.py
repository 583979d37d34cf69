import math

import numpy as np
import pytest
from scipy import stats

from canonaug.evaluation import paired_ttest, sample_std, top1_match
from canonaug.exceptions import DegenerateInputError, EmptyCorpusError, NoParseError


def _continued_fraction(a, b, x):
    tiny = 1e-300
    c, d = 1.0, 1.0 - (a + b) * x / (a + 1.0)
    d = 1.0 / (d if abs(d) > tiny else tiny)
    result = d
    for m in range(1, 500):
        numerator = m * (b - m) * x / ((a + 2 * m - 1) * (a + 2 * m))
        d = 1.0 / (1.0 + numerator * d if abs(1.0 + numerator * d) > tiny else tiny)
        c = 1.0 + numerator / c if abs(1.0 + numerator / c) > tiny else tiny
        result *= d * c
        numerator = -(a + m) * (a + b + m) * x / ((a + 2 * m) * (a + 2 * m + 1))
        d = 1.0 / (1.0 + numerator * d if abs(1.0 + numerator * d) > tiny else tiny)
        c = 1.0 + numerator / c if abs(1.0 + numerator / c) > tiny else tiny
        step = d * c
        result *= step
        if abs(step - 1.0) < 1e-15:
            break
    return result


def _regularized_beta(a, b, x):
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    front = math.exp(math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x))
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _continued_fraction(a, b, x) / a
    return 1.0 - front * _continued_fraction(b, a, 1.0 - x) / b


def test_known_statistic():
    result = paired_ttest([10, 12, 14, 16], [9, 10, 12, 13])

    assert result.statistic == pytest.approx(2 / (math.sqrt(2 / 3) / 2))
    assert result.df == 3
    assert result.pvalue == pytest.approx(stats.ttest_rel([10, 12, 14, 16], [9, 10, 12, 13]).pvalue)


def test_agrees_with_scipy():
    rng = np.random.default_rng(0)
    for _ in range(50):
        n = int(rng.integers(2, 21))
        a = rng.normal(50.0, 10.0, n)
        b = a - rng.normal(1.0, 2.0, n)
        expected = stats.ttest_rel(a, b)
        result = paired_ttest(a.tolist(), b.tolist())

        assert result.statistic == pytest.approx(expected.statistic, rel=1e-9)
        assert result.pvalue == pytest.approx(expected.pvalue, rel=1e-7, abs=1e-12)


def test_agrees_with_incomplete_beta_oracle():
    rng = np.random.default_rng(1)
    for _ in range(50):
        n = int(rng.integers(2, 15))
        a = rng.normal(70.0, 5.0, n)
        b = rng.normal(68.0, 5.0, n)
        result = paired_ttest(a.tolist(), b.tolist())
        df = n - 1
        expected = _regularized_beta(df / 2.0, 0.5, df / (df + result.statistic**2))
        assert result.pvalue == pytest.approx(expected, rel=1e-7, abs=1e-12)


def test_sign_follows_first_sample():
    assert paired_ttest([1.0, 2.0, 4.0], [2.0, 3.0, 4.5]).statistic < 0


def test_length_mismatch():
    with pytest.raises(ValueError, match="differ in length"):
        paired_ttest([1.0, 2.0], [1.0])


@pytest.mark.parametrize(("a", "b"), [([1.0], [2.0]), ([1.0, 2.0, 3.0], [0.5, 1.5, 2.5]), ([5.0, 5.0], [5.0, 5.0])])
def test_degenerate_inputs(a, b):
    with pytest.raises(DegenerateInputError):
        paired_ttest(a, b)


def test_sample_std():
    assert sample_std([4.0]) == 0.0
    assert sample_std([1.0, 2.0, 3.0]) == pytest.approx(1.0)


class _LookupParser:
    def __init__(self, answers):
        self.answers = answers

    def parse_top1(self, natural):
        from types import SimpleNamespace

        if natural not in self.answers:
            raise NoParseError(natural)
        return SimpleNamespace(canonical=tuple(self.answers[natural].split()))


def test_top1_match_counts_failures_as_misses():
    parser = _LookupParser({"hi": "hello", "meet kai": "create event with kai", "bye": "hello"})
    test = [
        ("hi", "hello"),
        ("meet kai", "create event with kai"),
        ("bye", "create event with dana"),
        ("unknown", "hello"),
    ]
    assert top1_match(parser, test) == 50.0


def test_top1_match_needs_items():
    with pytest.raises(EmptyCorpusError):
        top1_match(_LookupParser({}), [])
