import pytest

from canonaug.exceptions import (
    AuthenticationError,
    CanonAugError,
    CLIError,
    DeadEndError,
    DecodeError,
    DegenerateInputError,
    EmptyBeamError,
    EmptyCorpusError,
    ExhaustedPoolError,
    GrammarError,
    GrammarSyntaxError,
    LengthExceededError,
    MissingCategoryError,
    NoParseError,
    PIIError,
    PipelineError,
    RemoteError,
    RemoteNetworkError,
    ReplayMissError,
)


def test_grammar_syntax_error_carries_line():
    error = GrammarSyntaxError("Expected 'NT -> canonical => logical'", line=4)
    assert error.line == 4
    assert str(error) == "line 4: Expected 'NT -> canonical => logical'"
    assert isinstance(error, GrammarError)
    assert isinstance(error, ValueError)


def test_pipeline_error_keeps_report():
    error = PipelineError("iteration 1 failed", report={"error": "simulate: down"})
    assert error.report == {"error": "simulate: down"}
    assert PipelineError("no report").report == {}


@pytest.mark.parametrize(
    ("error_type", "parent"),
    [
        (DeadEndError, DecodeError),
        (LengthExceededError, DecodeError),
        (EmptyBeamError, DecodeError),
        (MissingCategoryError, PIIError),
        (ExhaustedPoolError, PIIError),
        (RemoteNetworkError, RemoteError),
        (AuthenticationError, RemoteError),
        (ReplayMissError, RemoteError),
        (NoParseError, CanonAugError),
        (EmptyCorpusError, CanonAugError),
        (DegenerateInputError, CanonAugError),
        (CLIError, CanonAugError),
    ],
)
def test_exception_hierarchy(error_type, parent):
    assert issubclass(error_type, parent)
    assert str(error_type("boom")) == "boom"


def test_missing_category_is_a_key_error():
    with pytest.raises(KeyError):
        raise MissingCategoryError("title")
