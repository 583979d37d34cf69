"""Custom exceptions for canonaug."""

from __future__ import annotations

from typing import Any


class CanonAugError(Exception):
    """Base exception for all canonaug errors."""


class GrammarError(CanonAugError, ValueError):
    """Exception raised when a grammar is malformed."""


class GrammarSyntaxError(GrammarError):
    """Exception raised for a grammar file line that cannot be read."""

    def __init__(self, message: str, *, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class UndefinedNonterminalError(GrammarError):
    """Exception raised when a right-hand side references a nonterminal without productions."""


class AlignmentArityError(GrammarError):
    """Exception raised when canonical placeholders and logical holes do not pair up."""


class NoParseError(CanonAugError, ValueError):
    """Exception raised when a token sequence is outside the grammar's language."""


class DepthExhaustedError(CanonAugError):
    """Exception raised when no production can terminate within the remaining depth."""


class EnumerationLimitError(CanonAugError):
    """Exception raised when language enumeration exceeds its frontier cap."""


class DecodeError(CanonAugError):
    """Base exception for constrained decoding failures."""


class DeadEndError(DecodeError):
    """Exception raised when the grammar allows no continuation before completion."""


class LengthExceededError(DecodeError):
    """Exception raised when decoding reaches max_len without completing a sentence."""


class EmptyBeamError(DecodeError):
    """Exception raised when every beam hypothesis died."""


class EmptyCorpusError(CanonAugError, ValueError):
    """Exception raised when training or evaluation receives no data."""


class PIIError(CanonAugError):
    """Base exception for PII replacement errors."""


class MissingCategoryError(PIIError, KeyError):
    """Exception raised when no replacement pool exists for a slot category."""


class ExhaustedPoolError(PIIError):
    """Exception raised when a pool cannot provide a value different from the original."""


class RemoteError(CanonAugError):
    """Base exception for completion service errors."""


class RemoteNetworkError(RemoteError):
    """Exception raised when the completion service stays unreachable after retries."""


class MalformedResponseError(RemoteError):
    """Exception raised when the completion service answers with an unexpected body."""


class AuthenticationError(RemoteError):
    """Exception raised when the completion service rejects the credentials."""


class ReplayMissError(RemoteError):
    """Exception raised in replay mode when no recording matches a request."""


class DegenerateInputError(CanonAugError, ValueError):
    """Exception raised when a statistic is undefined for the given sample."""


class TemplateCoverageError(CanonAugError, ValueError):
    """Exception raised when a benchmark production has no natural template."""


class ParserFileError(CanonAugError):
    """Exception raised when a serialized parser cannot be loaded."""


class PipelineError(CanonAugError):
    """Exception raised when a pipeline stage aborts an iteration."""

    def __init__(self, message: str, *, report: dict[str, Any] | None = None) -> None:
        super().__init__(message)
        self.report = report or {}


class CLIError(CanonAugError):
    """Error raised for invalid command line usage."""
