"""Utils for canonaug."""

from .file_operations import (
    audit_file,
    dumps,
    iter_jsonl,
    read_json,
    read_jsonl,
    reset_directory,
    sha256_hex,
    write_json,
    write_jsonl,
)
from .overrides import merge_with_overrides, parse_override
from .tokens import QUOTE, Tokens, as_tokens, contains_subsequence, detokenize, tokenize

__all__ = [
    "QUOTE",
    "Tokens",
    "as_tokens",
    "audit_file",
    "contains_subsequence",
    "detokenize",
    "dumps",
    "iter_jsonl",
    "merge_with_overrides",
    "parse_override",
    "read_json",
    "read_jsonl",
    "reset_directory",
    "sha256_hex",
    "tokenize",
    "write_json",
    "write_jsonl",
]
