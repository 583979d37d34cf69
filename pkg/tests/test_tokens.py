from canonaug.utils import QUOTE, as_tokens, contains_subsequence, detokenize, tokenize


def test_tokenize_lowercases_and_splits_quotes():
    assert tokenize('Show me the "Team Lunch" meeting') == (
        "show",
        "me",
        "the",
        QUOTE,
        "team",
        "lunch",
        QUOTE,
        "meeting",
    )


def test_tokenize_collapses_whitespace():
    assert tokenize("  hello \t there\n") == ("hello", "there")
    assert tokenize("") == ()


def test_as_tokens_passes_sequences_through():
    assert as_tokens(["A", "b"]) == ("A", "b")
    assert as_tokens("A b") == ("a", "b")


def test_detokenize_joins_with_spaces():
    assert detokenize(("find", QUOTE, "picnic", QUOTE)) == 'find " picnic "'


def test_contains_subsequence_finds_every_start():
    assert contains_subsequence(("a", "b", "a", "b"), ("a", "b")) == [0, 2]
    assert contains_subsequence(("a", "b"), ("b", "a")) == []
    assert contains_subsequence(("a",), ("a", "b")) == []
    assert contains_subsequence(("a",), ()) == []
