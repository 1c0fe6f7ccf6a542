import unicodedata

from hypothesis import given, strategies as st

from winsumm.tokenization import is_punct_token, token_count, tokenize_words


def test_clitic_and_punctuation_split():
    assert tokenize_words("Okay, let's start.") == ["okay", ",", "let", "'s", "start", "."]


def test_dont_contraction():
    assert tokenize_words("don't stop.") == ["don", "'t", "stop", "."]


def test_empty_input():
    assert tokenize_words("") == []
    assert token_count("") == 0


def test_lowercasing():
    assert tokenize_words("YELLOW yellow") == ["yellow", "yellow"]


def test_curly_apostrophe_starts_clitic():
    assert tokenize_words("let’s go") == ["let", "’s", "go"]


def test_punctuation_chars_are_single_tokens():
    assert tokenize_words("co-op 3.5%") == ["co", "-", "op", "3", ".", "5", "%"]


def test_whitespace_runs_discarded():
    assert tokenize_words("a  b\tc\n d") == ["a", "b", "c", "d"]


def test_lone_apostrophe_is_a_token():
    assert tokenize_words("'") == ["'"]
    assert tokenize_words("''x") == ["'", "'x"]


def test_token_count_matches():
    for text in ("", "a b", "don't stop.", "Okay, let's start."):
        assert token_count(text) == len(tokenize_words(text))


def test_is_punct_token():
    assert is_punct_token(".")
    assert is_punct_token("%")
    assert not is_punct_token("'s")
    assert not is_punct_token("word")


@given(st.text(max_size=80))
def test_deterministic_and_idempotent_under_lowercase(text):
    once = tokenize_words(text)
    assert tokenize_words(text) == once
    assert tokenize_words(text.lower()) == once


@given(st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=80))
def test_tokens_never_contain_whitespace(text):
    for tok in tokenize_words(text):
        assert tok
        assert not any(ch.isspace() or unicodedata.category(ch) == "Zs" for ch in tok)
