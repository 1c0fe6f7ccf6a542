"""Word-level tokenization used everywhere token counts matter.

Every statistic, window budget, and ROUGE score in this package is computed
over these tokens, so the rules are fixed and intentionally simple:

* text is lowercased first;
* any Unicode punctuation or symbol character becomes its own single-char
  token;
* except apostrophes, which start a clitic token that absorbs the letters
  after them ("let's" -> "let", "'s"; "don't" -> "don", "'t");
* whitespace only separates.
"""

from __future__ import annotations

import unicodedata

_APOSTROPHES = frozenset({"'", "’"})


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch)[0] in "PS"


def tokenize_words(text: str) -> list[str]:
    """Split text into lowercase word tokens. Deterministic; empty in, empty out."""
    tokens: list[str] = []
    current: list[str] = []

    def flush():
        if current:
            tokens.append("".join(current))
            current.clear()

    for ch in text.lower():
        if ch.isspace() or unicodedata.category(ch).startswith("Z"):
            flush()
        elif ch in _APOSTROPHES:
            flush()
            current.append(ch)
        elif _is_punct(ch):
            flush()
            tokens.append(ch)
        else:
            current.append(ch)
    flush()
    return tokens


def token_count(text: str) -> int:
    return len(tokenize_words(text))


def is_punct_token(token: str) -> bool:
    return all(_is_punct(ch) for ch in token)
