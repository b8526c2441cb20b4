"""Utterance normalization: lowercase, punctuation-free word lists.

Every text surface in the engine (grammar phrases, lexicon lookups,
embeddings, relevance scoring) works on the output of :func:`normalize`
so that "Don't!" and "dont" agree everywhere.
"""

from __future__ import annotations

import re

_NON_WORD = re.compile(r"[^a-z0-9]+")
_APOSTROPHE = re.compile(r"[’']")


def normalize(text: str) -> list[str]:
    """Lowercase, strip punctuation, and split into word tokens.

    Apostrophes are deleted ("don't" -> "dont"); all other
    non-alphanumeric characters act as separators.
    """
    lowered = _APOSTROPHE.sub("", text.lower())
    return [tok for tok in _NON_WORD.split(lowered) if tok]


def normalize_joined(text: str) -> str:
    return " ".join(normalize(text))
