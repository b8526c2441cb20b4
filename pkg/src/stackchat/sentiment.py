"""Lexicon-and-rule sentiment scoring on a [-1, 1] scale, plus mood labels.

A transparent stand-in for social-media-tuned sentiment classifiers:
word valences in [-4, 4] are flipped by a preceding negator, scaled by an
adjacent intensifier, summed, and squashed into the open interval (-1, 1).
The negation scalar (-0.74) and squash constant (15) follow the published
heuristics of lexicon-based social-media scorers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import OutOfRangeError

NEGATION_SCALAR = -0.74
SQUASH_ALPHA = 15.0
NEGATOR_WINDOW = 2

MOODS = ("mood_unhappy", "mood_low", "mood_neutral", "mood_good", "mood_great")


@dataclass(frozen=True)
class SentimentLexicon:
    valences: dict[str, float]
    negators: frozenset[str] = frozenset()
    intensifiers: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.valences:
            raise ValueError("sentiment lexicon is empty")
        for word, mult in self.intensifiers.items():
            if mult <= 0:
                raise ValueError(f"intensifier multiplier for {word!r} must be > 0")


def load_lexicon(valence_path: str, negators_path: str, intensifiers_path: str) -> SentimentLexicon:
    valences: dict[str, float] = {}
    with open(valence_path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            word, value = line.split("\t")
            valences[word] = float(value)
    with open(negators_path, encoding="utf-8") as fh:
        negators = frozenset(line.strip() for line in fh if line.strip())
    intensifiers: dict[str, float] = {}
    with open(intensifiers_path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            word, mult = line.split("\t")
            intensifiers[word] = float(mult)
    return SentimentLexicon(valences=valences, negators=negators, intensifiers=intensifiers)


def sentiment_score(tokens: list[str], lexicon: SentimentLexicon) -> float:
    """Squashed valence sum, strictly inside (-1, 1); 0 for empty input."""
    raw = 0.0
    for i, tok in enumerate(tokens):
        valence = lexicon.valences.get(tok)
        if valence is None:
            continue
        if i >= 1 and tokens[i - 1] in lexicon.intensifiers:
            valence *= lexicon.intensifiers[tokens[i - 1]]
        negated = any(
            tokens[j] in lexicon.negators for j in range(max(0, i - NEGATOR_WINDOW), i)
        )
        if negated:
            valence *= NEGATION_SCALAR
        raw += valence
    if raw == 0.0:
        return 0.0
    return raw / math.sqrt(raw * raw + SQUASH_ALPHA)


def detect_mood(sentiment: float) -> str:
    """Map a sentiment score onto the five-step mood spectrum."""
    if not -1.0 <= sentiment <= 1.0:
        raise OutOfRangeError(f"sentiment {sentiment} outside [-1, 1]")
    if sentiment < -0.3:
        return "mood_unhappy"
    if sentiment < -0.05:
        return "mood_low"
    if sentiment <= 0.05:
        return "mood_neutral"
    if sentiment <= 0.5:
        return "mood_good"
    return "mood_great"
