"""Two-tier response pipeline: soft filtering then rule-based ranking.

Filtering tags candidates with removal reasons (length, profanity,
negativity, irrelevance, grammar, controversy); ranking orders the kept
ones by responder priority class, then score, relevance, and id.
Controversy is source-sensitive: watchlist terms sink social-media
candidates but not verified news.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ConfigError
from .nlu import NluResult
from .responders import TAG_NEWS_VERIFIED, TAG_SOCIAL_MEDIA, CandidateResponse
from .sentiment import SentimentLexicon, sentiment_score
from .textnorm import normalize

REASON_TOO_LONG = "too_long"
REASON_PROFANITY = "profanity"
REASON_IRRELEVANT = "irrelevant"
REASON_TOO_NEGATIVE = "too_negative"
REASON_UNGRAMMATICAL = "ungrammatical"
REASON_CONTROVERSIAL = "controversial"

DEFAULT_MAX_WORDS = 50
DEFAULT_MIN_RELEVANCE = 0.05
DEFAULT_MIN_SENTIMENT = -0.6

DEFAULT_PRIORITY_CLASSES: dict[str, int] = {
    "templates": 0,
    "conversation_retrieval": 1,
    "fact_retrieval": 2,
    "headlines": 3,
    "fallback": 4,
}


@dataclass(frozen=True)
class SelectingMap:
    entries: dict[str, tuple[str, ...]]

    @classmethod
    def load(cls, path: str, known_responders: set[str] | None = None) -> "SelectingMap":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        entries = {intent: tuple(ids) for intent, ids in raw.items()}
        if known_responders is not None:
            for intent, ids in entries.items():
                for rid in ids:
                    if rid not in known_responders:
                        raise ConfigError(f"selecting map: intent {intent!r} names unknown responder {rid!r}")
        return cls(entries=entries)


def select_responders(nlu: NluResult, selecting_map: SelectingMap | dict[str, tuple[str, ...]]) -> list[str]:
    """Order-preserving deduplicated union of the map rows for each intent."""
    entries = selecting_map.entries if isinstance(selecting_map, SelectingMap) else selecting_map
    out: list[str] = []
    for intent in nlu.intents:
        for rid in entries.get(intent, ()):
            if rid not in out:
                out.append(rid)
    return out


@dataclass(frozen=True)
class FilterConfig:
    max_words: int = DEFAULT_MAX_WORDS
    min_relevance: float = DEFAULT_MIN_RELEVANCE
    min_sentiment: float = DEFAULT_MIN_SENTIMENT
    blocklist: frozenset[str] = frozenset()
    watchlist: frozenset[str] = frozenset()
    priority_classes: dict[str, int] = field(default_factory=lambda: dict(DEFAULT_PRIORITY_CLASSES))
    stopwords: frozenset[str] = frozenset()
    lexicon: SentimentLexicon | None = None


@dataclass(frozen=True)
class FilterVerdict:
    candidate: CandidateResponse
    kept: bool
    reasons: frozenset[str]
    relevance: float


def relevance(candidate_text: str, nlu: NluResult, stopwords: frozenset[str], previous_turn_tokens: tuple[str, ...] = ()) -> float:
    """Share of candidate content tokens that appear in the utterance or
    the previous turn; empty content scores 0."""
    content = [t for t in normalize(candidate_text) if t not in stopwords]
    if not content:
        return 0.0
    reference = set(nlu.tokens) | set(previous_turn_tokens)
    hits = sum(1 for t in content if t in reference)
    return hits / len(content)


def _ungrammatical(text: str) -> bool:
    if text.count('"') % 2 != 0:
        return True
    if text.count("(") != text.count(")"):
        return True
    return not any(ch.isalpha() for ch in text)


def filter_candidates(
    candidates: list[CandidateResponse],
    nlu: NluResult,
    config: FilterConfig,
    previous_turn_tokens: tuple[str, ...] = (),
) -> list[FilterVerdict]:
    verdicts: list[FilterVerdict] = []
    for cand in candidates:
        reasons: set[str] = set()
        tokens = normalize(cand.text)
        if len(tokens) > config.max_words:
            reasons.add(REASON_TOO_LONG)
        if any(t in config.blocklist for t in tokens):
            reasons.add(REASON_PROFANITY)
        if config.lexicon is not None and sentiment_score(tokens, config.lexicon) < config.min_sentiment:
            reasons.add(REASON_TOO_NEGATIVE)
        rel = relevance(cand.text, nlu, config.stopwords, previous_turn_tokens)
        if rel < config.min_relevance:
            reasons.add(REASON_IRRELEVANT)
        if _ungrammatical(cand.text):
            reasons.add(REASON_UNGRAMMATICAL)
        if TAG_SOCIAL_MEDIA in cand.tags and any(t in config.watchlist for t in tokens):
            reasons.add(REASON_CONTROVERSIAL)
        verdicts.append(
            FilterVerdict(candidate=cand, kept=not reasons, reasons=frozenset(reasons), relevance=rel)
        )
    return verdicts


def rank_candidates(verdicts: list[FilterVerdict], nlu: NluResult, config: FilterConfig | None = None) -> CandidateResponse | None:
    """Best kept candidate by (priority class, score, relevance, id)."""
    classes = (config.priority_classes if config else None) or DEFAULT_PRIORITY_CLASSES
    fallback_class = max(classes.values(), default=0) + 1
    kept = [v for v in verdicts if v.kept]
    if not kept:
        return None
    kept.sort(
        key=lambda v: (
            classes.get(v.candidate.source, fallback_class),
            -v.candidate.score,
            -v.relevance,
            v.candidate.source,
        )
    )
    return kept[0].candidate
