"""Utterance understanding: tokens, intents, concepts, sentiment, topic, keywords.

`NluPipeline` bundles the immutable resources (grammar, lexicons) and turns
raw text into an `NluResult`. Everything here is a pure function of its
inputs, so one pipeline is safely shared across sessions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import OversizeInputError
from .grammar import ConceptSpan, Grammar, parse_concepts
from .keywords import extract_keywords_rake
from .sentiment import SentimentLexicon, detect_mood, sentiment_score
from .textnorm import normalize

MAX_INPUT_CHARS = 2000

INTENT_CATCH_ALL = "CatchAllIntent"
INTENT_YES = "yes_intent"
INTENT_NO = "no_intent"
INTENT_STOP = "StopIntent"
INTENT_FSM_REQUEST = "fsm_request"
INTENT_CONCLUDE = "conclude"
INTENT_LAUNCH = "LaunchIntent"

INTENT_VOCABULARY = (
    INTENT_CATCH_ALL,
    INTENT_YES,
    INTENT_NO,
    INTENT_LAUNCH,
    INTENT_FSM_REQUEST,
    INTENT_STOP,
    INTENT_CONCLUDE,
)

TOPIC_PHATIC = "Phatic"
TOPIC_OTHER = "Other"
PHATIC_MAX_TOKENS = 4

# Concepts that propose a topic or activity; their slots may name an FSM.
GAMBIT_FAMILY = frozenset({"Gambit", "ChatGambit", "ActionGambit", "TellMe"})


@dataclass(frozen=True)
class IntentRules:
    yes_words: frozenset[str]
    no_words: frozenset[str]
    stop_words: frozenset[str]
    fsm_topic_words: dict[str, str]  # word -> fsm id
    gambit_concepts: frozenset[str] = GAMBIT_FAMILY


@dataclass(frozen=True)
class NluResult:
    raw_text: str
    tokens: tuple[str, ...]
    intents: tuple[str, ...]
    concepts: tuple[ConceptSpan, ...]
    sentiment: float
    topic: str
    keywords: tuple[tuple[str, float], ...]
    mood: str | None = None

    def has_intent(self, label: str) -> bool:
        return label in self.intents

    def concept_paths(self) -> tuple[str, ...]:
        return tuple(span.path for span in self.concepts)

    def slot_values(self) -> tuple[str, ...]:
        return tuple(span.slot_str for span in self.concepts if span.slot_str)


def requested_fsms(concepts: tuple[ConceptSpan, ...] | list[ConceptSpan], rules: IntentRules) -> list[str]:
    """FSM ids a gambit-family span asks for, via slot words or sub-concept suffix."""
    found: list[str] = []
    for span in concepts:
        if span.concept not in rules.gambit_concepts:
            continue
        words = list(span.slot_text or ())
        if "." in span.path:
            sub = span.path.split(".", 1)[1]
            words.append(sub.rsplit("_", 1)[-1])
        for word in words:
            fsm_id = rules.fsm_topic_words.get(word)
            if fsm_id and fsm_id not in found:
                found.append(fsm_id)
    return found


def classify_intents(
    tokens: list[str] | tuple[str, ...],
    concepts: tuple[ConceptSpan, ...] | list[ConceptSpan],
    rules: IntentRules,
) -> tuple[str, ...]:
    """Rule-based intent labels; CatchAllIntent only when nothing else fires."""
    token_set = set(tokens)
    labels: list[str] = []
    if token_set & rules.yes_words:
        labels.append(INTENT_YES)
    if token_set & rules.no_words:
        labels.append(INTENT_NO)
    if token_set & rules.stop_words:
        labels.append(INTENT_STOP)
    if requested_fsms(concepts, rules):
        labels.append(INTENT_FSM_REQUEST)
    if any(span.concept == "Conclude" for span in concepts):
        labels.append(INTENT_CONCLUDE)
    if not labels:
        labels.append(INTENT_CATCH_ALL)
    return tuple(labels)


def classify_topic(tokens: list[str] | tuple[str, ...], topic_lexicon: dict[str, set[str]]) -> str:
    """Topic with the most lexicon hits; short zero-hit inputs are Phatic."""
    best_topic: str | None = None
    best_hits = 0
    for topic, words in topic_lexicon.items():
        hits = sum(1 for tok in tokens if tok in words)
        if hits > best_hits:
            best_topic = topic
            best_hits = hits
    if best_topic is None:
        return TOPIC_PHATIC if len(tokens) <= PHATIC_MAX_TOKENS else TOPIC_OTHER
    return best_topic


def load_wordlist(path: str) -> frozenset[str]:
    with open(path, encoding="utf-8") as fh:
        return frozenset(line.strip() for line in fh if line.strip() and not line.startswith("#"))


def load_tagged_lexicon(path: str) -> dict[str, set[str]]:
    """`tag:word` lines into an insertion-ordered mapping tag -> word set."""
    lexicon: dict[str, set[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            tag, word = line.split(":", 1)
            lexicon.setdefault(tag, set()).add(word)
    return lexicon


def load_word_map(path: str) -> dict[str, str]:
    """`tag:word` lines into a word -> tag mapping (first tag wins)."""
    mapping: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            tag, word = line.split(":", 1)
            mapping.setdefault(word, tag)
    return mapping


@dataclass(frozen=True)
class NluPipeline:
    grammar: Grammar
    lexicon: SentimentLexicon
    topic_lexicon: dict[str, set[str]]
    stopwords: frozenset[str]
    intent_rules: IntentRules

    def analyze(self, raw_text: str, expecting_mood: bool = False) -> NluResult:
        return analyze(raw_text, self, expecting_mood=expecting_mood)


def analyze(raw_text: str, pipeline: NluPipeline, expecting_mood: bool = False) -> NluResult:
    """Full per-utterance bundle; mood only when the caller expects one."""
    if len(raw_text) > MAX_INPUT_CHARS:
        raise OversizeInputError(f"utterance length {len(raw_text)} exceeds {MAX_INPUT_CHARS}")
    tokens = normalize(raw_text)
    concepts = tuple(parse_concepts(tokens, pipeline.grammar))
    intents = classify_intents(tokens, concepts, pipeline.intent_rules)
    score = sentiment_score(tokens, pipeline.lexicon)
    topic = classify_topic(tokens, pipeline.topic_lexicon)
    keywords = tuple(extract_keywords_rake(tokens, set(pipeline.stopwords)))
    mood = detect_mood(score) if expecting_mood else None
    return NluResult(
        raw_text=raw_text,
        tokens=tuple(tokens),
        intents=intents,
        concepts=concepts,
        sentiment=score,
        topic=topic,
        keywords=keywords,
        mood=mood,
    )
