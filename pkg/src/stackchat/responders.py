"""Single-turn response generators over local corpora.

Each responder proposes at most one scored, attributed candidate per
turn. Stores are immutable after load; session-scoped state (fact
dedup, pending headline description, joke deck position) travels in the
context the engine passes in.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field

from .errors import SourceUnavailableError
from .nlu import NluResult
from .vectors import Embedder, HashedTfEmbedder, cosine

logger = logging.getLogger(__name__)

TAG_NEWS_VERIFIED = "news_verified"
TAG_SOCIAL_MEDIA = "from_social_media"

DEFAULT_TEMPLATE_THRESHOLD = 0.85
QA_THRESHOLD = 0.82
SENTENCE_THRESHOLD = 0.98

FACT_PREFIX = "Did you know that "
PENDING_HEADLINE_VAR = "pending_headline_description"


@dataclass(frozen=True)
class CandidateResponse:
    text: str
    source: str
    score: float
    tags: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("candidate response text must be non-empty")


@dataclass(frozen=True)
class TemplateEntry:
    question: str
    answer: str
    vector: tuple[float, ...]


@dataclass(frozen=True)
class QaPair:
    prompt: str
    reply: str
    vector: tuple[float, ...]


@dataclass(frozen=True)
class FactEntry:
    entity: str
    fact_text: str


@dataclass(frozen=True)
class JokeEntry:
    setup: str
    punchline: str | None = None  # present = two-part joke


@dataclass(frozen=True)
class Headline:
    title: str
    description: str
    popularity: float
    keywords: tuple[str, ...]


@dataclass
class ResponderContext:
    """Mutable per-session state a responder may consult or update."""

    session_vars: dict[str, str] = field(default_factory=dict)
    facts_used: set[str] = field(default_factory=set)
    keywords: tuple[tuple[str, float], ...] = ()
    previous_turn_tokens: tuple[str, ...] = ()


def _read_jsonl(path: str) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def load_templates(path: str, embedder: Embedder) -> list[TemplateEntry]:
    return [
        TemplateEntry(question=r["q"], answer=r["a"], vector=tuple(embedder.embed(r["q"])))
        for r in _read_jsonl(path)
    ]


def load_qa_pairs(path: str, embedder: Embedder) -> list[QaPair]:
    return [
        QaPair(prompt=r["prompt"], reply=r["reply"], vector=tuple(embedder.embed(r["prompt"])))
        for r in _read_jsonl(path)
    ]


def load_facts(path: str) -> list[FactEntry]:
    return [FactEntry(entity=r["entity"], fact_text=r["fact"]) for r in _read_jsonl(path)]


def load_jokes(path: str) -> list[JokeEntry]:
    return [JokeEntry(setup=r["setup"], punchline=r.get("punchline")) for r in _read_jsonl(path)]


def load_headlines(path: str) -> list[Headline]:
    return [
        Headline(
            title=r["title"],
            description=r["description"],
            popularity=float(r["popularity"]),
            keywords=tuple(r.get("keywords", ())),
        )
        for r in _read_jsonl(path)
    ]


def template_match(
    nlu: NluResult,
    store: list[TemplateEntry],
    embedder: Embedder,
    threshold: float = DEFAULT_TEMPLATE_THRESHOLD,
    source: str = "templates",
) -> CandidateResponse | None:
    """Best stored question by cosine; answer returned above the threshold."""
    if not store:
        return None
    query = embedder.embed(nlu.raw_text)
    best: TemplateEntry | None = None
    best_sim = -2.0
    for entry in store:
        sim = cosine(query, list(entry.vector))
        if sim > best_sim:
            best = entry
            best_sim = sim
    if best is None or best_sim <= threshold:
        return None
    return CandidateResponse(text=best.answer, source=source, score=best_sim)


def conversation_retrieve(
    nlu: NluResult,
    pairs: list[QaPair],
    embedder: Embedder,
    threshold: float = QA_THRESHOLD,
    source: str = "conversation_retrieval",
) -> CandidateResponse | None:
    """Reply of the nearest stored prompt when similarity clears the cutoff."""
    if not pairs:
        return None
    query = embedder.embed(nlu.raw_text)
    best: QaPair | None = None
    best_sim = -2.0
    for pair in pairs:
        sim = cosine(query, list(pair.vector))
        if sim > best_sim:
            best = pair
            best_sim = sim
    if best is None or best_sim < threshold:
        return None
    return CandidateResponse(text=best.reply, source=source, score=best_sim)


def fact_retrieve(
    nlu: NluResult,
    facts: list[FactEntry],
    ctx: ResponderContext,
    source: str = "fact_retrieval",
) -> CandidateResponse | None:
    """First stored entity found in slot values or keywords, once per session."""
    by_entity = {f.entity: f for f in facts}
    candidates = list(nlu.slot_values()) + [phrase for phrase, _ in ctx.keywords or nlu.keywords]
    for text in candidates:
        entry = by_entity.get(text)
        if entry is None or entry.entity in ctx.facts_used:
            continue
        ctx.facts_used.add(entry.entity)
        return CandidateResponse(
            text=f"{FACT_PREFIX}{entry.fact_text}", source=source, score=1.0
        )
    return None


class HeadlineSource:
    """Adapter interface over a headline store (live APIs stay out of tests)."""

    tags: frozenset[str] = frozenset({TAG_NEWS_VERIFIED})

    def search(self, keyword: str) -> list[Headline]:
        raise NotImplementedError


class FixtureHeadlineSource(HeadlineSource):
    def __init__(self, headlines: list[Headline], available: bool = True):
        self.headlines = headlines
        self.available = available

    def search(self, keyword: str) -> list[Headline]:
        if not self.available:
            raise SourceUnavailableError("headline source is down")
        words = set(keyword.split())
        return [h for h in self.headlines if words & set(h.keywords)]


class SocialFixtureSource(FixtureHeadlineSource):
    """Same retrieval, tagged as social media; text gets sigil cleaning."""

    tags = frozenset({TAG_SOCIAL_MEDIA})


def clean_social_text(text: str) -> str:
    """Strip #/@ sigils, URLs, and emoticon codepoints from social posts."""
    words = []
    for word in text.split():
        if word.startswith("http://") or word.startswith("https://"):
            continue
        word = word.lstrip("#@")
        word = "".join(ch for ch in word if ord(ch) < 0x2600)
        if word:
            words.append(word)
    return " ".join(words)


def headline_retrieve(
    nlu: NluResult,
    source_adapter: HeadlineSource,
    ctx: ResponderContext,
    source: str = "headlines",
) -> CandidateResponse | None:
    """Most popular headline matching the top keyword; description is kept
    in session vars so an elaboration request can follow up."""
    if any(span.concept == "Elaboration" for span in nlu.concepts):
        pending = ctx.session_vars.pop(PENDING_HEADLINE_VAR, None)
        if pending:
            return CandidateResponse(
                text=pending, source=source, score=1.0, tags=source_adapter.tags
            )
    keywords = ctx.keywords or nlu.keywords
    if not keywords:
        return None
    query = keywords[0][0]
    try:
        matches = source_adapter.search(query)
    except SourceUnavailableError:
        logger.warning("headline source unavailable for query %r", query)
        return None
    if not matches:
        return None
    best = max(matches, key=lambda h: h.popularity)
    ctx.session_vars[PENDING_HEADLINE_VAR] = best.description
    text = best.title
    if TAG_SOCIAL_MEDIA in source_adapter.tags:
        text = clean_social_text(text)
    return CandidateResponse(
        text=text, source=source, score=best.popularity, tags=source_adapter.tags
    )


class JokeTeller:
    """Seeded joke dealing with two-part punchline state kept in FSM vars."""

    USED_VAR = "jokes_used"
    PENDING_VAR = "pending_punchline"

    def __init__(self, jokes: list[JokeEntry]):
        self.jokes = jokes

    def tell(self, vars: dict[str, str], rng: random.Random) -> tuple[str, dict[str, str]] | None:
        if not self.jokes:
            return None
        pending = vars.get(self.PENDING_VAR)
        if pending:
            return f"{pending} want another one?", {self.PENDING_VAR: ""}
        used = {int(i) for i in vars.get(self.USED_VAR, "").split(",") if i}
        unused = [i for i in range(len(self.jokes)) if i not in used]
        if not unused:
            used = set()
            unused = list(range(len(self.jokes)))
        idx = rng.choice(unused)
        used.add(idx)
        updates = {self.USED_VAR: ",".join(str(i) for i in sorted(used))}
        joke = self.jokes[idx]
        if joke.punchline:
            updates[self.PENDING_VAR] = joke.punchline
            return joke.setup, updates
        return f"{joke.setup} want to hear another?", updates
