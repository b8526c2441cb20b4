from __future__ import annotations

from pathlib import Path

import pytest

from stackchat.config import DATA_DIR, default_config
from stackchat.grammar import load_grammar_file
from stackchat.nlu import IntentRules, NluPipeline, load_tagged_lexicon, load_word_map, load_wordlist
from stackchat.sentiment import load_lexicon
from stackchat.session import Engine

TESTS_DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def grammar():
    return load_grammar_file(str(DATA_DIR / "conversational.grammar"))


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon(
        str(DATA_DIR / "sentiment_lexicon.tsv"),
        str(DATA_DIR / "negators.txt"),
        str(DATA_DIR / "intensifiers.tsv"),
    )


@pytest.fixture(scope="session")
def stopwords():
    return load_wordlist(str(DATA_DIR / "stopwords.txt"))


@pytest.fixture(scope="session")
def intent_rules():
    return IntentRules(
        yes_words=load_wordlist(str(DATA_DIR / "yes.lex")),
        no_words=load_wordlist(str(DATA_DIR / "no.lex")),
        stop_words=load_wordlist(str(DATA_DIR / "stop.lex")),
        fsm_topic_words=load_word_map(str(DATA_DIR / "fsm_topics.lex")),
    )


@pytest.fixture(scope="session")
def pipeline(grammar, lexicon, stopwords, intent_rules):
    return NluPipeline(
        grammar=grammar,
        lexicon=lexicon,
        topic_lexicon=load_tagged_lexicon(str(DATA_DIR / "topics.lex")),
        stopwords=stopwords,
        intent_rules=intent_rules,
    )


@pytest.fixture(scope="session")
def engine():
    return Engine(default_config())


def make_nlu(
    text: str = "",
    intents: tuple[str, ...] = ("CatchAllIntent",),
    concepts: tuple = (),
    sentiment: float = 0.0,
    topic: str = "Phatic",
    keywords: tuple = (),
):
    """Hand-assembled NluResult for driving FSMs in isolation."""
    from stackchat.nlu import NluResult

    return NluResult(
        raw_text=text,
        tokens=tuple(text.split()),
        intents=intents,
        concepts=concepts,
        sentiment=sentiment,
        topic=topic,
        keywords=keywords,
    )
