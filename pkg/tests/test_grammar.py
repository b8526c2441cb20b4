from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stackchat.errors import (
    DanglingGroupError,
    DuplicateConceptError,
    EmptyCorpusError,
    EmptyPhraseError,
    GrammarSyntaxError,
)
from stackchat.grammar import corpus_coverage, load_grammar, parse_concepts
from stackchat.textnorm import normalize

from conftest import TESTS_DATA

# Hand-traced golden spans for utterances drawn from the interruption and
# slot-value inventories: (utterance, [(path, start, end, slot)]).
GOLDEN_PARSES = [
    (
        "really i agree my favorite movie is star wars",
        [
            ("Acknowledgment", 0, 1, None),
            ("Assent", 1, 3, None),
            ("Disclosure", 3, 5, None),
            ("Disclosure.disclosure_slot", 5, 7, "star wars"),
        ],
    ),
    ("what is your favorite color", [("Backstory.backstory_favorite_slot", 0, 4, "color")]),
    ("i know what you mean", [("Concur", 0, 5, None)]),
    ("that would be great", [("Approval", 0, 4, None)]),
    ("thanks", [("Acknowledgment.ack_thanks", 0, 1, None)]),
    ("i am not surprised", [("Acknowledgment.ack_unsurprised", 0, 4, None)]),
    ("yes of course", [("Assent", 0, 3, None)]),
    ("no i do not like it", [("Dissent", 0, 6, None)]),
    ("i like gardening", [("Disclosure.disclosure_like_slot", 0, 2, "gardening")]),
    ("today is my birthday", [("Disclosure.disclosure_event", 0, 4, None)]),
    ("you asked me that already", [("Confusion.confusion_repeat", 0, 5, None)]),
    ("are you there", [("Confusion.confusion_presence", 0, 3, None)]),
    ("you are very smart", [("Praise.praise_smart", 0, 4, None)]),
    ("that is cute", [("Praise.praise_cute", 0, 3, None)]),
    ("i am bored", [("Boredom.boredom_self", 0, 3, None)]),
    ("you are boring", [("Boredom.boredom_bot", 0, 3, None)]),
    ("lets talk about sports", [("Gambit.gambit_sports", 0, 4, None)]),
    ("lets talk about music", [("Gambit.gambit_music", 0, 4, None)]),
    ("lets talk about video games", [("Gambit.gambit_games", 0, 5, None)]),
    ("whats your favorite song", [("Backstory.backstory_favorite_slot", 0, 3, "song")]),
    ("what is your favorite book", [("Backstory.backstory_favorite_slot", 0, 4, "book")]),
    ("what is your favorite food", [("Backstory.backstory_favorite_slot", 0, 4, "food")]),
    ("what is your favorite animal", [("Backstory.backstory_favorite_slot", 0, 4, "animal")]),
    ("what is your favorite sport", [("Backstory.backstory_favorite_slot", 0, 4, "sport")]),
    ("tell me a joke", [("TellMe.tellme_joke", 0, 4, None)]),
    ("lets talk about movies", [("Gambit.gambit_movies", 0, 4, None)]),
]

# Phrases with pairwise-distinct concepts and no cross-boundary merges,
# for the k-phrases -> k-spans property.
SAFE_PHRASES = [
    ("really", "Acknowledgment"),
    ("yes", "Assent"),
    ("my favorite", "Disclosure"),
    ("perfect", "Approval"),
    ("same here", "Concur"),
    ("maybe", "Demur"),
    ("trust me", "Assertion"),
    ("continue", "Continuation"),
    ("come again", "Repeat"),
    ("shut up", "Nasty"),
    ("thats wrong", "Rebuttal"),
    ("haha", "Laughter"),
    ("is it raining", "Weather"),
]

NOISE_WORDS = ["zxqv", "blorp", "wumbo", "frazzle", "plonk", "snorf"]


def spans_tuple(spans):
    return [(s.path, s.start, s.end, s.slot_str) for s in spans]


@pytest.mark.parametrize("utterance,expected", GOLDEN_PARSES)
def test_golden_parses(grammar, utterance, expected):
    assert spans_tuple(parse_concepts(normalize(utterance), grammar)) == expected


def test_fixture_inventory_size(grammar):
    assert grammar.concept_count() == 37
    assert grammar.subconcept_count() == 74
    assert len(grammar.groups) == 9


def test_empty_input_yields_empty_output(grammar):
    assert parse_concepts([], grammar) == []


def test_fully_residual_utterance(grammar):
    assert parse_concepts(normalize("zxqv blorp"), grammar) == []


def test_longest_match_beats_prefix(grammar):
    spans = parse_concepts(normalize("what is your favorite movie"), grammar)
    assert spans_tuple(spans) == [("Backstory.backstory_favorite_slot", 0, 4, "movie")]
    spans = parse_concepts(normalize("what is it"), grammar)
    assert spans_tuple(spans) == [("Question.question_what", 0, 2, None)]
    spans = parse_concepts(normalize("what is the weather like"), grammar)
    assert spans_tuple(spans) == [("Weather.weather_query", 0, 5, None)]


def test_slot_capture_ends_at_next_match(grammar):
    spans = parse_concepts(normalize("lets talk about dinosaurs okay"), grammar)
    assert spans_tuple(spans) == [
        ("Gambit.gambit_slot", 0, 3, "dinosaurs"),
        ("Acknowledgment.ack_ok", 4, 5, None),
    ]


def test_determinism(grammar):
    tokens = normalize("really i agree my favorite movie is star wars")
    first = parse_concepts(tokens, grammar)
    for _ in range(5):
        assert parse_concepts(tokens, grammar) == first


CAPTURE_PHRASES = ["lets talk about", "i like", "tell me about", "back to"]


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_spans_ordered_disjoint_and_slots_residual(grammar, data):
    phrases = data.draw(
        st.lists(
            st.sampled_from([p for p, _ in SAFE_PHRASES] + CAPTURE_PHRASES),
            min_size=0,
            max_size=5,
        )
    )
    words: list[str] = []
    for phrase in phrases:
        words.extend(data.draw(st.lists(st.sampled_from(NOISE_WORDS), max_size=2)))
        words.extend(phrase.split())
    words.extend(data.draw(st.lists(st.sampled_from(NOISE_WORDS), max_size=2)))
    spans = parse_concepts(words, grammar)

    prev_end = 0
    for span in spans:
        assert 0 <= span.start < span.end <= len(words)
        assert span.start >= prev_end  # ordered and pairwise disjoint
        prev_end = span.end

    covered = {i for s in spans for i in range(s.start, s.end)}
    for span in spans:
        if not span.slot_text:
            continue
        # slot words are exactly the residual run following the phrase
        positions = range(span.end, span.end + len(span.slot_text))
        assert [words[i] for i in positions] == list(span.slot_text)
        assert all(i not in covered for i in positions)


def test_k_distinct_phrases_give_k_spans(grammar):
    rng = random.Random(7)
    for _ in range(100):
        k = rng.randint(1, 8)
        picks = rng.sample(SAFE_PHRASES, k)
        tokens = []
        for phrase, _ in picks:
            tokens.extend(phrase.split())
        spans = parse_concepts(tokens, grammar)
        assert len(spans) == k
        assert [s.concept for s in spans] == [concept for _, concept in picks]


# -- loader ------------------------------------------------------------------


def test_minimal_grammar_loads():
    g = load_grammar('group G\nconcept Acknowledgment group=G\n  phrase "okay"\n')
    assert g.concept_count() == 1
    assert spans_tuple(parse_concepts(["okay"], g)) == [("Acknowledgment", 0, 1, None)]


def test_duplicate_concept_rejected():
    source = (
        "group G\n"
        'concept Assent group=G\n  phrase "yes"\n'
        'concept Assent group=G\n  phrase "yeah"\n'
    )
    with pytest.raises(DuplicateConceptError):
        load_grammar(source)


def test_dangling_group_rejected():
    with pytest.raises(DanglingGroupError):
        load_grammar('concept A group=Nowhere\n  phrase "hi"\n')


def test_empty_phrase_rejected():
    with pytest.raises(EmptyPhraseError):
        load_grammar('group G\nconcept A group=G\n  phrase "..."\n')


def test_capture_requires_suffix():
    source = "group G\nconcept A group=G\n  sub tail capture=slot\n"
    with pytest.raises(GrammarSyntaxError):
        load_grammar(source)


def test_unknown_directive_rejected():
    with pytest.raises(GrammarSyntaxError):
        load_grammar("group G\nwibble\n")


def test_phrase_targeting_unknown_sub_rejected():
    source = 'group G\nconcept A group=G\n  phrase "hi" -> nowhere\n'
    with pytest.raises(GrammarSyntaxError):
        load_grammar(source)


# -- coverage ----------------------------------------------------------------


def test_coverage_on_fixture_corpus(grammar):
    lines = (TESTS_DATA / "coverage_corpus.txt").read_text().splitlines()
    report = corpus_coverage([normalize(line) for line in lines], grammar)
    assert report.utterances == 20
    # Hand count: 15 of the 20 fixture lines contain at least one phrase.
    assert report.fraction_parsed == pytest.approx(0.75)
    # 16 spans over 15 parsed utterances ("my favorite movie is ..." has 2).
    assert report.mean_concepts == pytest.approx(16 / 15)
    residual_words = {word for word, _ in report.residual_histogram}
    assert "zxqv" in residual_words
    assert "star" not in residual_words  # captured as slot text, not residual


def test_coverage_empty_utterance_only(grammar):
    report = corpus_coverage([[]], grammar)
    assert report.fraction_parsed == 0.0
    assert report.mean_concepts == 0.0


def test_coverage_all_exact_phrases(grammar):
    corpus = [normalize("okay"), normalize("yes of course"), normalize("tell me a joke")]
    report = corpus_coverage(corpus, grammar)
    assert report.fraction_parsed == 1.0


def test_coverage_rejects_empty_corpus(grammar):
    with pytest.raises(EmptyCorpusError):
        corpus_coverage([], grammar)
