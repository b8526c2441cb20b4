from __future__ import annotations

import random

import pytest

from stackchat.config import DATA_DIR
from stackchat.errors import FsmDefinitionError, NullArcLoopError, UnknownAtomError
from stackchat.fsm import (
    Arc,
    FsmDef,
    FsmInstance,
    activation_score,
    evaluate_arc,
    load_fsm_defs,
    load_fsm_file,
    parse_condition,
    render_template,
    step_fsm,
)
from stackchat.grammar import ConceptSpan

from conftest import make_nlu


def arc(frm="a", to="b", cond="always", score=1.0, **kwargs):
    return Arc(from_state=frm, to_state=to, condition=parse_condition(cond), score=score, **kwargs)


def span(path, start=0, end=1, slot=None):
    return ConceptSpan(path=path, start=start, end=end, slot_text=slot)


# -- conditions and scoring ---------------------------------------------------


def test_always_arc_scores_base():
    assert evaluate_arc(arc(cond="always", score=1.0), make_nlu()) == 1.0


def test_intent_mismatch_is_no_match():
    nlu = make_nlu(intents=("no_intent",))
    assert evaluate_arc(arc(cond="intent(yes_intent)"), nlu) is None


def test_concept_atoms_earn_specificity_bonus():
    nlu = make_nlu(concepts=(span("Backstory.backstory_name"),), sentiment=0.4)
    score = evaluate_arc(arc(cond="concept(Backstory.*) and sentiment_gt(0)", score=2.0), nlu)
    assert score == pytest.approx(2.1)


def test_two_concept_atoms_earn_double_bonus():
    nlu = make_nlu(concepts=(span("Assent"), span("Praise.praise_cute", 1, 2)))
    score = evaluate_arc(arc(cond="concept(Assent) and concept(Praise*)", score=1.0), nlu)
    assert score == pytest.approx(1.2)


def test_slot_present_requires_slot_text():
    with_slot = make_nlu(concepts=(span("Gambit.gambit_slot", slot=("movies",)),))
    without = make_nlu(concepts=(span("Gambit.gambit_slot"),))
    condition = "slot_present(Gambit.gambit_slot)"
    assert evaluate_arc(arc(cond=condition), with_slot) == 1.0
    assert evaluate_arc(arc(cond=condition), without) is None


def test_sentiment_and_topic_atoms():
    nlu = make_nlu(sentiment=-0.4, topic="Music")
    assert evaluate_arc(arc(cond="sentiment_lt(-0.3)"), nlu) == 1.0
    assert evaluate_arc(arc(cond="sentiment_gt(-0.3)"), nlu) is None
    assert evaluate_arc(arc(cond="topic(Music)"), nlu) == 1.0
    assert evaluate_arc(arc(cond="topic(Sports)"), nlu) is None


def test_unknown_atom_rejected():
    with pytest.raises(UnknownAtomError):
        parse_condition("phase_of_moon(full)")


# -- stepping -----------------------------------------------------------------


def two_state_def(**kwargs):
    return FsmDef(
        id="toy",
        kind="topic",
        states=("START", "a", "b"),
        initial="START",
        arcs=(
            arc("START", "a", "always", 1.0, responses=("hello",)),
            arc("a", "b", "intent(yes_intent)", 2.0, responses=("confirmed",)),
        ),
        **kwargs,
    )


def test_step_selects_best_matching_arc():
    fsm = two_state_def()
    inst = FsmInstance(def_id="toy", state="START")
    result = step_fsm(inst, fsm, make_nlu(), rng=random.Random(1))
    assert result is not None
    assert result.text == "hello"
    assert result.new_state == "a"
    assert result.arcs_taken == 1


def test_step_returns_none_when_nothing_matches():
    fsm = two_state_def()
    inst = FsmInstance(def_id="toy", state="a")
    assert step_fsm(inst, fsm, make_nlu(intents=("no_intent",)), rng=random.Random(1)) is None


def test_opening_turn_chains_null_arc(engine):
    base = engine.registry.get("base")
    inst = FsmInstance(def_id="base", state="START", vars={"bot_name": "Piper"})
    result = step_fsm(inst, base, make_nlu(), rng=random.Random(5))
    assert result is not None
    assert result.arcs_taken == 2  # entry arc plus one null arc
    assert result.new_state == "mood"
    assert "how" in result.text  # greeting and mood question combined
    assert "Piper" in result.text
    # the landing state has no outgoing null arc left to follow
    assert not any(a.null_arc for a in base.arcs_from(result.new_state))


def test_null_self_loop_guard():
    fsm = FsmDef(
        id="loop",
        kind="topic",
        states=("START", "a"),
        initial="START",
        arcs=(
            arc("START", "a", "always", 1.0, responses=("in",)),
            arc("a", "a", "always", 0.0, null_arc=True, responses=()),
        ),
    )
    inst = FsmInstance(def_id="loop", state="START")
    with pytest.raises(NullArcLoopError):
        step_fsm(inst, fsm, make_nlu(), rng=random.Random(1))


def test_tie_breaks_by_definition_order():
    fsm = FsmDef(
        id="tie",
        kind="topic",
        states=("START", "x", "y"),
        initial="START",
        arcs=(
            arc("START", "x", "always", 1.0, responses=("first",)),
            arc("START", "y", "always", 1.0, responses=("second",)),
        ),
    )
    inst = FsmInstance(def_id="tie", state="START")
    result = step_fsm(inst, fsm, make_nlu(), rng=random.Random(1))
    assert result.text == "first"


def test_step_deterministic_for_fixed_seed():
    fsm = FsmDef(
        id="alts",
        kind="topic",
        states=("START", "a"),
        initial="START",
        arcs=(arc("START", "a", "always", 1.0, responses=("one", "two", "three")),),
    )
    texts = set()
    for _ in range(5):
        inst = FsmInstance(def_id="alts", state="START")
        texts.add(step_fsm(inst, fsm, make_nlu(), rng=random.Random(99)).text)
    assert len(texts) == 1


def test_chance_arc_is_seed_gated():
    fsm = FsmDef(
        id="maybe",
        kind="topic",
        states=("START", "a"),
        initial="START",
        arcs=(arc("START", "a", "always", 1.0, responses=("rare",), chance=0.25),),
    )
    fire_seed = next(s for s in range(100) if random.Random(s).random() < 0.25)
    skip_seed = next(s for s in range(100) if random.Random(s).random() >= 0.25)
    inst = FsmInstance(def_id="maybe", state="START")
    assert step_fsm(inst, fsm, make_nlu(), rng=random.Random(fire_seed)).text == "rare"
    assert step_fsm(inst, fsm, make_nlu(), rng=random.Random(skip_seed)) is None


def test_responder_arc_uses_callback():
    fsm = FsmDef(
        id="call",
        kind="topic",
        states=("START", "a"),
        initial="START",
        arcs=(arc("START", "a", "always", 1.0, actions=(("responder", "jokes"),)),),
    )
    inst = FsmInstance(def_id="call", state="START")

    def callback(rid, nlu, vars):
        assert rid == "jokes"
        return "a joke", {"jokes_used": "0"}

    result = step_fsm(inst, fsm, make_nlu(), rng=random.Random(1), responder_call=callback)
    assert result.text == "a joke"
    assert result.var_updates == {"jokes_used": "0"}


def test_responder_arc_without_callback_falls_through():
    fsm = FsmDef(
        id="call",
        kind="topic",
        states=("START", "a", "b"),
        initial="START",
        arcs=(
            arc("START", "a", "always", 2.0, actions=(("responder", "jokes"),)),
            arc("START", "b", "always", 1.0, responses=("plain",)),
        ),
    )
    inst = FsmInstance(def_id="call", state="START")
    result = step_fsm(inst, fsm, make_nlu(), rng=random.Random(1))
    assert result.text == "plain"
    assert result.new_state == "b"


# -- templates ----------------------------------------------------------------


def test_render_template_interpolation():
    nlu = make_nlu(concepts=(span("Gambit.gambit_slot", slot=("star", "wars")),))
    text = render_template("you said {slot:Gambit.gambit_slot}, {var:name}!", nlu, {"name": "sam"})
    assert text == "you said star wars, sam!"


def test_render_template_missing_values_collapse():
    text = render_template("oh {slot:Nope.nope} {var:missing} well", make_nlu(), {})
    assert text == "oh well"


# -- activation ---------------------------------------------------------------


def test_activation_score_takes_best_rule(engine):
    movie = engine.registry.get("movie")
    nlu = make_nlu(topic="Movies_TV")
    assert activation_score(movie, nlu) == pytest.approx(2.0)
    boosted = make_nlu(intents=("fsm_request",), topic="Movies_TV")
    assert activation_score(movie, boosted) == pytest.approx(4.0)


def test_activation_no_match(engine):
    movie = engine.registry.get("movie")
    assert activation_score(movie, make_nlu()) is None


def test_jokes_activation_from_fixture(engine, pipeline):
    jokes = engine.registry.get("jokes")
    nlu = pipeline.analyze("tell me a joke")
    assert activation_score(jokes, nlu) == pytest.approx(4.0)


# -- definition validation and parsing ---------------------------------------


def test_interruption_shape_enforced():
    with pytest.raises(FsmDefinitionError):
        FsmDef(
            id="bad",
            kind="interruption",
            states=("START", "a", "b"),
            initial="START",
            arcs=(),
        )
    with pytest.raises(FsmDefinitionError):
        FsmDef(
            id="bad2",
            kind="interruption",
            states=("START", "a"),
            initial="START",
            arcs=(arc("START", "a", "always", 1.0, actions=(("push", "movie"),)),),
        )


def test_null_arc_requires_always():
    with pytest.raises(FsmDefinitionError):
        FsmDef(
            id="bad",
            kind="topic",
            states=("START", "a"),
            initial="START",
            arcs=(arc("START", "a", "intent(yes_intent)", 1.0, null_arc=True),),
        )


def test_arc_to_unknown_state_rejected():
    with pytest.raises(FsmDefinitionError):
        FsmDef(
            id="bad",
            kind="topic",
            states=("START",),
            initial="START",
            arcs=(arc("START", "elsewhere", "always", 1.0),),
        )


def test_load_fixture_files():
    for name in ("base.fsm", "movie.fsm", "backstory.fsm", "jokes.fsm", "songs.fsm", "interruptions.fsm"):
        defs = load_fsm_file(str(DATA_DIR / "fsms" / name))
        assert defs
    interruptions = load_fsm_file(str(DATA_DIR / "fsms" / "interruptions.fsm"))
    assert len(interruptions) == 9
    assert all(d.kind == "interruption" for d in interruptions)


def test_parse_arc_with_all_flags():
    defs = load_fsm_defs(
        "fsm t kind=topic\n"
        "state START\n"
        "state a\n"
        'arc START -> a when always score 1.5 chance=0.5 queue=t say "hi" "yo"\n'
    )
    a = defs[0].arcs[0]
    assert a.chance == 0.5
    assert a.responses == ("hi", "yo")
    assert a.stack_actions() == (("queue", "t"),)


def test_parse_rejects_garbage():
    with pytest.raises(FsmDefinitionError):
        load_fsm_defs("fsm t kind=topic\nstate START\narc START when always\n")
    with pytest.raises(FsmDefinitionError):
        load_fsm_defs("state orphan\n")
