"""Per-conversation state and the full turn pipeline.

A turn runs: NLU -> stop/goodbye protocol -> FSM manager cascade ->
selecting/filter/rank over responders -> fallback. The engine owns the
immutable shared artifacts (grammar, registry, corpora); each session
owns its stack, seed, and history, and its turns are processed serially.
"""

from __future__ import annotations

import json
import random
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from .config import EngineConfig, default_config
from .errors import (
    ConfigError,
    SessionEndedError,
    StackchatError,
    TranscriptIoError,
)
from .fsm import FsmInstance, load_fsm_file, step_fsm
from .grammar import load_grammar_file
from .manager import (
    PENDING_PROMPT_VAR,
    SOURCE_INTERRUPTION,
    SOURCE_NONE,
    FsmRegistry,
    FsmStack,
    apply_actions,
    override_selecting_map,
    propose_and_select,
)
from .nlu import (
    INTENT_CONCLUDE,
    INTENT_NO,
    INTENT_STOP,
    INTENT_YES,
    IntentRules,
    NluPipeline,
    NluResult,
    load_tagged_lexicon,
    load_word_map,
    load_wordlist,
)
from .ranking import (
    FilterConfig,
    SelectingMap,
    filter_candidates,
    rank_candidates,
    select_responders,
)
from .responders import (
    CandidateResponse,
    FixtureHeadlineSource,
    JokeTeller,
    ResponderContext,
    conversation_retrieve,
    fact_retrieve,
    headline_retrieve,
    load_facts,
    load_headlines,
    load_jokes,
    load_qa_pairs,
    load_templates,
    template_match,
)
from .sentiment import load_lexicon
from .textnorm import normalize
from .vectors import HashedTfEmbedder

SOURCE_STOP = "stop"
SOURCE_GOODBYE = "goodbye"
SOURCE_FALLBACK = "fallback"

END_STOP = "stop_intent"
END_GOODBYE = "goodbye_script"
END_ABANDONED = "abandoned"


@dataclass
class Turn:
    user_text: str
    response_text: str
    source: str
    fsm_turn: bool
    timestamp_ms: int
    nlu_summary: dict | None = None

    def to_record(self, session_id: str, index: int) -> dict:
        return {
            "record": "turn",
            "session_id": session_id,
            "index": index,
            "user_text": self.user_text,
            "response_text": self.response_text,
            "source": self.source,
            "fsm_turn": self.fsm_turn,
            "timestamp_ms": self.timestamp_ms,
            "nlu": self.nlu_summary,
        }


@dataclass
class TurnDebug:
    intents: tuple[str, ...] = ()
    concepts: list[dict] = field(default_factory=list)
    sentiment: float = 0.0
    topic: str = ""
    stack: list[str] = field(default_factory=list)
    candidates: list[dict] = field(default_factory=list)
    decision_source: str = ""
    pipeline_invoked: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "intents": list(self.intents),
            "concepts": self.concepts,
            "sentiment": self.sentiment,
            "topic": self.topic,
            "stack": self.stack,
            "candidates": self.candidates,
            "decision_source": self.decision_source,
            "pipeline_invoked": self.pipeline_invoked,
        }


@dataclass
class ConversationState:
    session_id: str
    seed: int
    stack: FsmStack
    rng: random.Random
    turns: list[Turn] = field(default_factory=list)
    goodbye_pending: bool = False
    ended: bool = False
    end_kind: str = END_ABANDONED
    mood: str | None = None
    expecting_mood: bool = False
    facts_used: set[str] = field(default_factory=set)
    queued_fsms: list[str] = field(default_factory=list)
    session_vars: dict[str, str] = field(default_factory=dict)
    opening_text: str = ""
    pipeline_log: list[tuple[int, str]] = field(default_factory=list)
    fsm_call_log: list[tuple[int, str]] = field(default_factory=list)


def _nlu_summary(nlu: NluResult) -> dict:
    return {
        "intents": list(nlu.intents),
        "concepts": [
            {"path": s.path, "start": s.start, "end": s.end, "slot": s.slot_str}
            for s in nlu.concepts
        ],
        "sentiment": nlu.sentiment,
        "topic": nlu.topic,
    }


class Engine:
    """Shared immutable artifacts plus the per-turn pipeline."""

    def __init__(self, config: EngineConfig | None = None):
        self.config = config or default_config()
        self.config.validate()
        cfg = self.config

        grammar = load_grammar_file(cfg.grammar_path)
        lexicon = load_lexicon(cfg.sentiment_lexicon_path, cfg.negators_path, cfg.intensifiers_path)
        stopwords = load_wordlist(cfg.stopwords_path)
        topic_lexicon = load_tagged_lexicon(cfg.topics_path)
        rules = IntentRules(
            yes_words=load_wordlist(cfg.yes_path),
            no_words=load_wordlist(cfg.no_path),
            stop_words=load_wordlist(cfg.stop_path),
            fsm_topic_words=load_word_map(cfg.fsm_topics_path),
        )
        self.nlu = NluPipeline(
            grammar=grammar,
            lexicon=lexicon,
            topic_lexicon=topic_lexicon,
            stopwords=stopwords,
            intent_rules=rules,
        )

        self.embedder = HashedTfEmbedder(dim=cfg.embedder_dim)
        self.templates = load_templates(cfg.templates_path, self.embedder)
        qa_path = cfg.qa_sentences_path if cfg.sentence_mode else cfg.qa_pairs_path
        self.qa_pairs = load_qa_pairs(qa_path, self.embedder)
        self.qa_threshold = cfg.sentence_threshold if cfg.sentence_mode else cfg.qa_threshold
        self.facts = load_facts(cfg.facts_path)
        self.jokes = JokeTeller(load_jokes(cfg.jokes_path))
        self.headline_source = FixtureHeadlineSource(load_headlines(cfg.headlines_path))

        try:
            defs = []
            for path in sorted(Path(cfg.fsm_dir).glob("*.fsm")):
                defs.extend(load_fsm_file(str(path)))
            self.registry = FsmRegistry.from_defs(defs)
        except StackchatError as exc:
            raise ConfigError(f"cannot build FSM registry: {exc}") from exc

        self.responder_ids = (
            "templates",
            "conversation_retrieval",
            "fact_retrieval",
            "headlines",
            "jokes",
        ) + tuple(cfg.disabled_responders)
        self.selecting_map = SelectingMap.load(cfg.selecting_map_path, set(self.responder_ids))
        for fsm_def in self.registry.defs.values():
            for intent, ids in fsm_def.overrides.items():
                for rid in ids:
                    if rid not in self.responder_ids:
                        raise ConfigError(
                            f"fsm {fsm_def.id}: override {intent} names unknown responder {rid!r}"
                        )
            for arc in fsm_def.arcs:
                rid = arc.responder_id()
                if rid is not None and rid not in self.responder_ids:
                    raise ConfigError(f"fsm {fsm_def.id}: arc names unknown responder {rid!r}")

        filter_kwargs = {}
        if cfg.priority_classes is not None:
            filter_kwargs["priority_classes"] = dict(cfg.priority_classes)
        self.filter_config = FilterConfig(
            max_words=cfg.max_words,
            min_relevance=cfg.min_relevance,
            min_sentiment=cfg.min_sentiment,
            blocklist=load_wordlist(cfg.blocklist_path),
            watchlist=load_wordlist(cfg.watchlist_path),
            stopwords=stopwords,
            lexicon=lexicon,
            **filter_kwargs,
        )

    # -- session lifecycle -------------------------------------------------

    def start_session(
        self, seed: int | None = None, session_id: str | None = None
    ) -> tuple[ConversationState, Turn]:
        if seed is None:
            seed = self.config.default_seed
        if seed is None:
            seed = random.SystemRandom().randrange(2**31)
        state = ConversationState(
            session_id=session_id or uuid.uuid4().hex,
            seed=seed,
            stack=FsmStack(),
            rng=random.Random(seed),
        )
        state.stack.shared_vars = {"bot_name": self.config.bot_name}
        base_def = self.registry.get(self.registry.base_id)
        instance = FsmInstance(
            def_id=base_def.id, state=base_def.initial, vars=dict(state.stack.shared_vars)
        )
        state.stack.entries.append(instance)

        opening_nlu = self.nlu.analyze("")
        step = step_fsm(
            instance, base_def, opening_nlu, state.turns, state.rng, self._fsm_responder_call(state)
        )
        if step is None:
            raise ConfigError(f"base FSM {base_def.id} produced no opening from START")
        instance.state = step.new_state
        instance.vars.update(step.var_updates)
        if step.last_fragment:
            instance.vars[PENDING_PROMPT_VAR] = step.last_fragment
        state.opening_text = step.text
        state.expecting_mood = True
        opening = Turn(
            user_text="",
            response_text=step.text,
            source=base_def.id,
            fsm_turn=True,
            timestamp_ms=int(time.time() * 1000),
        )
        return state, opening

    # -- responder plumbing ------------------------------------------------

    def _pipeline_responder(self, rid: str, nlu: NluResult, ctx: ResponderContext) -> CandidateResponse | None:
        if rid == "templates":
            return template_match(nlu, self.templates, self.embedder, self.config.template_threshold)
        if rid == "conversation_retrieval":
            return conversation_retrieve(nlu, self.qa_pairs, self.embedder, self.qa_threshold)
        if rid == "fact_retrieval":
            return fact_retrieve(nlu, self.facts, ctx)
        if rid == "headlines":
            return headline_retrieve(nlu, self.headline_source, ctx)
        return None  # jokes is FSM-only; evi/neural_gen ship disabled

    def _fsm_responder_call(self, state: ConversationState):
        def call(rid: str, nlu: NluResult, vars: dict[str, str]):
            state.fsm_call_log.append((len(state.turns), rid))
            if rid == "jokes":
                return self.jokes.tell(vars, state.rng)
            ctx = ResponderContext(
                session_vars=state.session_vars,
                facts_used=state.facts_used,
                keywords=nlu.keywords,
            )
            cand = self._pipeline_responder(rid, nlu, ctx)
            if cand is None:
                return None
            return cand.text, {}

        return call

    # -- the turn pipeline -------------------------------------------------

    def process_turn(self, state: ConversationState, user_text: str) -> tuple[Turn, TurnDebug]:
        if state.ended:
            raise SessionEndedError(f"session {state.session_id} has ended")

        nlu = self.nlu.analyze(user_text, expecting_mood=state.expecting_mood)
        if state.expecting_mood:
            state.mood = nlu.mood
            state.expecting_mood = False

        debug = TurnDebug(
            intents=nlu.intents,
            concepts=[{"path": s.path, "slot": s.slot_str} for s in nlu.concepts],
            sentiment=nlu.sentiment,
            topic=nlu.topic,
        )

        response, source = self._respond(state, nlu, debug)

        fsm_turn = source in self.registry.defs
        turn = Turn(
            user_text=user_text,
            response_text=response,
            source=source,
            fsm_turn=fsm_turn,
            timestamp_ms=int(time.time() * 1000),
            nlu_summary=_nlu_summary(nlu),
        )
        state.turns.append(turn)
        debug.stack = state.stack.ids()
        return turn, debug

    def _respond(self, state: ConversationState, nlu: NluResult, debug: TurnDebug) -> tuple[str, str]:
        # Stop dominates everything: competition-rule immediate end.
        if INTENT_STOP in nlu.intents:
            state.ended = True
            state.end_kind = END_STOP
            debug.decision_source = SOURCE_STOP
            return self.config.farewell_on_stop, SOURCE_STOP

        if state.goodbye_pending:
            if INTENT_YES in nlu.intents:
                state.ended = True
                state.end_kind = END_GOODBYE
                state.goodbye_pending = False
                debug.decision_source = SOURCE_GOODBYE
                return self.config.goodbye_farewell, SOURCE_GOODBYE
            state.goodbye_pending = False
            if INTENT_NO in nlu.intents:
                prompt = state.stack.top().vars.get(PENDING_PROMPT_VAR, "")
                debug.decision_source = SOURCE_GOODBYE
                return prompt or self.config.fallback_text, SOURCE_GOODBYE
            # Anything else implicitly resumes the conversation.

        if INTENT_CONCLUDE in nlu.intents:
            state.goodbye_pending = True
            debug.decision_source = SOURCE_GOODBYE
            return self.config.goodbye_question, SOURCE_GOODBYE

        decision = propose_and_select(
            state.stack,
            self.registry,
            nlu,
            history=state.turns,
            rng=state.rng,
            responder_call=self._fsm_responder_call(state),
            theta_int=self.config.theta_int,
            theta_act=self.config.theta_act,
            steer_bias=self.config.steer_bias,
            queued=state.queued_fsms,
        )
        if decision.source != SOURCE_NONE:
            debug.decision_source = decision.source
            step = decision.step
            text = step.text
            if decision.source == SOURCE_INTERRUPTION:
                if decision.resume_suffix:
                    text = f"{text} {decision.resume_suffix}"
            else:
                apply_actions(state.stack, step.actions, self.registry, state.queued_fsms)
            return text, decision.source_id or ""

        debug.decision_source = SOURCE_NONE
        return self._respond_via_pipeline(state, nlu, debug)

    def _respond_via_pipeline(
        self, state: ConversationState, nlu: NluResult, debug: TurnDebug
    ) -> tuple[str, str]:
        effective = override_selecting_map(state.stack, self.selecting_map.entries, self.registry)
        responder_ids = select_responders(nlu, effective)
        prev_tokens: tuple[str, ...] = ()
        if state.turns:
            last = state.turns[-1]
            prev_tokens = tuple(normalize(last.user_text) + normalize(last.response_text))
        ctx = ResponderContext(
            session_vars=state.session_vars,
            facts_used=state.facts_used,
            keywords=nlu.keywords,
            previous_turn_tokens=prev_tokens,
        )
        candidates: list[CandidateResponse] = []
        for rid in responder_ids:
            state.pipeline_log.append((len(state.turns), rid))
            debug.pipeline_invoked.append(rid)
            cand = self._pipeline_responder(rid, nlu, ctx)
            if cand is not None:
                candidates.append(cand)
        verdicts = filter_candidates(candidates, nlu, self.filter_config, prev_tokens)
        debug.candidates = [
            {
                "text": v.candidate.text,
                "source": v.candidate.source,
                "score": v.candidate.score,
                "kept": v.kept,
                "reasons": sorted(v.reasons),
            }
            for v in verdicts
        ]
        winner = rank_candidates(verdicts, nlu, self.filter_config)
        if winner is None:
            return self.config.fallback_text, SOURCE_FALLBACK
        return winner.text, winner.source

    # -- persistence and replay ---------------------------------------------

    def persist_transcript(self, state: ConversationState, sink) -> int:
        """Write the session header plus one JSON line per turn."""
        records = [
            {
                "record": "session",
                "session_id": state.session_id,
                "seed": state.seed,
                "opening_text": state.opening_text,
                "mood": state.mood,
                "ended": state.ended,
                "end_kind": state.end_kind if state.ended else END_ABANDONED,
            }
        ]
        records.extend(
            turn.to_record(state.session_id, i) for i, turn in enumerate(state.turns)
        )
        payload = "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)
        try:
            if hasattr(sink, "write"):
                sink.write(payload)
            else:
                with open(sink, "a", encoding="utf-8") as fh:
                    fh.write(payload)
        except OSError as exc:
            raise TranscriptIoError(f"cannot write transcript: {exc}") from exc
        return len(state.turns)

    def replay(self, lines: list[str]) -> list[str]:
        """Re-run a persisted session's user texts under its stored seed;
        returns the opening text followed by each regenerated response."""
        header: dict | None = None
        user_texts: list[str] = []
        for line in lines:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            if record.get("record") == "session":
                header = record
            elif record.get("record") == "turn":
                user_texts.append(record["user_text"])
        if header is None:
            raise TranscriptIoError("transcript has no session header")
        state, opening = self.start_session(seed=header["seed"])
        responses = [opening.response_text]
        for text in user_texts:
            turn, _ = self.process_turn(state, text)
            responses.append(turn.response_text)
        return responses
