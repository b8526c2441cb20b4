"""Declarative finite-state machines with scored arcs and null-arc chaining.

Definitions are data: a line-oriented file declares states, activation
rules, and arcs carrying a condition, a score, response templates, and
stack actions. Stepping selects the best-scoring matching arc, then
drains null arcs (transitions that do not consume a user turn),
concatenating their response fragments into one turn.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field

from .errors import FsmDefinitionError, NullArcLoopError, UnknownAtomError
from .nlu import NluResult

KIND_BASE = "base"
KIND_TOPIC = "topic"
KIND_INTERRUPTION = "interruption"

START_STATE = "START"
EMPTY_STATE = "EMPTY"

CONCEPT_BONUS = 0.1
NULL_CHAIN_LIMIT = 10

ACTION_PUSH = "push"
ACTION_POP = "pop"
ACTION_QUEUE = "queue"
ACTION_RESPONDER = "responder"

_ATOM_RE = re.compile(r"^(\w+)\((.*)\)$")
_TEMPLATE_VAR_RE = re.compile(r"\{(slot|var):([^}]+)\}")


@dataclass(frozen=True)
class ConditionAtom:
    kind: str
    arg: str = ""


@dataclass(frozen=True)
class ConditionExpr:
    atoms: tuple[ConditionAtom, ...]

    def __post_init__(self) -> None:
        if not self.atoms:
            raise FsmDefinitionError("condition must have at least one atom")


def parse_condition(text: str) -> ConditionExpr:
    atoms = []
    for chunk in re.split(r"\s+and\s+", text.strip()):
        chunk = chunk.strip()
        if chunk == "always":
            atoms.append(ConditionAtom(kind="always"))
            continue
        m = _ATOM_RE.match(chunk)
        if not m:
            raise UnknownAtomError(f"cannot parse condition atom {chunk!r}")
        kind, arg = m.group(1), m.group(2).strip()
        if kind not in ("intent", "concept", "sentiment_lt", "sentiment_gt", "topic", "slot_present"):
            raise UnknownAtomError(f"unknown condition atom {kind!r}")
        atoms.append(ConditionAtom(kind=kind, arg=arg))
    return ConditionExpr(atoms=tuple(atoms))


def _glob_match(glob: str, path: str) -> bool:
    pattern = "^" + re.escape(glob).replace(r"\*", ".*") + "$"
    return re.match(pattern, path) is not None


def _atom_matches(atom: ConditionAtom, nlu: NluResult, vars: dict[str, str]) -> bool:
    if atom.kind == "always":
        return True
    if atom.kind == "intent":
        return atom.arg in nlu.intents
    if atom.kind == "concept":
        return any(_glob_match(atom.arg, span.path) for span in nlu.concepts)
    if atom.kind == "sentiment_lt":
        return nlu.sentiment < float(atom.arg)
    if atom.kind == "sentiment_gt":
        return nlu.sentiment > float(atom.arg)
    if atom.kind == "topic":
        return nlu.topic == atom.arg
    if atom.kind == "slot_present":
        return any(span.path == atom.arg and span.slot_text for span in nlu.concepts)
    raise UnknownAtomError(f"unknown condition atom {atom.kind!r}")


@dataclass(frozen=True)
class Arc:
    from_state: str
    to_state: str
    condition: ConditionExpr
    score: float
    responses: tuple[str, ...] = ()
    null_arc: bool = False
    actions: tuple[tuple[str, str], ...] = ()  # (action kind, argument)
    chance: float | None = None

    def stack_actions(self) -> tuple[tuple[str, str], ...]:
        return tuple(a for a in self.actions if a[0] in (ACTION_PUSH, ACTION_POP, ACTION_QUEUE))

    def responder_id(self) -> str | None:
        for kind, arg in self.actions:
            if kind == ACTION_RESPONDER:
                return arg
        return None


@dataclass(frozen=True)
class FsmDef:
    id: str
    kind: str
    states: tuple[str, ...]
    initial: str
    arcs: tuple[Arc, ...]
    activation: tuple[tuple[ConditionExpr, float], ...] = ()
    overrides: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        known = set(self.states)
        if self.initial not in known:
            raise FsmDefinitionError(f"fsm {self.id}: initial state {self.initial!r} not declared")
        for arc in self.arcs:
            if arc.from_state not in known or arc.to_state not in known:
                raise FsmDefinitionError(
                    f"fsm {self.id}: arc {arc.from_state}->{arc.to_state} references unknown state"
                )
            if arc.null_arc and arc.condition.atoms != (ConditionAtom(kind="always"),):
                raise FsmDefinitionError(f"fsm {self.id}: null arcs must use the `always` condition")
            if arc.null_arc and arc.chance is not None:
                raise FsmDefinitionError(f"fsm {self.id}: null arcs cannot be chance-gated")
        if self.kind == KIND_INTERRUPTION:
            non_start = [s for s in self.states if s != START_STATE]
            if len(non_start) != 1:
                raise FsmDefinitionError(f"fsm {self.id}: interruptions need exactly one non-START state")
            for arc in self.arcs:
                if arc.stack_actions():
                    raise FsmDefinitionError(f"fsm {self.id}: interruption arcs cannot alter the stack")

    def arcs_from(self, state: str) -> list[Arc]:
        return [a for a in self.arcs if a.from_state == state]


@dataclass
class FsmInstance:
    def_id: str
    state: str
    vars: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class StepResult:
    text: str
    new_state: str
    actions: tuple[tuple[str, str], ...]
    arcs_taken: int
    fragments: tuple[str, ...]
    var_updates: dict[str, str]

    @property
    def last_fragment(self) -> str:
        for fragment in reversed(self.fragments):
            if fragment:
                return fragment
        return ""


def evaluate_arc(
    arc: Arc,
    nlu: NluResult,
    history: object = None,
    vars: dict[str, str] | None = None,
) -> float | None:
    """Arc fitness: None on any failed atom, else base score plus a
    0.1 bonus per matched concept atom (specificity reward)."""
    vars = vars or {}
    concept_atoms = 0
    for atom in arc.condition.atoms:
        if not _atom_matches(atom, nlu, vars):
            return None
        if atom.kind == "concept":
            concept_atoms += 1
    return arc.score + CONCEPT_BONUS * concept_atoms


def render_template(template: str, nlu: NluResult, vars: dict[str, str]) -> str:
    """Interpolate {slot:<path>} and {var:<name>} placeholders."""

    def repl(m: re.Match) -> str:
        kind, name = m.group(1), m.group(2)
        if kind == "slot":
            for span in nlu.concepts:
                if span.path == name and span.slot_str:
                    return span.slot_str
            return ""
        return vars.get(name, "")

    rendered = _TEMPLATE_VAR_RE.sub(repl, template)
    return " ".join(rendered.split())


def _arc_fragment(
    arc: Arc,
    nlu: NluResult,
    vars: dict[str, str],
    rng: random.Random,
    responder_call,
) -> tuple[str, dict[str, str]] | None:
    """Render one arc's contribution; None means the arc cannot produce."""
    updates: dict[str, str] = {}
    parts: list[str] = []
    if arc.responses:
        template = arc.responses[0] if len(arc.responses) == 1 else rng.choice(arc.responses)
        parts.append(render_template(template, nlu, vars))
    responder = arc.responder_id()
    if responder is not None:
        if responder_call is None:
            return None
        result = responder_call(responder, nlu, dict(vars))
        if result is None:
            if not arc.responses:
                return None
        else:
            text, resp_updates = result
            parts.append(text)
            updates.update(resp_updates)
    return " ".join(p for p in parts if p), updates


def step_fsm(
    instance: FsmInstance,
    fsm_def: FsmDef,
    nlu: NluResult,
    history: object = None,
    rng: random.Random | None = None,
    responder_call=None,
) -> StepResult | None:
    """One conversational step: best matching arc, then drained null arcs.

    Returns None when no outgoing arc matches (the manager then looks
    elsewhere). Chance-gated arcs draw from ``rng`` only after their
    condition matched, keeping replay deterministic.
    """
    rng = rng or random.Random(0)
    candidates: list[tuple[float, int, Arc]] = []
    for idx, arc in enumerate(fsm_def.arcs_from(instance.state)):
        if arc.null_arc:
            continue
        score = evaluate_arc(arc, nlu, history, instance.vars)
        if score is None:
            continue
        if arc.chance is not None and rng.random() >= arc.chance:
            continue
        candidates.append((score, idx, arc))
    if not candidates:
        return None
    candidates.sort(key=lambda item: (-item[0], item[1]))

    vars_view = dict(instance.vars)
    for _, _, entry in candidates:
        rendered = _arc_fragment(entry, nlu, vars_view, rng, responder_call)
        if rendered is None:
            continue
        fragment, updates = rendered
        fragments = [fragment]
        var_updates = dict(updates)
        vars_view.update(updates)
        actions = list(entry.stack_actions())
        state = entry.to_state
        arcs_taken = 1
        while True:
            nulls = [a for a in fsm_def.arcs_from(state) if a.null_arc]
            if not nulls:
                break
            nulls.sort(key=lambda a: -a.score)
            null_arc = nulls[0]
            arcs_taken += 1
            if arcs_taken > NULL_CHAIN_LIMIT:
                raise NullArcLoopError(f"fsm {fsm_def.id}: null-arc chain exceeded {NULL_CHAIN_LIMIT}")
            rendered = _arc_fragment(null_arc, nlu, vars_view, rng, responder_call)
            if rendered is not None:
                fragment, updates = rendered
                fragments.append(fragment)
                var_updates.update(updates)
                vars_view.update(updates)
            actions.extend(null_arc.stack_actions())
            state = null_arc.to_state
        text = " ".join(f for f in fragments if f)
        return StepResult(
            text=text,
            new_state=state,
            actions=tuple(actions),
            arcs_taken=arcs_taken,
            fragments=tuple(fragments),
            var_updates=var_updates,
        )
    return None


def activation_score(fsm_def: FsmDef, nlu: NluResult) -> float | None:
    """Best matching activation rule score, or None when none match."""
    best: float | None = None
    for condition, score in fsm_def.activation:
        matched = True
        for atom in condition.atoms:
            if not _atom_matches(atom, nlu, {}):
                matched = False
                break
        if matched and (best is None or score > best):
            best = score
    return best


_ARC_RE = re.compile(
    r"^arc\s+(\S+)\s*->\s*(\S+)\s+when\s+(.+?)\s+score\s+(-?[\d.]+)\s*(.*)$"
)
_ACTIVATE_RE = re.compile(r"^activate\s+when\s+(.+?)\s+score\s+(-?[\d.]+)\s*$")
_QUOTED_RE = re.compile(r'"([^"]*)"')


def _parse_arc_line(line: str, line_no: int) -> Arc:
    m = _ARC_RE.match(line)
    if not m:
        raise FsmDefinitionError(f"line {line_no}: cannot parse arc: {line!r}")
    from_state, to_state, cond_text, score_text, tail = m.groups()
    say_idx = tail.find("say")
    flags_text = tail if say_idx < 0 else tail[:say_idx]
    responses = tuple(_QUOTED_RE.findall(tail[say_idx:])) if say_idx >= 0 else ()

    null_arc = False
    chance: float | None = None
    actions: list[tuple[str, str]] = []
    for flag in flags_text.split():
        if flag == "null":
            null_arc = True
        elif flag == "pop":
            actions.append((ACTION_POP, ""))
        elif flag.startswith("push="):
            actions.append((ACTION_PUSH, flag[len("push=") :]))
        elif flag.startswith("queue="):
            actions.append((ACTION_QUEUE, flag[len("queue=") :]))
        elif flag.startswith("responder="):
            actions.append((ACTION_RESPONDER, flag[len("responder=") :]))
        elif flag.startswith("chance="):
            chance = float(flag[len("chance=") :])
        else:
            raise FsmDefinitionError(f"line {line_no}: unknown arc flag {flag!r}")
    return Arc(
        from_state=from_state,
        to_state=to_state,
        condition=parse_condition(cond_text),
        score=float(score_text),
        responses=responses,
        null_arc=null_arc,
        actions=tuple(actions),
        chance=chance,
    )


def load_fsm_defs(source: str) -> list[FsmDef]:
    """Parse one or more `fsm` blocks from definition-file text."""
    defs: list[FsmDef] = []
    current: dict | None = None

    def flush() -> None:
        nonlocal current
        if current is None:
            return
        states = tuple(current["states"])
        initial = current["initial"] or (states[0] if states else START_STATE)
        defs.append(
            FsmDef(
                id=current["id"],
                kind=current["kind"],
                states=states,
                initial=initial,
                arcs=tuple(current["arcs"]),
                activation=tuple(current["activation"]),
                overrides=current["overrides"],
            )
        )
        current = None

    for line_no, raw in enumerate(source.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("fsm "):
            flush()
            parts = line.split()
            if len(parts) != 3 or not parts[2].startswith("kind="):
                raise FsmDefinitionError(f"line {line_no}: expected: fsm <id> kind=<kind>")
            kind = parts[2][len("kind=") :]
            if kind not in (KIND_BASE, KIND_TOPIC, KIND_INTERRUPTION):
                raise FsmDefinitionError(f"line {line_no}: unknown fsm kind {kind!r}")
            current = {
                "id": parts[1],
                "kind": kind,
                "states": [],
                "initial": None,
                "arcs": [],
                "activation": [],
                "overrides": {},
            }
        elif current is None:
            raise FsmDefinitionError(f"line {line_no}: directive outside fsm block")
        elif line.startswith("state "):
            parts = line.split()
            current["states"].append(parts[1])
            if len(parts) == 3 and parts[2] == "initial":
                current["initial"] = parts[1]
        elif line.startswith("activate "):
            m = _ACTIVATE_RE.match(line)
            if not m:
                raise FsmDefinitionError(f"line {line_no}: cannot parse activation: {line!r}")
            current["activation"].append((parse_condition(m.group(1)), float(m.group(2))))
        elif line.startswith("arc "):
            current["arcs"].append(_parse_arc_line(line, line_no))
        elif line.startswith("override "):
            m = re.match(r"^override\s+(\S+)\s*->\s*(.+)$", line)
            if not m:
                raise FsmDefinitionError(f"line {line_no}: cannot parse override: {line!r}")
            current["overrides"][m.group(1)] = tuple(m.group(2).split())
        else:
            raise FsmDefinitionError(f"line {line_no}: unrecognized directive: {line!r}")
    flush()
    return defs


def load_fsm_file(path: str) -> list[FsmDef]:
    with open(path, encoding="utf-8") as fh:
        return load_fsm_defs(fh.read())
