"""FSM stack bookkeeping and the four-tier response decision cascade.

Order of preference for a turn: the active (top-of-stack) machine, then
single-turn interruption machines, then activation of a new topic
machine, then queued machines; failing all four the manager yields and
the selecting strategy consults the standalone responders.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import (
    DuplicateFsmError,
    EmptyStackError,
    PopBaseError,
    UnknownFsmError,
)
from .fsm import (
    ACTION_POP,
    ACTION_PUSH,
    ACTION_QUEUE,
    KIND_INTERRUPTION,
    KIND_TOPIC,
    FsmDef,
    FsmInstance,
    StepResult,
    activation_score,
    step_fsm,
)
from .nlu import NluResult

DEFAULT_THETA_INT = 1.0
DEFAULT_THETA_ACT = 1.5
DEFAULT_STEER_BIAS = 0.4

RESUME_PREFIX = "Anyway — "

SOURCE_ACTIVE = "active_fsm"
SOURCE_INTERRUPTION = "interruption"
SOURCE_ACTIVATED = "activated_fsm"
SOURCE_NONE = "none"

PENDING_PROMPT_VAR = "pending_prompt"


@dataclass
class FsmRegistry:
    defs: dict[str, FsmDef]
    base_id: str

    @classmethod
    def from_defs(cls, defs: list[FsmDef]) -> "FsmRegistry":
        by_id: dict[str, FsmDef] = {}
        base_id: str | None = None
        for fsm_def in defs:
            if fsm_def.id in by_id:
                raise DuplicateFsmError(fsm_def.id)
            by_id[fsm_def.id] = fsm_def
            if fsm_def.kind == "base":
                base_id = fsm_def.id
        if base_id is None:
            raise UnknownFsmError("<base>")
        return cls(defs=by_id, base_id=base_id)

    def get(self, fsm_id: str) -> FsmDef:
        if fsm_id not in self.defs:
            raise UnknownFsmError(fsm_id)
        return self.defs[fsm_id]

    def interruptions(self) -> list[FsmDef]:
        return [d for d in self.defs.values() if d.kind == KIND_INTERRUPTION]

    def topics(self) -> list[FsmDef]:
        return [d for d in self.defs.values() if d.kind == KIND_TOPIC]

    def ids(self) -> set[str]:
        return set(self.defs)


@dataclass
class FsmStack:
    entries: list[FsmInstance] = field(default_factory=list)
    shared_vars: dict[str, str] = field(default_factory=dict)  # seeded into every new instance

    def top(self) -> FsmInstance:
        if not self.entries:
            raise EmptyStackError("fsm stack is empty")
        return self.entries[-1]

    def ids(self) -> list[str]:
        return [inst.def_id for inst in self.entries]

    def contains(self, fsm_id: str) -> bool:
        return any(inst.def_id == fsm_id for inst in self.entries)


@dataclass(frozen=True)
class ManagerDecision:
    source: str
    source_id: str | None = None
    step: StepResult | None = None
    resume_suffix: str | None = None


def apply_actions(
    stack: FsmStack,
    actions: tuple[tuple[str, str], ...],
    registry: FsmRegistry,
    queued: list[str] | None = None,
) -> FsmStack:
    """Apply push/pop/queue arc actions to the stack (mutating it)."""
    for kind, arg in actions:
        if kind == ACTION_PUSH:
            fsm_def = registry.get(arg)
            if stack.contains(arg):
                raise DuplicateFsmError(arg)
            stack.entries.append(
                FsmInstance(def_id=arg, state=fsm_def.initial, vars=dict(stack.shared_vars))
            )
        elif kind == ACTION_POP:
            if len(stack.entries) <= 1:
                raise PopBaseError("cannot pop the base FSM")
            stack.entries.pop()
        elif kind == ACTION_QUEUE:
            registry.get(arg)
            if queued is not None:
                queued.append(arg)
    return stack


def override_selecting_map(
    stack: FsmStack,
    base_map: dict[str, tuple[str, ...]],
    registry: FsmRegistry,
) -> dict[str, tuple[str, ...]]:
    """Base intent map with the active machine's overrides spliced in."""
    if not stack.entries:
        return dict(base_map)
    active_def = registry.get(stack.top().def_id)
    if not active_def.overrides:
        return dict(base_map)
    effective = dict(base_map)
    effective.update(active_def.overrides)
    return effective


def _push_and_step(
    stack: FsmStack,
    fsm_def: FsmDef,
    nlu: NluResult,
    history: object,
    rng: random.Random,
    responder_call,
) -> StepResult | None:
    instance = FsmInstance(def_id=fsm_def.id, state=fsm_def.initial, vars=dict(stack.shared_vars))
    stack.entries.append(instance)
    step = step_fsm(instance, fsm_def, nlu, history, rng, responder_call)
    if step is None:
        stack.entries.pop()
        return None
    instance.state = step.new_state
    instance.vars.update(step.var_updates)
    if step.last_fragment:
        instance.vars[PENDING_PROMPT_VAR] = step.last_fragment
    return step


def propose_and_select(
    stack: FsmStack,
    registry: FsmRegistry,
    nlu: NluResult,
    history: object = None,
    rng: random.Random | None = None,
    responder_call=None,
    theta_int: float = DEFAULT_THETA_INT,
    theta_act: float = DEFAULT_THETA_ACT,
    steer_bias: float = DEFAULT_STEER_BIAS,
    queued: list[str] | None = None,
) -> ManagerDecision:
    """Decide which machine (if any) answers this turn.

    Mutates the stepped instance (state and vars) and pushes newly
    activated machines; stack actions carried by the chosen step are the
    caller's to apply via :func:`apply_actions`.
    """
    if not stack.entries:
        raise EmptyStackError("fsm stack is empty")
    rng = rng or random.Random(0)

    # Tier 1: the active machine continues.
    active = stack.top()
    active_def = registry.get(active.def_id)
    step = step_fsm(active, active_def, nlu, history, rng, responder_call)
    if step is not None:
        active.state = step.new_state
        active.vars.update(step.var_updates)
        if step.last_fragment:
            active.vars[PENDING_PROMPT_VAR] = step.last_fragment
        return ManagerDecision(source=SOURCE_ACTIVE, source_id=active.def_id, step=step)

    # Tier 2: single-turn interruptions; the stack is left untouched.
    best_int: tuple[float, FsmDef] | None = None
    for fsm_def in registry.interruptions():
        score = activation_score(fsm_def, nlu)
        if score is None or score < theta_int:
            continue
        if best_int is None or score > best_int[0]:
            best_int = (score, fsm_def)
    if best_int is not None:
        fsm_def = best_int[1]
        throwaway = FsmInstance(
            def_id=fsm_def.id, state=fsm_def.initial, vars=dict(stack.shared_vars)
        )
        step = step_fsm(throwaway, fsm_def, nlu, history, rng, responder_call)
        if step is not None:
            prompt = stack.top().vars.get(PENDING_PROMPT_VAR)
            suffix = f"{RESUME_PREFIX}{prompt}" if prompt else None
            return ManagerDecision(
                source=SOURCE_INTERRUPTION,
                source_id=fsm_def.id,
                step=step,
                resume_suffix=suffix,
            )

    # Tier 3: activate a topic machine not already on the stack.
    best_topic: tuple[float, FsmDef] | None = None
    for fsm_def in registry.topics():
        if stack.contains(fsm_def.id):
            continue
        score = activation_score(fsm_def, nlu)
        if score is None:
            continue
        effective = score * steer_bias
        if effective < theta_act:
            continue
        if best_topic is None or effective > best_topic[0]:
            best_topic = (effective, fsm_def)
    if best_topic is not None:
        step = _push_and_step(stack, best_topic[1], nlu, history, rng, responder_call)
        if step is not None:
            return ManagerDecision(source=SOURCE_ACTIVATED, source_id=best_topic[1].id, step=step)

    # Tier 4: a queued machine, only once all live tiers failed.
    if queued:
        fsm_id = queued.pop(0)
        if not stack.contains(fsm_id):
            step = _push_and_step(stack, registry.get(fsm_id), nlu, history, rng, responder_call)
            if step is not None:
                return ManagerDecision(source=SOURCE_ACTIVATED, source_id=fsm_id, step=step)

    return ManagerDecision(source=SOURCE_NONE)
