"""Exception types shared across the engine."""

from __future__ import annotations


class StackchatError(Exception):
    """Base class for all engine errors."""


class GrammarSyntaxError(StackchatError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DuplicateConceptError(StackchatError):
    def __init__(self, name: str):
        super().__init__(f"duplicate concept: {name}")
        self.name = name


class DanglingGroupError(StackchatError):
    def __init__(self, name: str):
        super().__init__(f"group not declared: {name}")
        self.name = name


class EmptyPhraseError(StackchatError):
    def __init__(self, line_no: int):
        super().__init__(f"line {line_no}: phrase has no tokens")
        self.line_no = line_no


class EmptyCorpusError(StackchatError):
    pass


class OversizeInputError(StackchatError):
    pass


class OutOfRangeError(StackchatError):
    pass


class UnknownAtomError(StackchatError):
    pass


class NullArcLoopError(StackchatError):
    pass


class FsmDefinitionError(StackchatError):
    pass


class EmptyStackError(StackchatError):
    pass


class UnknownFsmError(StackchatError):
    def __init__(self, fsm_id: str):
        super().__init__(f"unknown fsm: {fsm_id}")
        self.fsm_id = fsm_id


class PopBaseError(StackchatError):
    pass


class DuplicateFsmError(StackchatError):
    def __init__(self, fsm_id: str):
        super().__init__(f"fsm already on stack: {fsm_id}")
        self.fsm_id = fsm_id


class SessionEndedError(StackchatError):
    pass


class ConfigError(StackchatError):
    pass


class TranscriptIoError(StackchatError):
    pass


class DegenerateXError(StackchatError):
    pass


class EmptyCohortError(StackchatError):
    pass


class SourceUnavailableError(StackchatError):
    pass
