"""Semantic concept grammar: compilation and greedy concept parsing.

A grammar is a flat inventory of concepts, each holding literal token
phrases. Phrases may target a sub-concept, and sub-concepts whose name
ends in ``_slot`` or ``_focus`` capture the residual words that follow a
match (dynamic slots). Parsing is deterministic: greedy longest-match,
left to right, declaration order breaking ties.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .errors import (
    DanglingGroupError,
    DuplicateConceptError,
    EmptyCorpusError,
    EmptyPhraseError,
    GrammarSyntaxError,
)
from .textnorm import normalize

CAPTURE_NONE = "none"
CAPTURE_SLOT = "slot"
CAPTURE_FOCUS = "focus"


@dataclass(frozen=True)
class PhrasePattern:
    tokens: tuple[str, ...]
    target: str | None = None  # sub-concept name within the owning concept
    capture: str = CAPTURE_NONE


@dataclass(frozen=True)
class ConceptDef:
    name: str
    group: str
    phrases: tuple[PhrasePattern, ...] = ()
    subconcepts: tuple[ConceptDef, ...] = ()


@dataclass(frozen=True)
class ConceptSpan:
    path: str
    start: int
    end: int
    slot_text: tuple[str, ...] | None = None

    @property
    def concept(self) -> str:
        return self.path.split(".", 1)[0]

    @property
    def slot_str(self) -> str | None:
        return " ".join(self.slot_text) if self.slot_text else None


@dataclass(frozen=True)
class _CompiledPattern:
    tokens: tuple[str, ...]
    path: str
    concept: str
    capture: str
    order: int


@dataclass
class Grammar:
    concepts: tuple[ConceptDef, ...]
    groups: frozenset[str]
    _index: dict[str, list[_CompiledPattern]] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        order = 0
        for concept in self.concepts:
            for pattern in concept.phrases:
                path = concept.name
                if pattern.target:
                    path = f"{concept.name}.{pattern.target}"
                compiled = _CompiledPattern(
                    tokens=pattern.tokens,
                    path=path,
                    concept=concept.name,
                    capture=pattern.capture,
                    order=order,
                )
                self._index.setdefault(pattern.tokens[0], []).append(compiled)
                order += 1
        self._group_of = {c.name: c.group for c in self.concepts}

    def group_of(self, concept_name: str) -> str | None:
        return self._group_of.get(concept_name)

    def concept_count(self) -> int:
        return len(self.concepts)

    def subconcept_count(self) -> int:
        return sum(len(c.subconcepts) for c in self.concepts)

    def match_at(self, tokens: list[str], pos: int) -> _CompiledPattern | None:
        """Longest phrase matching at ``pos``; declaration order breaks ties."""
        best: _CompiledPattern | None = None
        for cand in self._index.get(tokens[pos], ()):
            n = len(cand.tokens)
            if pos + n > len(tokens):
                continue
            if tuple(tokens[pos : pos + n]) != cand.tokens:
                continue
            if best is None or n > len(best.tokens) or (n == len(best.tokens) and cand.order < best.order):
                best = cand
        return best


def parse_concepts(tokens: list[str], grammar: Grammar) -> list[ConceptSpan]:
    """Parse normalized tokens into ordered, disjoint concept spans.

    A capture match collects every following word, up to the next phrase
    match or the end of the utterance, as slot text. Unmatched words that
    no open capture claims are residual and simply skipped.
    """
    spans: list[ConceptSpan] = []
    open_capture: list[str] | None = None
    open_capture_at: int | None = None

    def close_capture() -> None:
        nonlocal open_capture, open_capture_at
        if open_capture_at is not None and open_capture:
            base = spans[open_capture_at]
            spans[open_capture_at] = ConceptSpan(
                path=base.path, start=base.start, end=base.end, slot_text=tuple(open_capture)
            )
        open_capture = None
        open_capture_at = None

    i = 0
    while i < len(tokens):
        match = grammar.match_at(tokens, i)
        if match is not None:
            close_capture()
            spans.append(ConceptSpan(path=match.path, start=i, end=i + len(match.tokens)))
            if match.capture != CAPTURE_NONE:
                open_capture = []
                open_capture_at = len(spans) - 1
            i += len(match.tokens)
        else:
            if open_capture is not None:
                open_capture.append(tokens[i])
            i += 1
    close_capture()
    return spans


@dataclass(frozen=True)
class CoverageReport:
    utterances: int
    parsed: int
    fraction_parsed: float
    mean_concepts: float
    residual_histogram: tuple[tuple[str, int], ...]

    def to_dict(self) -> dict:
        return {
            "utterances": self.utterances,
            "parsed": self.parsed,
            "fraction_parsed": self.fraction_parsed,
            "mean_concepts": self.mean_concepts,
            "residual_histogram": [list(item) for item in self.residual_histogram],
        }


def corpus_coverage(corpus: list[list[str]], grammar: Grammar) -> CoverageReport:
    """Fraction of utterances with at least one span, plus residual stats."""
    if not corpus:
        raise EmptyCorpusError("corpus is empty")
    parsed = 0
    concept_total = 0
    residual: Counter[str] = Counter()
    for tokens in corpus:
        spans = parse_concepts(tokens, grammar)
        if spans:
            parsed += 1
            concept_total += len(spans)
        covered = set()
        captured = set()
        for span in spans:
            covered.update(range(span.start, span.end))
            if span.slot_text:
                captured.update(span.slot_text)
        for idx, tok in enumerate(tokens):
            if idx not in covered and tok not in captured:
                residual[tok] += 1
    mean = concept_total / parsed if parsed else 0.0
    hist = tuple(sorted(residual.items(), key=lambda kv: (-kv[1], kv[0])))
    return CoverageReport(
        utterances=len(corpus),
        parsed=parsed,
        fraction_parsed=parsed / len(corpus),
        mean_concepts=mean,
        residual_histogram=hist,
    )


def load_grammar(source: str) -> Grammar:
    """Compile grammar-file text into a validated :class:`Grammar`.

    Format (line oriented, ``#`` comments):
      ``group <Name>``
      ``concept <Name> group=<Group>``
      ``  sub <name> [capture=slot|focus]``
      ``  phrase "<tok tok ...>" [-> <sub>]``
    """
    groups: list[str] = []
    concepts: list[ConceptDef] = []
    seen_names: set[str] = set()

    current_name: str | None = None
    current_group: str | None = None
    current_subs: dict[str, str] = {}  # sub name -> capture kind
    current_phrases: list[PhrasePattern] = []
    concept_lines: dict[str, int] = {}

    def flush_concept() -> None:
        nonlocal current_name, current_group, current_subs, current_phrases
        if current_name is None:
            return
        subs = tuple(
            ConceptDef(
                name=sub,
                group=current_group or "",
                phrases=tuple(p for p in current_phrases if p.target == sub),
            )
            for sub in current_subs
        )
        concepts.append(
            ConceptDef(
                name=current_name,
                group=current_group or "",
                phrases=tuple(current_phrases),
                subconcepts=subs,
            )
        )
        current_name = None
        current_group = None
        current_subs = {}
        current_phrases = []

    for line_no, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        if head == "group":
            if len(parts) != 2:
                raise GrammarSyntaxError(line_no, "expected: group <Name>")
            groups.append(parts[1])
        elif head == "concept":
            flush_concept()
            if len(parts) != 3 or not parts[2].startswith("group="):
                raise GrammarSyntaxError(line_no, "expected: concept <Name> group=<Group>")
            name = parts[1]
            if name in seen_names:
                raise DuplicateConceptError(name)
            seen_names.add(name)
            current_name = name
            current_group = parts[2][len("group=") :]
            concept_lines[name] = line_no
        elif head == "sub":
            if current_name is None:
                raise GrammarSyntaxError(line_no, "sub outside concept block")
            if len(parts) not in (2, 3):
                raise GrammarSyntaxError(line_no, "expected: sub <name> [capture=slot|focus]")
            sub = parts[1]
            if sub in current_subs:
                raise DuplicateConceptError(f"{current_name}.{sub}")
            capture = CAPTURE_NONE
            if len(parts) == 3:
                if not parts[2].startswith("capture="):
                    raise GrammarSyntaxError(line_no, f"unrecognized attribute {parts[2]!r}")
                capture = parts[2][len("capture=") :]
                if capture not in (CAPTURE_SLOT, CAPTURE_FOCUS):
                    raise GrammarSyntaxError(line_no, f"capture must be slot or focus, got {capture!r}")
                suffix = f"_{capture}"
                if not sub.endswith(suffix):
                    raise GrammarSyntaxError(line_no, f"capture={capture} requires a sub name ending in {suffix}")
            current_subs[sub] = capture
        elif head == "phrase":
            if current_name is None:
                raise GrammarSyntaxError(line_no, "phrase outside concept block")
            if line.count('"') != 2:
                raise GrammarSyntaxError(line_no, 'expected: phrase "<tokens>" [-> <sub>]')
            text = line.split('"')[1]
            rest = line.split('"', 2)[2].strip()
            target: str | None = None
            if rest:
                if not rest.startswith("->"):
                    raise GrammarSyntaxError(line_no, f"unrecognized trailer {rest!r}")
                target = rest[2:].strip()
                if target not in current_subs:
                    raise GrammarSyntaxError(line_no, f"unknown sub-concept {target!r}")
            tokens = tuple(normalize(text))
            if not tokens:
                raise EmptyPhraseError(line_no)
            capture = current_subs[target] if target else CAPTURE_NONE
            current_phrases.append(PhrasePattern(tokens=tokens, target=target, capture=capture))
        else:
            raise GrammarSyntaxError(line_no, f"unrecognized directive {head!r}")

    flush_concept()

    declared = set(groups)
    for concept in concepts:
        if concept.group not in declared:
            raise DanglingGroupError(concept.group)
        if not concept.phrases and not concept.subconcepts:
            raise GrammarSyntaxError(
                concept_lines[concept.name], f"concept {concept.name} declares no phrases"
            )
    return Grammar(concepts=tuple(concepts), groups=frozenset(declared))


def load_grammar_file(path: str) -> Grammar:
    with open(path, encoding="utf-8") as fh:
        return load_grammar(fh.read())
