"""Offline conversation-quality metrics over persisted transcripts.

Works on the JSON-lines transcript format the session module persists,
optionally joined with a sidecar ratings file. Ratings are rescaled by an
additive shift so the cohort mean sits at 3 (preserving spreads and
orderings), then summarized against FSM-turn share, utterance sentiment,
mood, assent/dissent, and ending style.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from .errors import DegenerateXError, EmptyCohortError

TARGET_MEAN = 3.0
DEFAULT_MIN_LEN = 3
DEFAULT_MAX_LEN = 15
DEFAULT_BUCKET_WIDTH = 0.25


@dataclass
class RatedConversation:
    session_id: str
    turns: list[dict]
    rating: float | None = None
    end_kind: str = "abandoned"
    mood: str | None = None

    def __post_init__(self) -> None:
        if self.rating is not None and not 1.0 <= self.rating <= 5.0:
            raise ValueError(f"rating {self.rating} outside [1, 5]")


def fsm_turn_fraction(conv: RatedConversation) -> float:
    """Share of turns whose response came from an FSM."""
    if not conv.turns:
        raise ValueError("conversation has no turns")
    fsm = sum(1 for t in conv.turns if t.get("fsm_turn"))
    return fsm / len(conv.turns)


def scale_offset(ratings: Iterable[float], target_mean: float = TARGET_MEAN) -> float:
    values = list(ratings)
    if not values:
        return 0.0
    return target_mean - sum(values) / len(values)


def bucket_rating_by_fraction(
    convs: list[RatedConversation],
    bucket_width: float = DEFAULT_BUCKET_WIDTH,
    min_len: int = DEFAULT_MIN_LEN,
    max_len: int = DEFAULT_MAX_LEN,
) -> list[tuple[float, float, int]]:
    """(bucket start, mean scaled rating, n) over length-filtered rated
    conversations; empty buckets are omitted."""
    if not 0.0 < bucket_width <= 1.0:
        raise ValueError(f"bucket_width must be in (0, 1], got {bucket_width}")
    usable = [
        c
        for c in convs
        if c.rating is not None and min_len <= len(c.turns) <= max_len
    ]
    if not usable:
        return []
    offset = scale_offset(c.rating for c in usable)
    n_buckets = math.ceil(1.0 / bucket_width)
    sums: dict[int, list[float]] = {}
    for conv in usable:
        fraction = fsm_turn_fraction(conv)
        idx = min(int(fraction / bucket_width), n_buckets - 1)
        sums.setdefault(idx, []).append(conv.rating + offset)
    out = []
    for idx in sorted(sums):
        values = sums[idx]
        out.append((idx * bucket_width, sum(values) / len(values), len(values)))
    return out


def linear_regress(points: list[tuple[float, float]]) -> tuple[float, float]:
    """Ordinary least squares slope and intercept (closed form)."""
    if len(points) < 2:
        raise DegenerateXError("need at least 2 points")
    n = len(points)
    mean_x = sum(p[0] for p in points) / n
    mean_y = sum(p[1] for p in points) / n
    sxx = sum((p[0] - mean_x) ** 2 for p in points)
    if sxx == 0.0:
        raise DegenerateXError("x values are constant")
    sxy = sum((p[0] - mean_x) * (p[1] - mean_y) for p in points)
    slope = sxy / sxx
    return slope, mean_y - slope * mean_x


def sentiment_rating_points(convs: list[RatedConversation]) -> list[tuple[float, float]]:
    """One (utterance sentiment, scaled conversation rating) point per turn."""
    rated = [c for c in convs if c.rating is not None and c.turns]
    offset = scale_offset(c.rating for c in rated)
    points = []
    for conv in rated:
        for turn in conv.turns:
            nlu = turn.get("nlu") or {}
            points.append((nlu.get("sentiment", 0.0), conv.rating + offset))
    return points


def cohort_compare(
    convs: list[RatedConversation],
    predicate_a: Callable[[RatedConversation], bool],
    predicate_b: Callable[[RatedConversation], bool],
) -> tuple[float, float, float]:
    """(mean_a, mean_b, relative difference) over rated conversations."""
    rated = [c for c in convs if c.rating is not None]
    a = [c.rating for c in rated if predicate_a(c)]
    b = [c.rating for c in rated if predicate_b(c)]
    if not a or not b:
        raise EmptyCohortError("one or both cohorts are empty")
    mean_a = sum(a) / len(a)
    mean_b = sum(b) / len(b)
    return mean_a, mean_b, (mean_a - mean_b) / mean_b


def rmse(pred: list[float], actual: list[float]) -> float:
    if len(pred) != len(actual) or not pred:
        raise ValueError("sequences must have equal non-zero length")
    return math.sqrt(sum((p - a) ** 2 for p, a in zip(pred, actual)) / len(pred))


def has_concept(conv: RatedConversation, concept: str) -> bool:
    for turn in conv.turns:
        nlu = turn.get("nlu") or {}
        for span in nlu.get("concepts", ()):
            if span.get("path", "").split(".", 1)[0] == concept:
                return True
    return False


# -- transcript loading ----------------------------------------------------


def load_transcript_lines(lines: Iterable[str]) -> dict[str, RatedConversation]:
    convs: dict[str, RatedConversation] = {}
    for line in lines:
        line = line.strip()
        if not line:
            continue
        record = json.loads(line)
        sid = record.get("session_id")
        if sid is None:
            continue
        conv = convs.setdefault(sid, RatedConversation(session_id=sid, turns=[]))
        if record.get("record") == "session":
            conv.end_kind = record.get("end_kind", "abandoned")
            conv.mood = record.get("mood")
        elif record.get("record") == "turn":
            conv.turns.append(record)
    for conv in convs.values():
        conv.turns.sort(key=lambda t: t.get("index", 0))
    return convs


def load_conversations(directory: str | Path, ratings_file: str = "ratings.jsonl") -> list[RatedConversation]:
    """All transcripts under a directory joined with the sidecar ratings."""
    directory = Path(directory)
    convs: dict[str, RatedConversation] = {}
    for path in sorted(directory.glob("*.jsonl")):
        if path.name == ratings_file:
            continue
        with open(path, encoding="utf-8") as fh:
            for sid, conv in load_transcript_lines(fh).items():
                if sid in convs:
                    convs[sid].turns.extend(conv.turns)
                else:
                    convs[sid] = conv
    ratings_path = directory / ratings_file
    if ratings_path.exists():
        with open(ratings_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                conv = convs.get(record.get("session_id"))
                if conv is not None and record.get("rating") is not None:
                    conv.rating = float(record["rating"])
    return list(convs.values())


# -- report assembly -------------------------------------------------------


@dataclass
class MetricsReport:
    conversations: int = 0
    rated: int = 0
    fsm_fraction_buckets: list[tuple[float, float, int]] = field(default_factory=list)
    sentiment_regression: dict | None = None
    mood_cohorts: dict | None = None
    assent_dissent: dict | None = None
    goodbye_cohorts: dict | None = None

    def to_dict(self) -> dict:
        return {
            "conversations": self.conversations,
            "rated": self.rated,
            "fsm_fraction_buckets": [
                {"bucket": b, "mean_scaled_rating": m, "n": n}
                for b, m, n in self.fsm_fraction_buckets
            ],
            "sentiment_regression": self.sentiment_regression,
            "mood_cohorts": self.mood_cohorts,
            "assent_dissent": self.assent_dissent,
            "goodbye_cohorts": self.goodbye_cohorts,
        }


def _safe_cohort(convs, pred_a, pred_b, label_a: str, label_b: str) -> dict | None:
    rated = [c for c in convs if c.rating is not None]
    n_a = sum(1 for c in rated if pred_a(c))
    n_b = sum(1 for c in rated if pred_b(c))
    try:
        mean_a, mean_b, rel = cohort_compare(convs, pred_a, pred_b)
    except EmptyCohortError:
        return None
    return {
        label_a: {"mean": mean_a, "n": n_a},
        label_b: {"mean": mean_b, "n": n_b},
        "relative_difference": rel,
        "absolute_difference": mean_a - mean_b,
    }


def build_report(convs: list[RatedConversation], bucket_width: float = DEFAULT_BUCKET_WIDTH) -> MetricsReport:
    report = MetricsReport(
        conversations=len(convs),
        rated=sum(1 for c in convs if c.rating is not None),
    )
    report.fsm_fraction_buckets = bucket_rating_by_fraction(convs, bucket_width)
    points = sentiment_rating_points(convs)
    try:
        slope, intercept = linear_regress(points)
        report.sentiment_regression = {"slope": slope, "intercept": intercept, "n": len(points)}
    except DegenerateXError:
        report.sentiment_regression = None
    report.mood_cohorts = _safe_cohort(
        convs,
        lambda c: c.mood == "mood_great",
        lambda c: c.mood == "mood_unhappy",
        "mood_great",
        "mood_unhappy",
    )
    report.assent_dissent = _safe_cohort(
        convs,
        lambda c: has_concept(c, "Assent"),
        lambda c: has_concept(c, "Dissent"),
        "assent",
        "dissent",
    )
    report.goodbye_cohorts = _safe_cohort(
        convs,
        lambda c: c.end_kind == "goodbye_script",
        lambda c: c.end_kind == "stop_intent",
        "goodbye_script",
        "stop_intent",
    )
    return report
