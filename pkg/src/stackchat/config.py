"""Engine configuration: file paths, thresholds, and scripted texts.

All tunables the dialog pipeline consults live here so deployments can
rebalance behavior (steer bias, retrieval cutoffs, filter limits)
without touching code. Relative paths resolve against the config file's
directory; the packaged default config points at the shipped fixtures.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError

DATA_DIR = Path(__file__).parent / "data"

GOODBYE_QUESTION = "It sounds like you don't want to talk anymore. Would you like to stop?"
GOODBYE_FAREWELL = "Alright. It was lovely talking with you. Goodbye!"
FALLBACK_TEXT = "Hmm, tell me more about that."

_PATH_FIELDS = (
    "grammar_path",
    "sentiment_lexicon_path",
    "negators_path",
    "intensifiers_path",
    "stopwords_path",
    "topics_path",
    "fsm_topics_path",
    "yes_path",
    "no_path",
    "stop_path",
    "blocklist_path",
    "watchlist_path",
    "fsm_dir",
    "templates_path",
    "qa_pairs_path",
    "qa_sentences_path",
    "facts_path",
    "jokes_path",
    "headlines_path",
    "selecting_map_path",
)


@dataclass
class EngineConfig:
    grammar_path: str = str(DATA_DIR / "conversational.grammar")
    sentiment_lexicon_path: str = str(DATA_DIR / "sentiment_lexicon.tsv")
    negators_path: str = str(DATA_DIR / "negators.txt")
    intensifiers_path: str = str(DATA_DIR / "intensifiers.tsv")
    stopwords_path: str = str(DATA_DIR / "stopwords.txt")
    topics_path: str = str(DATA_DIR / "topics.lex")
    fsm_topics_path: str = str(DATA_DIR / "fsm_topics.lex")
    yes_path: str = str(DATA_DIR / "yes.lex")
    no_path: str = str(DATA_DIR / "no.lex")
    stop_path: str = str(DATA_DIR / "stop.lex")
    blocklist_path: str = str(DATA_DIR / "blocklist.txt")
    watchlist_path: str = str(DATA_DIR / "watchlist.txt")
    fsm_dir: str = str(DATA_DIR / "fsms")
    templates_path: str = str(DATA_DIR / "templates.jsonl")
    qa_pairs_path: str = str(DATA_DIR / "qa_pairs.jsonl")
    qa_sentences_path: str = str(DATA_DIR / "qa_sentences.jsonl")
    facts_path: str = str(DATA_DIR / "facts.jsonl")
    jokes_path: str = str(DATA_DIR / "jokes.jsonl")
    headlines_path: str = str(DATA_DIR / "headlines.jsonl")
    selecting_map_path: str = str(DATA_DIR / "selecting_map.json")

    bot_name: str = "Piper"
    embedder_dim: int = 256

    template_threshold: float = 0.85
    qa_threshold: float = 0.82
    sentence_threshold: float = 0.98
    sentence_mode: bool = False

    theta_int: float = 1.0
    theta_act: float = 1.5
    steer_bias: float = 0.4

    max_words: int = 50
    min_relevance: float = 0.05
    min_sentiment: float = -0.6
    priority_classes: dict[str, int] | None = None  # None = built-in ordering

    fallback_text: str = FALLBACK_TEXT
    goodbye_question: str = GOODBYE_QUESTION
    goodbye_farewell: str = GOODBYE_FAREWELL
    farewell_on_stop: str = ""

    default_seed: int | None = None
    disabled_responders: tuple[str, ...] = ("evi", "neural_gen")

    def validate(self) -> None:
        if not 0.0 <= self.steer_bias <= 1.0:
            raise ConfigError(f"steer_bias must be in [0, 1], got {self.steer_bias}")
        for name in _PATH_FIELDS:
            path = getattr(self, name)
            if not Path(path).exists():
                raise ConfigError(f"{name} does not exist: {path}")


def default_config() -> EngineConfig:
    return EngineConfig()


def load_config(path: str | Path) -> EngineConfig:
    """Read a JSON config; relative paths resolve against the file's dir."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    known = {f.name for f in fields(EngineConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "disabled_responders" in raw:
        raw["disabled_responders"] = tuple(raw["disabled_responders"])
    config = EngineConfig(**raw)
    base = path.parent
    for name in _PATH_FIELDS:
        value = Path(getattr(config, name))
        if not value.is_absolute():
            setattr(config, name, str(base / value))
    config.validate()
    return config
