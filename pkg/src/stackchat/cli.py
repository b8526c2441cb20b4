"""Command line entry points: parse, coverage, repl, serve, analyze-logs."""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

import click

from .analytics import (
    build_report,
    linear_regress,
    load_conversations,
    sentiment_rating_points,
)
from .config import default_config, load_config
from .errors import DegenerateXError, StackchatError
from .grammar import corpus_coverage, load_grammar_file, parse_concepts
from .textnorm import normalize


def _engine(config_path: str | None):
    from .session import Engine

    config = load_config(config_path) if config_path else default_config()
    return Engine(config)


@click.group()
def main() -> None:
    """Stack-based FSM dialog engine."""


@main.command()
@click.option("--grammar", "grammar_path", required=True, type=click.Path(exists=True))
@click.option("--text", required=True, help="Utterance to parse.")
def parse(grammar_path: str, text: str) -> None:
    """Parse one utterance into concept spans (JSON lines)."""
    grammar = load_grammar_file(grammar_path)
    for span in parse_concepts(normalize(text), grammar):
        click.echo(
            json.dumps(
                {"path": span.path, "start": span.start, "end": span.end, "slot": span.slot_str}
            )
        )


@main.command()
@click.option("--grammar", "grammar_path", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
def coverage(grammar_path: str, corpus_path: str) -> None:
    """Grammar coverage report over a one-utterance-per-line corpus."""
    grammar = load_grammar_file(grammar_path)
    with open(corpus_path, encoding="utf-8") as fh:
        corpus = [normalize(line) for line in fh.read().splitlines()]
    report = corpus_coverage(corpus, grammar)
    click.echo(json.dumps(report.to_dict(), indent=2))


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--seed", type=int, default=None)
def repl(config_path: str | None, seed: int | None) -> None:
    """Interactive terminal chat against a fresh session."""
    engine = _engine(config_path)
    state, opening = engine.start_session(seed=seed)
    click.echo(f"bot> {opening.response_text}")
    while not state.ended:
        try:
            text = click.prompt("you", prompt_suffix="> ")
        except (EOFError, click.Abort):
            click.echo()
            break
        if not text.strip():
            continue
        try:
            turn, _ = engine.process_turn(state, text)
        except StackchatError as exc:
            click.echo(f"error: {exc}", err=True)
            continue
        tag = f" [{turn.source}]" if turn.source else ""
        click.echo(f"bot{tag}> {turn.response_text}")
    click.echo("(session ended)")


@main.command()
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def serve(port: int, host: str, config_path: str | None) -> None:
    """Run the HTTP API."""
    import uvicorn

    from .service import create_app

    app = create_app(_engine(config_path))
    uvicorn.run(app, host=host, port=port)


@main.command("analyze-logs")
@click.option("--dir", "log_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option(
    "--metric",
    type=click.Choice(["all", "fsm_fraction", "sentiment_regression", "mood", "assent_dissent", "goodbye"]),
    default="all",
    show_default=True,
)
@click.option("--bucket-width", type=float, default=0.25, show_default=True)
@click.option(
    "--out-dir",
    type=click.Path(file_okay=False),
    default=None,
    help="Also write metrics.csv plus PNG figures here.",
)
def analyze_logs(log_dir: str, metric: str, bucket_width: float, out_dir: str | None) -> None:
    """Compute conversation-quality metrics from persisted transcripts."""
    convs = load_conversations(log_dir)
    report = build_report(convs, bucket_width=bucket_width)
    payload = report.to_dict()
    if metric != "all":
        key = {
            "fsm_fraction": "fsm_fraction_buckets",
            "sentiment_regression": "sentiment_regression",
            "mood": "mood_cohorts",
            "assent_dissent": "assent_dissent",
            "goodbye": "goodbye_cohorts",
        }[metric]
        payload = {key: payload[key], "conversations": payload["conversations"], "rated": payload["rated"]}
    click.echo(json.dumps(payload, indent=2))

    if out_dir is None:
        return
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "metrics.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "key", "value", "n"])
        for row in report.fsm_fraction_buckets:
            writer.writerow(["fsm_fraction_bucket", f"{row[0]:.2f}", f"{row[1]:.6f}", row[2]])
        if report.sentiment_regression:
            reg = report.sentiment_regression
            writer.writerow(["sentiment_regression", "slope", f"{reg['slope']:.6f}", reg["n"]])
            writer.writerow(["sentiment_regression", "intercept", f"{reg['intercept']:.6f}", reg["n"]])
        for name, block in (
            ("mood_cohorts", report.mood_cohorts),
            ("assent_dissent", report.assent_dissent),
            ("goodbye_cohorts", report.goodbye_cohorts),
        ):
            if not block:
                continue
            for key, value in block.items():
                if isinstance(value, dict):
                    writer.writerow([name, key, f"{value['mean']:.6f}", value["n"]])
                else:
                    writer.writerow([name, key, f"{value:.6f}", ""])

    from . import plots

    points = sentiment_rating_points(convs)
    try:
        slope, intercept = linear_regress(points)
        plots.render_sentiment_regression(points, slope, intercept, out / "sentiment_regression.png")
    except DegenerateXError:
        pass
    if report.fsm_fraction_buckets:
        plots.render_fsm_fraction_buckets(
            report.fsm_fraction_buckets, bucket_width, out / "fsm_fraction.png"
        )
    click.echo(f"wrote {out / 'metrics.csv'}", err=True)


if __name__ == "__main__":
    sys.exit(main())
