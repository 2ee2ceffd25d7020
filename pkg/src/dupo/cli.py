"""Command line entry points.

Exit codes: 0 on success, 2 when an input fails validation, 3 when the
recommender finds no viable candidates.
"""

from __future__ import annotations

import csv
import json
import os
import sys

import click

from .catalog import load_catalog
from .devices import preset
from .errors import (
    CompileError, DupoError, EmptyDataError, ExportError, NoCandidatesError,
    SchemaError, SpecSyntaxError,
)
from .export import export_session
from .geometry import layout_detail
from .ranking import dump_coverage_pgm, score_pair
from .recommender import ConstraintStore, generate_suggestions
from .rules import describe_rules, rules_from_json
from .studio import Session
from .visspec import parse_spec, serialize_spec

VALIDATION_EXIT = 2
NO_CANDIDATES_EXIT = 3

MEASURE_COLUMNS = ("combined", "trend", "identification", "comparison",
                   "text", "overplot", "occupation")


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(VALIDATION_EXIT)


def _load_spec(path: str):
    try:
        return parse_spec(_read(path))
    except (SpecSyntaxError, SchemaError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(VALIDATION_EXIT)


def _device(name: str):
    p = preset(name)
    if p is None:
        click.echo(f"error: unknown device preset '{name}'", err=True)
        sys.exit(VALIDATION_EXIT)
    return p


def _parse_weights(weights_json):
    if not weights_json:
        return None
    try:
        return json.loads(weights_json)
    except json.JSONDecodeError as exc:
        click.echo(f"error: bad --weights: {exc}", err=True)
        sys.exit(VALIDATION_EXIT)


def _echo_json(data) -> None:
    click.echo(json.dumps(data, indent=2, sort_keys=True))


@click.group()
def main():
    """Responsive chart tooling: validate, recommend, score, export, serve."""


@main.command()
@click.argument("spec_path", type=click.Path())
def validate(spec_path):
    """Check a chart spec and report the first problem."""
    _load_spec(spec_path)
    click.echo("ok")


@main.command()
@click.argument("rules_path", type=click.Path())
@click.option("--verbosity", default="withRationales",
              type=click.Choice(["transformationsOnly", "withRationales"]))
def describe(rules_path, verbosity):
    """Print a readable summary of a rule file."""
    try:
        rules = rules_from_json(_read(rules_path))
        described = describe_rules(rules, verbosity)
    except (SchemaError, CompileError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(VALIDATION_EXIT)
    for d in described:
        if d.rationale:
            click.echo(f"{d.summary} (to {d.rationale})")
        else:
            click.echo(d.summary)


@main.command()
@click.option("--source", "source_path", required=True, type=click.Path())
@click.option("--target", "target_path", required=True, type=click.Path())
@click.option("--weights", "weights_json", default=None,
              help="JSON object overriding measure weights")
@click.option("--dump-raster", "raster_dir", default=None, type=click.Path(),
              help="Write source/target coverage grids as PGM images")
def score(source_path, target_path, weights_json, raster_dir):
    """Score how much a target design loses relative to a source."""
    source = _load_spec(source_path)
    target = _load_spec(target_path)
    weights = _parse_weights(weights_json)
    try:
        breakdown = score_pair(source, target, weights)
        if raster_dir:
            os.makedirs(raster_dir, exist_ok=True)
            dump_coverage_pgm(layout_detail(source),
                              os.path.join(raster_dir, "source.pgm"))
            dump_coverage_pgm(layout_detail(target),
                              os.path.join(raster_dir, "target.pgm"))
    except (EmptyDataError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(VALIDATION_EXIT)
    _echo_json(breakdown.to_dict())


@main.command()
@click.option("--spec", "spec_path", required=True, type=click.Path())
@click.option("--source-device", default="desktop", show_default=True)
@click.option("--target-device", required=True)
@click.option("--max", "max_n", default=5, show_default=True, type=int)
@click.option("--drastic", "drastic_ratio", default=0.6, show_default=True,
              type=float)
@click.option("--weights", "weights_json", default=None)
@click.option("--out", "out_dir", default=None, type=click.Path(),
              help="Write per-suggestion JSON, compiled specs, and scores.csv")
def recommend(spec_path, source_device, target_device, max_n, drastic_ratio,
              weights_json, out_dir):
    """Propose ranked design variants of a spec for a target device."""
    spec = _load_spec(spec_path)
    src = _device(source_device)
    tgt = _device(target_device)
    weights = _parse_weights(weights_json)
    try:
        suggestions = generate_suggestions(
            spec, src, tgt, load_catalog(), ConstraintStore(),
            scope="cli", weights=weights, max_n=max_n,
            drastic_ratio=drastic_ratio)
    except NoCandidatesError as exc:
        click.echo(f"error: {exc}", err=True)
        _echo_json({"stats": exc.stats})
        sys.exit(NO_CANDIDATES_EXIT)
    except (SchemaError, EmptyDataError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(VALIDATION_EXIT)

    if out_dir is None:
        _echo_json([s.to_dict() for s in suggestions])
        return
    os.makedirs(out_dir, exist_ok=True)
    rows = []
    for i, s in enumerate(suggestions, start=1):
        stem = f"{i:02d}-{s.id}"
        with open(os.path.join(out_dir, f"suggestion-{stem}.json"), "w",
                  encoding="utf-8") as fh:
            json.dump(s.to_dict(), fh, indent=2, sort_keys=True)
        with open(os.path.join(out_dir, f"spec-{stem}.json"), "w",
                  encoding="utf-8") as fh:
            fh.write(serialize_spec(s.resultSpec))
        rows.append(s)
    with open(os.path.join(out_dir, "scores.csv"), "w", encoding="utf-8",
              newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("rank", "id", "entry", "drastic") + MEASURE_COLUMNS
                        + ("description",))
        for i, s in enumerate(rows, start=1):
            writer.writerow(
                [i, s.id, s.entryId, "yes" if s.drastic else "no"]
                + [f"{s.scores[c]:.6f}" for c in MEASURE_COLUMNS]
                + [s.description])
    click.echo(f"wrote {len(rows)} suggestions to {out_dir}")


@main.command()
@click.option("--session", "session_path", required=True, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
def export(session_path, out_path):
    """Render a saved session into one responsive HTML page."""
    try:
        session = Session.from_dict(json.loads(_read(session_path)))
        result = export_session(session)
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        click.echo(f"error: session file is malformed: {exc}", err=True)
        sys.exit(VALIDATION_EXIT)
    except (DupoError, ExportError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(VALIDATION_EXIT)
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(result["html"])
    _echo_json({"breakpoints": result["breakpoints"], "out": out_path})


@main.command()
@click.option("--port", default=None, type=int,
              help="Defaults to DUPO_PORT or 8787.")
@click.option("--data-dir", default=None, type=click.Path(),
              help="Defaults to DUPO_DATA_DIR or ./.dupo-data.")
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(port, data_dir, host):
    """Run the HTTP service."""
    from .service import run_server
    run_server(port=port, data_dir=data_dir, host=host)


if __name__ == "__main__":
    main()
