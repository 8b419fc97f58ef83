"""Command-line front end.

Subcommands: validate, gen-ucas, prioritize, dedupe, gaps, report, serve.
Outputs are deterministic given (input files, config, seed); nothing but the
audit log ever contains wall-clock content.

Exit codes: 0 success, 1 diagnostics/analysis errors, 2 unreadable input.
"""

from __future__ import annotations

import sys

import click

from . import api as api_module
from .config import CONFIG_ENV_VAR, McsConfig, load_config
from .core import Severity
from .dsl import parse_model
from .ids import parse_artifact_id
from .priority import (
    assess_all,
    dedupe_requirements,
    group_sheets,
    high_priority,
    read_sheets_csv,
)
from .reports import (
    emit_control_structure_graph,
    emit_gap_register,
    emit_summary,
    emit_uca_matrix,
)
from .ucas import generate_candidates, write_candidate_worksheet


def _read_file(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        click.echo(f"error: cannot read {path}: {exc}", err=True)
        sys.exit(2)


def _load_model(path: str, require_clean: bool = True):
    result = parse_model(_read_file(path), file=path)
    for diagnostic in result.diagnostics:
        click.echo(diagnostic.render(), err=True)
    if require_clean and not result.ok:
        sys.exit(1)
    return result.model


def _load_scoring_config(path: str | None):
    try:
        return load_config(path)
    except (OSError, ValueError) as exc:
        click.echo(f"error: bad config: {exc}", err=True)
        sys.exit(2)


@click.group()
def main():
    """STPA analysis workbench."""


@main.command()
@click.argument("path", type=click.Path())
def validate(path):
    """Parse and validate a .stpa document."""
    result = parse_model(_read_file(path), file=path)
    for diagnostic in result.diagnostics:
        click.echo(diagnostic.render())
    errors = sum(1 for d in result.diagnostics if d.severity is Severity.ERROR)
    warnings = len(result.diagnostics) - errors
    click.echo(f"{errors} error(s), {warnings} warning(s)")
    sys.exit(0 if errors == 0 else 1)


@main.command("gen-ucas")
@click.argument("path", type=click.Path())
@click.option("--phase", default=None, help="Expand only this phase's control actions.")
@click.option("--out", "out_path", type=click.Path(), default=None, help="Worksheet CSV destination.")
def gen_ucas(path, phase, out_path):
    """Generate the 7-per-CA candidate worksheet."""
    model = _load_model(path)
    try:
        candidates = generate_candidates(model, phase_filter=phase)
    except KeyError as exc:
        click.echo(f"error: {exc.args[0]}", err=True)
        sys.exit(1)
    worksheet = write_candidate_worksheet(candidates, model)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(worksheet)
    else:
        click.echo(worksheet, nl=False)
    click.echo(f"{len(candidates)} candidates", err=True)


@main.command()
@click.argument("path", type=click.Path())
@click.option("--sheets", "sheets_path", type=click.Path(), required=True, help="Score-sheet CSV.")
@click.option("--config", "config_path", type=click.Path(), default=None,
              help=f"Scoring config (default: ${CONFIG_ENV_VAR}).")
@click.option("--seed", type=int, default=None, help="Override the MCS base seed.")
@click.option("--iterations", type=int, default=None, help="Override the MCS iteration count.")
@click.option("--out", "out_path", type=click.Path(), default=None, help="Matrix CSV destination.")
@click.option("--format", "fmt", type=click.Choice(["csv", "md"]), default="csv")
def prioritize(path, sheets_path, config_path, seed, iterations, out_path, fmt):
    """Assess every confirmed UCA and emit the prioritization matrix."""
    model = _load_model(path)
    config = _load_scoring_config(config_path)
    if seed is not None or iterations is not None:
        if iterations is not None and iterations < 1:
            click.echo("error: --iterations must be >= 1", err=True)
            sys.exit(2)
        config = config.with_overrides(
            mcs=McsConfig(
                iterations=iterations if iterations is not None else config.mcs.iterations,
                seed=seed if seed is not None else config.mcs.seed,
                sampling_scheme=config.mcs.sampling_scheme,
            )
        )
    try:
        ej_sheets, _ = read_sheets_csv(_read_file(sheets_path))
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    by_uca = group_sheets(ej_sheets)

    confirmed = model.confirmed_ucas()
    missing = sorted(str(u.id) for u in confirmed if u.id not in by_uca)
    if missing:
        click.echo("error: no score sheets for: " + ", ".join(missing), err=True)
        sys.exit(1)
    expert_roster = {s.expert_id for s in ej_sheets}
    for uca in sorted(confirmed, key=lambda u: u.id.sort_key()):
        absent = sorted(expert_roster - {s.expert_id for s in by_uca[uca.id]})
        if absent:
            click.echo(f"warning: {uca.id} missing sheets from: {', '.join(absent)}", err=True)

    assessments = assess_all(model, by_uca, config)
    matrix = emit_uca_matrix(assessments, model, fmt=fmt)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(matrix)
    else:
        click.echo(matrix, nl=False)
    flagged = sorted(str(a.uca_id) for a in assessments if a.boundary_flag)
    if flagged:
        click.echo("boundary-straddling (review as a group): " + ", ".join(flagged), err=True)
    click.echo(
        f"{len(assessments)} assessed, {len(high_priority(assessments))} high priority (P1+P2)",
        err=True,
    )


def _read_merges(path: str | None):
    if path is None:
        return []
    merges = []
    for line_no, line in enumerate(_read_file(path).splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            click.echo(f"error: {path}:{line_no}: expected '<rq-id>, <rq-id>'", err=True)
            sys.exit(1)
        merges.append((parse_artifact_id(parts[0], "RQ"), parse_artifact_id(parts[1], "RQ")))
    return merges


@main.command()
@click.argument("path", type=click.Path())
@click.option("--merges", "merges_path", type=click.Path(), default=None,
              help="CSV of analyst-declared duplicate pairs (two RQ ids per line).")
def dedupe(path, merges_path):
    """Partition requirements into distinct groups."""
    model = _load_model(path)
    try:
        result = dedupe_requirements(model, _read_merges(merges_path))
    except KeyError as exc:
        click.echo(f"error: {exc.args[0]}", err=True)
        sys.exit(1)
    for rep in sorted(result.groups):
        members = ", ".join(str(m) for m in result.groups[rep])
        click.echo(f"{rep}: {members}")
    click.echo(f"{result.distinct_count} distinct requirement(s), {result.allocation_count} allocation(s)")


@main.command()
@click.argument("path", type=click.Path())
@click.option("--merges", "merges_path", type=click.Path(), default=None)
@click.option("--out", "out_path", type=click.Path(), default=None)
def gaps(path, merges_path, out_path):
    """Emit the stakeholder-grouped gap register."""
    model = _load_model(path)
    register = emit_gap_register(model, _read_merges(merges_path))
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(register)
    else:
        click.echo(register, nl=False)


@main.command()
@click.argument("path", type=click.Path())
@click.option("--phase", default=None, help="Phase for dot output.")
@click.option("--format", "fmt", type=click.Choice(["csv", "md", "dot"]), default="md")
@click.option("--sheets", "sheets_path", type=click.Path(), default=None,
              help="Score-sheet CSV (enables priority columns).")
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--out", "out_path", type=click.Path(), default=None)
def report(path, phase, fmt, sheets_path, config_path, out_path):
    """Emit a control-structure graph (dot), matrix (csv) or summary (md)."""
    model = _load_model(path)
    assessments = None
    if sheets_path is not None:
        config = _load_scoring_config(config_path)
        ej_sheets, _ = read_sheets_csv(_read_file(sheets_path))
        assessments = assess_all(model, group_sheets(ej_sheets), config)
    if fmt == "dot":
        if phase is None:
            click.echo("error: --format dot requires --phase", err=True)
            sys.exit(2)
        try:
            output = emit_control_structure_graph(model, phase)
        except KeyError as exc:
            click.echo(f"error: {exc.args[0]}", err=True)
            sys.exit(1)
    elif fmt == "csv":
        output = emit_uca_matrix(assessments or [], model, fmt="csv")
    else:
        _, output = emit_summary(model, assessments=assessments)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(output)
    else:
        click.echo(output, nl=False)


@main.command()
@click.option("--model", "model_path", type=click.Path(), required=True)
@click.option("--sheets", "sheets_path", type=click.Path(), default=None,
              help="Score-sheet CSV; the server writes submissions through to it.")
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--port", type=int, default=8571)
@click.option("--host", default="127.0.0.1")
def serve(model_path, sheets_path, config_path, port, host):
    """Run the expert scoring and review API."""
    import uvicorn

    model = _load_model(model_path)
    config = _load_scoring_config(config_path)
    app = api_module.create_app(model, config=config, sheets_path=sheets_path)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
