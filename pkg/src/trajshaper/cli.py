"""Command-line interface: register, reshape, generate, evaluate, serve.

reshape exit codes: 0 all checks passed, 1 best-effort result written,
2 command interpretation failed, 3 numeric failure in the optimizer.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import fileio
from .config import load_config
from .dataset import SAMPLE_KINDS, generate_sample
from .errors import (
    InterpretationError,
    ObjectResolutionError,
    OptimizationError,
    SchemaError,
    TrajshaperError,
    TransportError,
)
from .evaluation import evaluate_samples, render_table
from .pipeline import constraints_from_document, interpret, reshape
from .registration import register_cloud

CLOUD_SUFFIXES = (".xyz", ".txt", ".csv", ".bin", ".f32")


@click.group()
def main():
    """Geometry-aware trajectory reshaping from language constraints."""


def _config_option(f):
    return click.option(
        "--config", "config_path", type=click.Path(exists=True), default=None,
        help="YAML config file.",
    )(f)


def _collect_cloud_files(paths: tuple[str, ...]) -> list[Path]:
    files: list[Path] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            files.extend(sorted(q for q in p.iterdir() if q.suffix.lower() in CLOUD_SUFFIXES))
        else:
            files.append(p)
    return files


@main.command()
@click.argument("clouds", nargs=-1, required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path(), help="Scene file to write.")
def register(clouds, out):
    """Fit primitives to labeled point clouds and write a scene file.

    CLOUDS are cloud files or directories; each cloud file needs a sidecar
    '<stem>.json' descriptor carrying its label and shape hint.
    """
    files = _collect_cloud_files(clouds)
    if not files:
        raise click.ClickException("no point cloud files found")
    objects, warnings = [], 0
    for path in files:
        try:
            cloud = fileio.load_point_cloud(path)
            objects.append(register_cloud(cloud))
        except TrajshaperError as e:
            warnings += 1
            click.echo(f"warning: skipping {path}: {e}", err=True)
    if not objects:
        raise click.ClickException("no cloud could be registered")
    fileio.save_scene(objects, out)
    click.echo(f"registered {len(objects)} object(s), {warnings} warning(s) -> {out}")


@main.command()
@click.option("--scene", "scene_path", required=True, type=click.Path(exists=True))
@click.option("--trajectory", "trajectory_path", required=True, type=click.Path(exists=True))
@click.option("--command", "command_text", default=None, help="Natural-language command.")
@click.option("--constraints", "constraints_path", type=click.Path(exists=True), default=None,
              help="Constraint document instead of a command.")
@click.option("--out", required=True, type=click.Path(), help="Modified trajectory file.")
@click.option("--interpreter", type=click.Choice(["template", "external"]), default=None,
              help="Override the configured interpreter.")
@click.option("--seed", type=int, default=None, help="Unused by reshape; accepted for symmetry.")
@_config_option
def reshape_cmd(scene_path, trajectory_path, command_text, constraints_path, out,
                interpreter, seed, config_path):
    """Reshape a trajectory to satisfy a command or a constraint document."""
    del seed
    config = load_config(config_path)
    if interpreter:
        config.interpreter.mode = interpreter
    if (command_text is None) == (constraints_path is None):
        raise click.UsageError("provide exactly one of --command or --constraints")

    try:
        objects = fileio.load_scene(scene_path)
        trajectory = fileio.load_trajectory(trajectory_path)
    except SchemaError as e:
        raise click.ClickException(str(e)) from e

    try:
        if command_text is not None:
            interpretation = interpret(command_text, objects, config)
        else:
            interpretation = constraints_from_document(
                Path(constraints_path).read_text(), objects
            )
    except (InterpretationError, ObjectResolutionError, SchemaError, TransportError) as e:
        click.echo(f"interpretation failed: {e}", err=True)
        sys.exit(2)

    try:
        result = reshape(trajectory, objects, interpretation, config)
    except OptimizationError as e:
        click.echo(f"optimizer failure: {e}", err=True)
        sys.exit(3)

    out = Path(out)
    fileio.save_trajectory(result.best_trajectory, out)
    report_path = out.with_suffix(out.suffix + ".report.json")
    report_path.write_text(fileio.run_report_document(result.best, result.reports))
    status = "passed" if result.best.all_passed else "best-effort"
    click.echo(
        f"{status}: agent={result.best.agent.value} round={result.best.round_index} "
        f"-> {out} (+ {report_path.name})"
    )
    sys.exit(0 if result.best.all_passed else 1)


main.add_command(reshape_cmd, name="reshape")


@main.command()
@click.option("--out", required=True, type=click.Path())
@click.option("--kind", type=click.Choice(list(SAMPLE_KINDS)), required=True)
@click.option("--count", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, help="First sample seed.")
def generate(out, kind, count, seed):
    """Generate a synthetic benchmark dataset with exact ground truth."""
    samples = [generate_sample(seed + i, kind) for i in range(count)]
    fileio.write_dataset(samples, out)
    click.echo(f"wrote {count} {kind} sample(s) -> {out}")


@main.command()
@click.option("--dataset", "dataset_dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Also write machine-readable results JSON.")
@_config_option
def evaluate(dataset_dir, out_path, config_path):
    """Run the orchestrator over a dataset and report success rates."""
    config = load_config(config_path)
    samples = fileio.read_dataset(dataset_dir)
    results = evaluate_samples(samples, config)
    click.echo(render_table(results))
    if out_path:
        Path(out_path).write_text(fileio.dumps_canonical(results))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8800, show_default=True)
@_config_option
def serve(host, port, config_path):
    """Start the interactive session service for the browser studio."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(load_config(config_path)), host=host, port=port)


if __name__ == "__main__":
    main()
