"""Command-line entry points for running, estimating, and serving sessions."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .config import serialize_config, validate_config
from .errors import RageBenchError
from .session import estimate_session, export_results, read_trials, run_session


def _load_config(config_path: str | None):
    if config_path is None:
        raise click.UsageError(
            "no config given: pass --config or set RAGEBENCH_CONFIG"
        )
    try:
        return validate_config(Path(config_path).read_bytes())
    except FileNotFoundError:
        raise click.UsageError(f"config file not found: {config_path}")
    except RageBenchError as exc:
        raise click.ClickException(f"invalid config: {exc}")


config_option = click.option(
    "--config", "config_path", envvar="RAGEBENCH_CONFIG", type=click.Path(),
    help="Path to the experiment config JSON (falls back to $RAGEBENCH_CONFIG).",
)


@click.group()
def main():
    """Benchmark RAG pipeline combinations and recommend the best one."""


@main.command()
@config_option
@click.option("--session-id", default=None, help="Reuse an id to resume a prior session.")
def run(config_path, session_id):
    """Run a full benchmark session."""
    config = _load_config(config_path)
    try:
        state = run_session(config, session_id=session_id)
    except RageBenchError as exc:
        raise click.ClickException(str(exc))
    snapshot = state.snapshot()
    click.echo(f"session {snapshot['session_id']}: {snapshot['phase']}")
    click.echo(f"completed {len(snapshot['completed'])}, "
               f"skipped {len(snapshot['skipped'])}, "
               f"failed {len(snapshot['failed'])}, "
               f"interrupted {len(snapshot['interrupted'])}")
    if state.recommendation is not None:
        click.echo(f"best combination: {state.recommendation.best_combination_id}")
    click.echo(f"artifacts: {state.output_dir}")


@main.command()
@config_option
@click.option("--per-line-seconds", type=float, default=None,
              help="Calibration figure when no history exists.")
def estimate(config_path, per_line_seconds):
    """Project the runtime of a session before committing to it."""
    config = _load_config(config_path)
    try:
        seconds = estimate_session(config, per_line_seconds=per_line_seconds)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"projected runtime: {seconds:.1f} s")


@main.command()
@click.option("--session", "session_dir", required=True, type=click.Path(exists=True),
              help="Session artifact directory (output_dir/<session_id>).")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write JSON-lines records here instead of stdout.")
def results(session_dir, out_path):
    """Dump the trial records of a finished or partial session."""
    try:
        if out_path is not None:
            count = export_results(session_dir, out_path)
            click.echo(f"wrote {count} records to {out_path}")
        else:
            for record in read_trials(session_dir):
                click.echo(json.dumps(record, ensure_ascii=False, sort_keys=True))
    except RageBenchError as exc:
        raise click.ClickException(str(exc))


@main.command()
@click.option("--session", "session_dir", required=True, type=click.Path(exists=True),
              help="Session artifact directory (output_dir/<session_id>).")
@click.option("--emit-config", "emit_config", is_flag=True,
              help="Print only the ready-to-use winning config payload.")
def recommend(session_dir, emit_config):
    """Show the recommendation report of a finished session."""
    path = Path(session_dir) / "recommendation.json"
    if not path.exists():
        raise click.ClickException(f"no recommendation in {session_dir}; has the session finished?")
    payload = json.loads(path.read_text(encoding="utf-8"))
    if emit_config:
        click.echo(json.dumps(payload["emitted_config"], indent=2, sort_keys=True))
    else:
        click.echo(json.dumps(payload, indent=2, sort_keys=True))


@main.command()
@click.option("--port", default=8400, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(port, host):
    """Start the HTTP service."""
    import uvicorn

    from .api import create_app

    uvicorn.run(create_app(), host=host, port=port)


@main.command()
@config_option
def validate(config_path):
    """Check a config file and echo its canonical form."""
    config = _load_config(config_path)
    sys.stdout.write(serialize_config(config))


if __name__ == "__main__":
    main()
