#!/usr/bin/env python3
"""
Modal LMMSE - CLI Entry Point

Monte-Carlo benchmark of the recursive LMMSE filter for white-mode jump
linear systems against nearest-neighbor and PDA trackers in clutter.
"""

import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional

import click

from lmmse_core import __version__
from lmmse_core.bench import run_experiment, trace_run
from lmmse_core.config import parse_config, serialize_config
from lmmse_core.exceptions import LmmseError
from lmmse_core.models import CliConfig, MissRule, OutputFormat
from lmmse_core.report import (
    format_results,
    format_trace,
    render_summary,
    write_results,
    write_trace,
)

LOG_LEVELS = [logging.WARNING, logging.INFO, logging.DEBUG]


def print_error(error: LmmseError) -> None:
    """
    Print error with suggestions.

    Args:
        error: LmmseError instance to print
    """
    click.secho(f"Error: {error.message}", fg="red", err=True)
    if error.suggestions:
        click.echo("\nSuggestions:", err=True)
        for suggestion in error.suggestions:
            click.echo(f"  - {suggestion}", err=True)


def configure_logging(verbosity: int) -> None:
    """Map -v counts to WARNING / INFO / DEBUG."""
    level = LOG_LEVELS[min(verbosity, len(LOG_LEVELS) - 1)]
    logging.basicConfig(
        level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )


def resolve(config_path: Optional[Path], overrides: Dict[str, Any]) -> CliConfig:
    """Load the config file, if any, and apply flag overrides."""
    return parse_config(config_path, overrides)


# =============================================================================
# CLI Group
# =============================================================================


@click.group()
@click.version_option(version=__version__, prog_name="lmmse")
def cli() -> None:
    """
    Modal LMMSE - jump linear system filtering and tracking-in-clutter benchmark.

    \b
    Examples:
      lmmse bench --runs 100 --rho 0.5,1,2     # Benchmark all filters
      lmmse bench --filters lmmse --out r.json --format json
      lmmse bench --trace 0 --horizon 50       # Per-step trace of run 0
      lmmse config --config my.yaml            # Show resolved configuration
    """


# =============================================================================
# Bench Command
# =============================================================================


@cli.command()
@click.option(
    "--config",
    "config_path",
    type=click.Path(path_type=Path),
    help="Flat YAML configuration file",
)
@click.option("--rho", help="Comma-separated clutter densities")
@click.option("--runs", type=int, help="Monte-Carlo runs per density")
@click.option("--horizon", type=int, help="Steps per run")
@click.option("--pd", type=float, help="Detection probability")
@click.option("--pg", type=float, help="Gate coverage probability")
@click.option("--seed", type=int, help="Base random seed")
@click.option("--filters", help="Comma-separated subset of lmmse,nn,pda")
@click.option("--out", help="Output file (default: stdout)")
@click.option(
    "--format",
    "fmt",
    type=click.Choice([f.value for f in OutputFormat]),
    help="Output format",
)
@click.option("--trace", type=int, help="Write a per-step trace of this run index")
@click.option(
    "--miss-weight",
    type=click.Choice([rule.value for rule in MissRule] + ["product"]),
    help="Weight rule of the no-true-measurement atom (product is an alias of paper)",
)
@click.option("--workers", type=int, help="Worker processes")
@click.option("-v", "--verbose", count=True, help="Increase log verbosity")
def bench(
    config_path: Optional[Path],
    rho: Optional[str],
    runs: Optional[int],
    horizon: Optional[int],
    pd: Optional[float],
    pg: Optional[float],
    seed: Optional[int],
    filters: Optional[str],
    out: Optional[str],
    fmt: Optional[str],
    trace: Optional[int],
    miss_weight: Optional[str],
    workers: Optional[int],
    verbose: int,
) -> None:
    """
    Run the tracking-in-clutter benchmark.

    Writes one row per (rho, filter) with mean position RMSE and mean
    track-loss time, and prints a summary. With --trace, writes one row per
    step of a single run instead.
    """
    overrides = {
        "rho": rho,
        "runs": runs,
        "horizon": horizon,
        "pd": pd,
        "pg": pg,
        "seed": seed,
        "filters": filters,
        "out": out,
        "format": fmt,
        "trace": trace,
        "miss_weight": miss_weight,
        "workers": workers,
        "verbosity": verbose or None,
    }
    try:
        config = resolve(config_path, overrides)
        configure_logging(config.verbosity)
        experiment = config.experiment

        if config.trace is not None:
            rows = trace_run(experiment, config.trace)
            if config.out:
                write_trace(rows, config.out, config.format)
                click.echo(f"Trace of run {config.trace} written to {config.out}")
            else:
                click.echo(format_trace(rows, config.format), nl=False)
            return

        result = run_experiment(experiment)
        if config.out:
            write_results(result, config.out, config.format)
            click.echo(render_summary(result, config, config.out), nl=False)
        else:
            click.echo(format_results(result, config.format), nl=False)
            click.echo(render_summary(result, config), nl=False, err=True)
    except LmmseError as e:
        print_error(e)
        sys.exit(1)


# =============================================================================
# Config Command
# =============================================================================


@cli.command()
@click.option(
    "--config",
    "config_path",
    type=click.Path(path_type=Path),
    help="Flat YAML configuration file",
)
@click.option("--rho", help="Comma-separated clutter densities")
@click.option("--runs", type=int, help="Monte-Carlo runs per density")
@click.option("--horizon", type=int, help="Steps per run")
@click.option("--pd", type=float, help="Detection probability")
@click.option("--pg", type=float, help="Gate coverage probability")
@click.option("--seed", type=int, help="Base random seed")
@click.option("--filters", help="Comma-separated subset of lmmse,nn,pda")
def config(
    config_path: Optional[Path],
    rho: Optional[str],
    runs: Optional[int],
    horizon: Optional[int],
    pd: Optional[float],
    pg: Optional[float],
    seed: Optional[int],
    filters: Optional[str],
) -> None:
    """Print the resolved configuration as flat YAML."""
    overrides = {
        "rho": rho,
        "runs": runs,
        "horizon": horizon,
        "pd": pd,
        "pg": pg,
        "seed": seed,
        "filters": filters,
    }
    try:
        click.echo(serialize_config(resolve(config_path, overrides)), nl=False)
    except LmmseError as e:
        print_error(e)
        sys.exit(1)


# =============================================================================
# Entry Point
# =============================================================================


if __name__ == "__main__":
    cli()
