"""
LMMSE Report Writers

Result tables, per-step traces and the human-readable run summary.
"""

import csv
import io
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from jinja2 import Environment, FileSystemLoader

from .exceptions import ConfigurationError, OutputError
from .models import AggregateResult, CliConfig, OutputFormat

RESULT_COLUMNS = ["rho", "filter", "mean_rmse", "mean_loss_time", "runs", "seed"]

TEMPLATE_DIR = Path(__file__).parent / "templates"


def _render_rows(
    rows: Sequence[Dict[str, Any]], columns: List[str], fmt: OutputFormat
) -> str:
    if fmt == OutputFormat.JSON:
        records = [{column: row[column] for column in columns} for row in rows]
        return json.dumps(records, indent=2) + "\n"
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({column: row[column] for column in columns})
    return buffer.getvalue()


def _write(text: str, path: Union[str, Path]) -> Path:
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as e:
        raise OutputError(str(path), e.strerror or str(e))
    return path


def format_results(result: AggregateResult, fmt: OutputFormat = OutputFormat.CSV) -> str:
    """Result table text with columns rho, filter, mean_rmse, mean_loss_time, runs, seed."""
    return _render_rows(result.records(), RESULT_COLUMNS, fmt)


def write_results(
    result: AggregateResult,
    path: Union[str, Path],
    fmt: OutputFormat = OutputFormat.CSV,
) -> Path:
    """
    Write the result table.

    Args:
        result: Benchmark result
        path: Output file
        fmt: csv (header row, one record per line) or json (array of objects)

    Returns:
        Path written

    Raises:
        OutputError: If the file cannot be written
    """
    return _write(format_results(result, fmt), path)


def trace_columns(rows: Sequence[Dict[str, Any]]) -> List[str]:
    """Column order of a trace, taken from its first row."""
    return list(rows[0].keys()) if rows else ["step"]


def format_trace(
    rows: Sequence[Dict[str, Any]], fmt: OutputFormat = OutputFormat.CSV
) -> str:
    """Trace text, one row per step."""
    return _render_rows(rows, trace_columns(rows), fmt)


def write_trace(
    rows: Sequence[Dict[str, Any]],
    path: Union[str, Path],
    fmt: OutputFormat = OutputFormat.CSV,
) -> Path:
    """
    Write per-step trace rows.

    Raises:
        OutputError: If the file cannot be written
    """
    return _write(format_trace(rows, fmt), path)


def render_summary(
    result: AggregateResult, config: CliConfig, out: Optional[str] = None
) -> str:
    """
    Render the text summary printed after a benchmark.

    Raises:
        ConfigurationError: If the template directory is missing
    """
    if not TEMPLATE_DIR.exists():
        raise ConfigurationError(
            f"Template directory not found: {TEMPLATE_DIR}",
            suggestions=["Check the modal-lmmse installation"],
        )
    env = Environment(
        loader=FileSystemLoader(str(TEMPLATE_DIR)),
        trim_blocks=True,
        lstrip_blocks=True,
        keep_trailing_newline=True,
    )
    experiment = config.experiment
    return env.get_template("summary.txt.j2").render(
        runs=experiment.runs,
        horizon=experiment.horizon,
        seed=experiment.seed,
        p_d=experiment.clutter.p_d,
        p_g=experiment.clutter.p_g,
        misses=experiment.misses,
        miss_rule=experiment.miss_rule.value,
        densities=result.densities,
        out=out,
    )
