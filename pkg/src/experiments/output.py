"""Table writers for sweep results and simulation reports."""

import json
import logging
import math
from enum import Enum
from pathlib import Path
from typing import Any

import pandas as pd

from ..config import ExportColumns
from ..data.models import SimReport
from ..data.versioning import RunManifestManager
from ..exceptions import InvalidParameterError

logger = logging.getLogger(__name__)


class OutputFormat(Enum):
    """Supported data file formats."""

    CSV = "csv"
    JSON = "json"


def _json_value(value: Any) -> Any:
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        return float(f"{value:.12g}")
    if hasattr(value, "item"):
        return _json_value(value.item())
    return value


def frame_records(frame: pd.DataFrame) -> list[dict[str, Any]]:
    """Convert a table to JSON-safe records with 12 significant digits."""
    return [
        {column: _json_value(value) for column, value in row.items()}
        for row in frame.to_dict(orient="records")
    ]


def write_table(frame: pd.DataFrame, path: Path, fmt: OutputFormat | str = OutputFormat.CSV) -> Path:
    """Write a sweep table.

    CSV files use 12 significant digits and '.' as decimal separator
    regardless of locale; JSON files hold a list of records.

    Args:
        frame: Table to write.
        path: Destination file.
        fmt: "csv" or "json".

    Returns:
        The written path.
    """
    fmt = OutputFormat(fmt)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt is OutputFormat.CSV:
        frame.to_csv(path, index=False, float_format=ExportColumns.CSV_FLOAT_FORMAT, lineterminator="\n")
    else:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(frame_records(frame), f, indent=2)
            f.write("\n")
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def write_sweep_output(
    frame: pd.DataFrame,
    path: Path,
    fmt: OutputFormat | str,
    experiment: str,
    parameters: dict[str, Any],
    errors: list[dict[str, Any]] | None = None,
) -> Path:
    """Write a sweep table and its run manifest.

    Partial tables are still written when ``errors`` is non-empty; the
    manifest then carries status "failed" and the error records.

    Returns:
        Path of the manifest file.
    """
    write_table(frame, path, fmt)
    manager = RunManifestManager(path)
    manifest = manager.create_manifest(experiment, parameters, len(frame), errors)
    manifest_path = manager.save_manifest(manifest)
    if errors:
        logger.warning(f"{len(errors)} grid points failed; see {manifest_path}")
    return manifest_path


def report_tails_frame(report: SimReport) -> pd.DataFrame:
    """Tabulate the queue and delay tails of a simulation report."""
    if not report.stable:
        raise InvalidParameterError("unstable queue has no tails", "stable", report.stable)
    queue = pd.DataFrame(report.queue_tail, columns=["level", "probability"]).assign(tail="queue_bits")
    delay = pd.DataFrame(report.delay_tail, columns=["level", "probability"]).assign(tail="delay_blocks")
    delay["stderr"] = report.delay_tail_se[: len(delay)] or [math.nan] * len(delay)
    return pd.concat([queue, delay], ignore_index=True)[["tail", "level", "probability", "stderr"]]
