"""Figure sweeps and table export."""

from .output import OutputFormat, frame_records, report_tails_frame, write_sweep_output, write_table
from .sweeps import (
    Experiment,
    SweepResult,
    SweepSpec,
    build_frame,
    default_grids,
    linear_range,
    log_range,
    parse_grid,
    run_sweep,
    step_range,
)

__all__ = [
    "Experiment",
    "OutputFormat",
    "SweepResult",
    "SweepSpec",
    "build_frame",
    "default_grids",
    "frame_records",
    "linear_range",
    "log_range",
    "parse_grid",
    "report_tails_frame",
    "run_sweep",
    "step_range",
    "write_sweep_output",
    "write_table",
]
