"""Config parsing, sweeps, CSV/SVG output and the command-line interface."""

from imodleach.harness.config import SweepSpec, parse_config
from imodleach.harness.csvio import read_sweep_csv, read_trace_csv, write_csv
from imodleach.harness.plot import emit_plot
from imodleach.harness.sweep import SweepResult, SweepRow, run_sweep

__all__ = [
    "SweepResult",
    "SweepRow",
    "SweepSpec",
    "emit_plot",
    "parse_config",
    "read_sweep_csv",
    "read_trace_csv",
    "run_sweep",
    "write_csv",
]
