"""Configuration-driven verification suites."""

from .config import ExperimentConfig, UsageError, load_config, parse_config
from .lsds import second_difference, shift_Lsds_norm
from .report import Record, Report
from .suites import EXAMPLES, run, run_example

__all__ = [
    "EXAMPLES",
    "ExperimentConfig",
    "Record",
    "Report",
    "UsageError",
    "load_config",
    "parse_config",
    "run",
    "run_example",
    "second_difference",
    "shift_Lsds_norm",
]
