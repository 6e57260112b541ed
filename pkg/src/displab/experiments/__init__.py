"""Experiment catalog, reports and command-line interface."""
from .catalog import (
    CATALOG,
    ExperimentConfig,
    UnknownExperimentError,
    finite_yao_check,
    run_experiment,
)
from .reports import ReportRecord, StatRow, write_report

__all__ = [
    "CATALOG",
    "ExperimentConfig",
    "UnknownExperimentError",
    "ReportRecord",
    "StatRow",
    "finite_yao_check",
    "run_experiment",
    "write_report",
]
