"""Experiment harness: CLI, orchestration, reports, figures, verification."""
from .experiments import (COMMANDS, EXIT_CHECK_FAILED, EXIT_DISCREPANCY,
                          EXIT_ERROR, EXIT_OK, OUT_DIR_ENV, RunConfig,
                          collect_rows, full_summary, run_experiment, summarize)
from .report import ReportFile, read_csv_rows, write_report

__all__ = ["COMMANDS", "EXIT_CHECK_FAILED", "EXIT_DISCREPANCY", "EXIT_ERROR",
           "EXIT_OK", "OUT_DIR_ENV", "ReportFile", "RunConfig", "collect_rows",
           "full_summary", "read_csv_rows", "run_experiment", "summarize",
           "write_report"]
