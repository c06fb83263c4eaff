"""Plan validation, fixture benchmarks and the benchmark runner."""

from .runner import BenchResult, CellSpec, SuiteConfig, load_suite, run_benchmark, run_cell, write_results
from .validate import ValidationReport, validate_plan

__all__ = [
    "BenchResult", "CellSpec", "SuiteConfig", "ValidationReport",
    "load_suite", "run_benchmark", "run_cell", "validate_plan", "write_results",
]
