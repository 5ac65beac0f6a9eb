"""Benchmark harness for the sphere packing solver."""

from .harness import (
    MATCH_TOL,
    aggregate,
    anm_experiment,
    compare_records,
    density_table,
    derive_seed,
    run_instance,
    verify_solution,
)
from .models import AnmExperimentRow, ComparisonReport, RecordStatus, RunRecord

__all__ = [
    "MATCH_TOL",
    "AnmExperimentRow",
    "ComparisonReport",
    "RecordStatus",
    "RunRecord",
    "aggregate",
    "anm_experiment",
    "compare_records",
    "density_table",
    "derive_seed",
    "run_instance",
    "verify_solution",
]
