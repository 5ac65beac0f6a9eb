"""Benchmark protocol: multi-seed runs, verification, record comparison and the ANM experiment."""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..packing.factory import create_optimizer_settings
from ..packing.geometry import DEFAULT_GEOM_TOL, check_feasible, density
from ..packing.lbfgs import MaintenancePolicy, OptimizerSettings, minimize
from ..packing.models import FeasibilityReport, Solution
from ..packing.objectives import ElasticObjective
from ..packing.pipeline import SolveConfig, SolveResult, initial_radius, solve
from ..packing.sed import random_layout
from . import store
from .models import (
    AnmExperimentRow,
    ComparisonReport,
    ComparisonRow,
    DensityRow,
    RecordStatus,
    RecordsTable,
    RunRecord,
)

logger = logging.getLogger(__name__)

# Radii within this distance count as equal (HR, RR and record comparison).
MATCH_TOL = 1e-9

SUMMARY_FILENAME = "summary.csv"


def clock_seed() -> int:
    return time.time_ns() & (2**64 - 1)


def derive_seed(seed_base: int, run: int) -> int:
    """Seed of run ``run``: ``(seed_base, run)`` mixed through ``SeedSequence``."""
    state = np.random.SeedSequence([seed_base, run]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def aggregate(
    n: int,
    results: Sequence[SolveResult],
    records: Optional[RecordsTable] = None,
    seed_base: int = 0,
    tol: float = MATCH_TOL,
) -> RunRecord:
    """Summarize independent runs on one instance.

    Args:
        n: Instance size.
        results: One SolveResult per run.
        records: Best-known radii; ``delta_*`` and ``rr`` stay None when
            ``n`` has no entry.
        seed_base: Base seed the run seeds were derived from.
        tol: Match tolerance for HR and RR.

    Returns:
        RunRecord for the instance.
    """
    if not results:
        raise ValueError("Cannot aggregate zero runs")
    radii = np.array([r.best_radius for r in results])
    best = int(np.argmin(radii))
    r_best = float(radii[best])
    # The mean can round one ulp below the minimum when every run agrees.
    r_avg = max(float(radii.mean()), r_best)
    record = (records or {}).get(n)
    runs = len(results)

    return RunRecord(
        n=n,
        runs=runs,
        r_best=r_best,
        r_avg=r_avg,
        delta_best=None if record is None else r_best - record,
        delta_avg=None if record is None else r_avg - record,
        hr=int(np.sum(np.abs(radii - r_best) <= tol)) / runs,
        rr=None if record is None else int(np.sum(radii <= record + tol)) / runs,
        density_best=density(results[best].best),
        time_to_best_s=float(np.mean([r.time_to_best for r in results])),
        seed_base=seed_base,
        radii=[float(r) for r in radii],
        seeds=[r.seed for r in results],
        times_to_best=[r.time_to_best for r in results],
    )


def run_instance(
    n: int,
    runs: int,
    template: Optional[SolveConfig] = None,
    seed_base: Optional[int] = None,
    records: Optional[RecordsTable] = None,
    out_dir: Optional[Union[str, Path]] = None,
    workers: int = 1,
) -> Tuple[RunRecord, List[SolveResult]]:
    """Run ``runs`` independent solves of instance ``n``.

    Run ``i`` uses ``derive_seed(seed_base, i)``. With ``out_dir``, every
    best solution is written there and a row is appended to
    ``summary.csv``.

    Args:
        n: Instance size.
        runs: Number of independent runs.
        template: Solver configuration; its ``n`` and ``seed`` are replaced.
        seed_base: Base seed; the clock when omitted.
        records: Best-known radii.
        out_dir: Directory for solution files and the summary.
        workers: Number of worker processes.

    Returns:
        Tuple of the aggregate record and the individual results.
    """
    if runs < 1:
        raise ValueError(f"runs must be positive, got {runs}")
    if workers < 1:
        raise ValueError(f"workers must be positive, got {workers}")
    seed_base = clock_seed() if seed_base is None else seed_base
    template = template or SolveConfig(n=n, t_cut=60.0)
    configs = [replace(template, n=n, seed=derive_seed(seed_base, i)) for i in range(runs)]
    logger.info(f"Instance n={n}: {runs} runs, seed base {seed_base}, {workers} workers")

    if workers == 1 or runs == 1:
        results = [solve(config) for config in configs]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, runs)) as executor:
            results = list(executor.map(solve, configs))

    record = aggregate(n, results, records, seed_base)
    if out_dir is not None:
        out = Path(out_dir)
        for i, result in enumerate(results):
            store.write_solution(out / store.solution_filename(n, i), result.best)
        store.append_summary(out / SUMMARY_FILENAME, record)
    return record, results


@dataclass(eq=False)
class Verification:
    """Independent feasibility verdict on a solution file."""

    solution: Solution
    report: FeasibilityReport
    density: float

    @property
    def feasible(self) -> bool:
        return self.report.feasible


def verify_solution(path: Union[str, Path], geom_tol: float = DEFAULT_GEOM_TOL) -> Verification:
    """Re-check a solution file using geometry alone.

    Raises:
        SolutionFormatError: If the file does not parse.
    """
    solution = store.read_solution(path)
    report = check_feasible(solution, geom_tol)
    return Verification(solution=solution, report=report, density=density(solution))


def _timed_minimize(
    n: int, radius: float, x0: np.ndarray, settings: OptimizerSettings
) -> Tuple[float, float]:
    objective = ElasticObjective(n, radius)
    start = time.perf_counter()
    _, report = minimize(objective, x0, settings)
    return time.perf_counter() - start, report.deferring_ratio


def anm_experiment(
    n_list: Sequence[int],
    runs: int,
    seed_base: int = 0,
    baseline: Union[str, MaintenancePolicy] = MaintenancePolicy.EVERY_ITERATION,
    init_density: float = 0.6,
    **opt_overrides: float,
) -> List[AnmExperimentRow]:
    """Compare adaptive maintenance with a baseline policy on random layouts.

    For each ``n``, every run draws one random layout at the initial radius
    and minimizes the elastic energy from it twice, once per policy, so the
    comparison is paired.

    Args:
        n_list: Instance sizes (each at least 2).
        runs: Paired runs per size.
        seed_base: Base seed of the random layouts.
        baseline: Policy to compare against.
        init_density: Density that sets the radius.
        **opt_overrides: OptimizerSettings overrides for both policies.

    Returns:
        One AnmExperimentRow per size.
    """
    if runs < 1:
        raise ValueError(f"runs must be positive, got {runs}")
    baseline = MaintenancePolicy.normalize(baseline)
    adaptive = create_optimizer_settings(MaintenancePolicy.ADAPTIVE, **opt_overrides)
    reference = create_optimizer_settings(baseline, **opt_overrides)

    rows: List[AnmExperimentRow] = []
    for n in n_list:
        if n < 2:
            raise ValueError(f"Every n must be at least 2, got {n}")
        radius = initial_radius(n, init_density)
        anm_times: List[float] = []
        base_times: List[float] = []
        ratios: List[float] = []
        for run in range(runs):
            rng = np.random.default_rng(np.random.SeedSequence([seed_base, n, run]))
            x0 = random_layout(n, radius, rng).as_vector()
            elapsed, ratio = _timed_minimize(n, radius, x0, adaptive)
            anm_times.append(elapsed)
            ratios.append(ratio)
            elapsed, _ = _timed_minimize(n, radius, x0, reference)
            base_times.append(elapsed)
        row = AnmExperimentRow(
            n=n,
            runs=runs,
            avg_runtime_anm_s=float(np.mean(anm_times)),
            avg_runtime_brute_s=float(np.mean(base_times)),
            avg_deferring_ratio=float(np.mean(ratios)),
        )
        logger.info(
            f"ANM n={n}: ratio {row.avg_deferring_ratio:.3f}, "
            f"runtime {row.avg_runtime_anm_s:.4f}s vs {row.avg_runtime_brute_s:.4f}s ({baseline.value})"
        )
        rows.append(row)
    return rows


def classify(r_best: Optional[float], record: Optional[float], tol: float = MATCH_TOL) -> RecordStatus:
    """Classify a found radius against the best-known one."""
    if r_best is None or record is None:
        return RecordStatus.ABSENT
    if r_best < record - tol:
        return RecordStatus.IMPROVED
    if r_best > record + tol:
        return RecordStatus.WORSE
    return RecordStatus.EQUAL


def _best_by_n(summary: Sequence[RunRecord]) -> Dict[int, RunRecord]:
    # Repeated instances keep their smallest radius.
    best: Dict[int, RunRecord] = {}
    for record in summary:
        if record.n not in best or record.r_best < best[record.n].r_best:
            best[record.n] = record
    return best


def compare_records(
    summary: Sequence[RunRecord], records: RecordsTable, tol: float = MATCH_TOL
) -> ComparisonReport:
    """Classify every instance of the outer join of ``summary`` and ``records``."""
    found = _best_by_n(summary)
    report = ComparisonReport()
    for n in sorted(set(found) | set(records)):
        r_best = found[n].r_best if n in found else None
        record = records.get(n)
        report.rows.append(ComparisonRow(n, r_best, record, classify(r_best, record, tol)))
    return report


def density_table(summary: Sequence[RunRecord], records: RecordsTable) -> List[DensityRow]:
    """Packing density ``n / R^3`` of the found and the best-known radius per instance."""
    found = _best_by_n(summary)
    rows: List[DensityRow] = []
    for n in sorted(set(found) | set(records)):
        r_best = found[n].r_best if n in found else None
        record = records.get(n)
        rows.append(
            DensityRow(
                n=n,
                density_best=None if r_best is None else n / r_best**3,
                density_record=None if record is None else n / record**3,
            )
        )
    return rows
