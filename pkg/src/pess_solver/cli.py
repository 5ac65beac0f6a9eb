"""CLI interface for pess-solver."""

import json
import logging
import sys
from pathlib import Path
from typing import Any, List, Optional

import click

from . import __version__
from .bench import harness, store
from .bench.models import RecordsTable, RecordStatus
from .config import BenchConfig
from .packing.container import PenaltySchedule
from .packing.exceptions import InfeasibleSolutionError, SolutionFormatError
from .packing.factory import create_optimizer_settings
from .packing.geometry import DEFAULT_GEOM_TOL
from .packing.lbfgs import MaintenancePolicy
from .packing.pipeline import SolveConfig, default_time_budget
from .packing.sed import SedSettings

logger = logging.getLogger(__name__)

EXIT_INFEASIBLE = 1
EXIT_USAGE = 2

POLICY_CHOICES = [p.value for p in MaintenancePolicy]


class DurationType(click.ParamType):
    """Wall-clock duration: seconds, or a number with an ``s``/``m``/``h`` suffix."""

    name = "duration"
    _UNITS = {"s": 1.0, "m": 60.0, "h": 3600.0}

    def convert(self, value: Any, param: Optional[click.Parameter], ctx: Optional[click.Context]) -> float:
        if isinstance(value, (int, float)):
            seconds = float(value)
        else:
            text = str(value).strip().lower()
            unit = 1.0
            if text and text[-1] in self._UNITS:
                unit = self._UNITS[text[-1]]
                text = text[:-1]
            try:
                seconds = float(text) * unit
            except ValueError:
                self.fail(f"{value!r} is not a duration (e.g. 90, 30s, 5m, 2h)", param, ctx)
        if not seconds > 0:
            self.fail(f"duration must be positive, got {value!r}", param, ctx)
        return seconds


class IntListType(click.ParamType):
    """Comma-separated positive integers."""

    name = "int-list"

    def convert(self, value: Any, param: Optional[click.Parameter], ctx: Optional[click.Context]) -> List[int]:
        if isinstance(value, list):
            return value
        try:
            numbers = [int(part) for part in str(value).split(",") if part.strip()]
        except ValueError:
            self.fail(f"{value!r} is not a comma-separated list of integers", param, ctx)
        if not numbers:
            self.fail("expected at least one integer", param, ctx)
        return numbers


DURATION = DurationType()
INT_LIST = IntListType()


def _load_records(ctx: click.Context, path: Optional[str]) -> Optional[RecordsTable]:
    if not path:
        return None
    try:
        return store.read_records(path)
    except SolutionFormatError as e:
        click.echo(f"Error: {e}", err=True)
        ctx.exit(EXIT_USAGE)
    return None


@click.group()
@click.version_option(version=__version__, prog_name="pess-solver")
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose output.")
@click.option("--debug", is_flag=True, help="Enable debug mode.")
@click.option(
    "--config",
    "config_path",
    type=click.Path(dir_okay=False),
    help="Configuration file (default: $PESS_SOLVER_CONFIG or ~/.pess-solver/config.json).",
)
@click.pass_context
def cli(ctx: click.Context, verbose: bool, debug: bool, config_path: Optional[str]) -> None:
    """pess-solver - pack equal spheres into the smallest sphere."""
    # Ensure ctx.obj exists
    if ctx.obj is None:
        ctx.obj = {}

    # Configure logging
    level = logging.DEBUG if debug else (logging.INFO if verbose else logging.WARNING)
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )

    ctx.obj["verbose"] = verbose
    ctx.obj["debug"] = debug
    ctx.obj["config_path"] = config_path
    ctx.obj["config"] = BenchConfig.load_from_file(BenchConfig.get_config_path(config_path))

    if debug:
        logger.debug("Debug mode enabled")
    elif verbose:
        logger.info("Verbose mode enabled")


@cli.command()
@click.option("--n", "n", type=click.IntRange(min=1), required=True, help="Number of unit spheres.")
@click.option("--time", "t_cut", type=DURATION, help="Wall-clock budget per run (e.g. 60, 5m, 2h).")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), help="Base seed (default: system clock).")
@click.option("--runs", type=click.IntRange(min=1), help="Independent runs.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), help="Output directory.")
@click.option("--s-iter", type=click.IntRange(min=1), help="SED iteration cap.")
@click.option("--c", "c", type=click.FloatRange(min=0, min_open=True), help="Exploration coefficient.")
@click.option("--theta", type=click.FloatRange(min=0, min_open=True), help="Perturbation half-width.")
@click.option("--l-cut", type=click.FloatRange(min=0, min_open=True), help="Neighbor cutoff distance.")
@click.option(
    "--init-density",
    type=click.FloatRange(0, 1, min_open=True, max_open=True),
    help="Density guess for the initial radius.",
)
@click.option("--records", "records_path", type=click.Path(exists=True, dir_okay=False), help="Best-known records CSV.")
@click.option("--workers", type=click.IntRange(min=1), help="Worker processes for independent runs.")
@click.option("--max-rounds", type=click.IntRange(min=0), help="Cap on outer-loop passes per run.")
@click.option("--policy", type=click.Choice(POLICY_CHOICES), help="Neighbor maintenance policy.")
@click.option("--long-run", is_flag=True, help="Use the long-run time budget for this n.")
@click.option(
    "--radius-shrink-step",
    type=click.FloatRange(0, 1, max_open=True),
    default=0.0,
    help="Search at R* * (1 - step) instead of R*.",
)
@click.pass_context
def solve(
    ctx: click.Context,
    n: int,
    t_cut: Optional[float],
    seed: Optional[int],
    runs: Optional[int],
    out_dir: Optional[str],
    s_iter: Optional[int],
    c: Optional[float],
    theta: Optional[float],
    l_cut: Optional[float],
    init_density: Optional[float],
    records_path: Optional[str],
    workers: Optional[int],
    max_rounds: Optional[int],
    policy: Optional[str],
    long_run: bool,
    radius_shrink_step: float,
) -> None:
    """Solve one instance with several independent seeds."""
    config: BenchConfig = ctx.obj["config"]
    if t_cut is None:
        t_cut = default_time_budget(n) if (long_run or config.long_run) else config.time_budget
    records = _load_records(ctx, records_path or config.records_path)
    seed_base = harness.clock_seed() if seed is None else seed

    template = SolveConfig(
        n=n,
        t_cut=t_cut,
        sed=SedSettings(s_iter=s_iter or config.s_iter, c=c or config.c, theta=theta or config.theta),
        schedule=PenaltySchedule(),
        opt=create_optimizer_settings(policy or config.policy, cutoff=l_cut or config.l_cut),
        seed=seed_base,
        init_density=init_density or config.init_density,
        radius_shrink_step=radius_shrink_step,
        max_rounds=max_rounds,
    )
    out = Path(out_dir or config.out_dir)
    click.echo(f"Solving n={n}: {runs or config.runs} runs, budget {t_cut:g}s, seed base {seed_base}")

    try:
        record, results = harness.run_instance(
            n,
            runs or config.runs,
            template=template,
            seed_base=seed_base,
            records=records,
            out_dir=out,
            workers=workers or config.workers,
        )
    except InfeasibleSolutionError as e:
        logger.error(f"Solve failed: {e}", exc_info=ctx.obj.get("debug"))
        click.echo(f"Error: {e}", err=True)
        ctx.exit(EXIT_INFEASIBLE)

    for i, result in enumerate(results):
        click.echo(
            f"  run {i}: R={store.format_real(result.best_radius)} seed={result.seed} "
            f"rounds={result.iterations} time_to_best={result.time_to_best:.2f}s"
        )
    click.echo(f"R_best = {store.format_real(record.r_best)}")
    click.echo(f"R_avg  = {store.format_real(record.r_avg)}")
    click.echo(f"HR     = {record.hr:.2f}")
    if record.delta_best is not None and record.rr is not None:
        click.echo(f"Delta_best = {record.delta_best:.3e}  RR = {record.rr:.2f}")
    elif records is not None:
        click.echo(f"No best-known record for n={n}")
    click.echo(f"Density = {record.density_best:.6f}")
    click.echo(f"Results written to {out}")


@cli.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--tol", type=click.FloatRange(min=0), default=DEFAULT_GEOM_TOL, show_default=True, help="Geometric tolerance.")
@click.pass_context
def verify(ctx: click.Context, file: str, tol: float) -> None:
    """Check a solution file for overlaps and containment."""
    try:
        verdict = harness.verify_solution(file, tol)
    except SolutionFormatError as e:
        click.echo(f"Error: {e}", err=True)
        ctx.exit(EXIT_USAGE)

    s = verdict.solution
    click.echo(f"n = {s.n}, R = {store.format_real(s.radius)}, density = {verdict.density:.6f}")
    if verdict.feasible:
        click.echo(f"FEASIBLE (tol {tol:g})")
        return
    click.echo(f"INFEASIBLE (tol {tol:g}), worst violation {verdict.report.worst_violation:.6g}")
    for line in verdict.report.describe():
        click.echo(f"  {line}")
    ctx.exit(EXIT_INFEASIBLE)


@cli.command("anm-exp")
@click.option("--n-list", type=INT_LIST, required=True, help="Comma-separated instance sizes (each >= 2).")
@click.option("--runs", type=click.IntRange(min=1), default=10, show_default=True, help="Paired runs per size.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), help="CSV file for the results.")
@click.option(
    "--baseline",
    type=click.Choice([MaintenancePolicy.EVERY_ITERATION.value, MaintenancePolicy.FIXED_INTERVAL.value]),
    default=MaintenancePolicy.EVERY_ITERATION.value,
    show_default=True,
    help="Policy compared against adaptive maintenance.",
)
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), help="Base seed (default: system clock).")
@click.option("--l-cut", type=click.FloatRange(min=0, min_open=True), help="Neighbor cutoff distance.")
@click.pass_context
def anm_exp(
    ctx: click.Context,
    n_list: List[int],
    runs: int,
    out_path: Optional[str],
    baseline: str,
    seed: Optional[int],
    l_cut: Optional[float],
) -> None:
    """Compare adaptive neighbor maintenance with a baseline policy."""
    config: BenchConfig = ctx.obj["config"]
    if any(n < 2 for n in n_list):
        raise click.BadParameter("every n must be at least 2", param_hint="--n-list")
    seed_base = harness.clock_seed() if seed is None else seed
    click.echo(f"ANM experiment: n={','.join(map(str, n_list))}, {runs} runs, seed base {seed_base}")

    rows = harness.anm_experiment(
        n_list,
        runs,
        seed_base=seed_base,
        baseline=baseline,
        init_density=config.init_density,
        cutoff=l_cut or config.l_cut,
    )
    click.echo(f"{'n':>6} {'anm_s':>10} {baseline + '_s':>22} {'ratio':>7} {'deferring':>10}")
    for row in rows:
        click.echo(
            f"{row.n:>6} {row.avg_runtime_anm_s:>10.4f} {row.avg_runtime_brute_s:>22.4f} "
            f"{row.runtime_ratio:>7.3f} {row.avg_deferring_ratio:>10.3f}"
        )
    if out_path:
        store.write_anm_rows(out_path, rows)
        click.echo(f"Results written to {out_path}")


@cli.command()
@click.option("--summary", "summary_path", type=click.Path(exists=True, dir_okay=False), required=True, help="Summary CSV.")
@click.option("--records", "records_path", type=click.Path(exists=True, dir_okay=False), required=True, help="Records CSV.")
@click.option("--density-out", type=click.Path(dir_okay=False), help="CSV file for the density table.")
@click.pass_context
def compare(ctx: click.Context, summary_path: str, records_path: str, density_out: Optional[str]) -> None:
    """Classify found radii against best-known records."""
    try:
        summary = store.read_summary(summary_path)
    except SolutionFormatError as e:
        click.echo(f"Error: {e}", err=True)
        ctx.exit(EXIT_USAGE)
    records = _load_records(ctx, records_path) or {}

    report = harness.compare_records(summary, records)
    for row in report.rows:
        found = "-" if row.r_best is None else store.format_real(row.r_best)
        known = "-" if row.record is None else store.format_real(row.record)
        diff = "" if row.difference is None else f" ({row.difference:+.3e})"
        click.echo(f"n={row.n:<5} found={found:<20} record={known:<20} {row.status.value}{diff}")
    counts = report.counts
    click.echo(
        f"#Improved {counts[RecordStatus.IMPROVED]}  #Equal {counts[RecordStatus.EQUAL]}  "
        f"#Worse {counts[RecordStatus.WORSE]}  #Absent {counts[RecordStatus.ABSENT]}"
    )
    if density_out:
        store.write_density_rows(density_out, harness.density_table(summary, records))
        click.echo(f"Density table written to {density_out}")


@cli.command()
@click.option("--show", is_flag=True, help="Show current configuration")
@click.option("--init", is_flag=True, help="Initialize configuration file with defaults")
@click.option("--set", nargs=2, multiple=True, help="Set configuration value (e.g., --set runs 10)")
@click.option("--file", help="Configuration file path")
@click.pass_context
def config(ctx: click.Context, show: bool, init: bool, set: Any, file: Optional[str]) -> None:
    """Manage pess-solver configuration."""
    config_path = BenchConfig.get_config_path(file or ctx.obj.get("config_path"))
    config_obj = BenchConfig.load_from_file(config_path)

    if init:
        # Initialize with defaults
        default_config = BenchConfig()
        default_config.save_to_file(config_path)
        click.echo(f"Initialized configuration file at {config_path}")
        click.echo("Default configuration:")
        click.echo(json.dumps(default_config.to_dict(), indent=2))
        return

    if set:
        # Update configuration values
        for key, value in set:
            try:
                config_obj.set_value(key, value)
            except KeyError:
                click.echo(f"Warning: Unknown configuration key '{key}'", err=True)
            except ValueError as e:
                click.echo(f"Error: Invalid value for '{key}': {e}", err=True)
                ctx.exit(EXIT_USAGE)

        # Save updated config
        config_obj.save_to_file(config_path)
        click.echo(f"Updated configuration saved to {config_path}")

    # Show configuration
    if show or (not init and not set):
        click.echo(f"Configuration file: {config_path}")
        click.echo("Current configuration:")
        click.echo(json.dumps(config_obj.to_dict(), indent=2))


def main() -> None:
    """Entry point for the CLI."""
    try:
        cli(obj={})
    except Exception as e:
        click.echo(f"Fatal error: {e}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
