"""Top-level solve loop: initialize, then search and shrink until the budget runs out."""

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from .container import ADJUST_GEOM_TOL, AdjustResult, PenaltySchedule, adjust_container
from .exceptions import InfeasibleSolutionError
from .geometry import check_feasible, density
from .lbfgs import OptimizerSettings
from .models import Solution
from .sed import SedSettings, sed

logger = logging.getLogger(__name__)

DEFAULT_INIT_DENSITY = 0.6

# (largest n, seconds) pairs of the long-run budget schedule.
_LONG_RUN_BUDGETS = ((100, 2 * 3600.0), (200, 6 * 3600.0))
_LONG_RUN_MAX_BUDGET = 12 * 3600.0


def _clock_seed() -> int:
    return time.time_ns() & (2**64 - 1)


@dataclass
class SolveConfig:
    """Configuration of one :func:`solve` run.

    Attributes:
        n: Number of unit spheres.
        t_cut: Wall-clock budget in seconds.
        sed: SED parameters.
        schedule: Penalty schedule of the container adjustment.
        opt: Optimizer settings for every local descent.
        seed: 64-bit seed of the run's random stream; the clock when omitted.
        init_density: Density guess that sets the initial radius.
        radius_shrink_step: Search at ``R* * (1 - step)`` instead of ``R*``.
        max_rounds: Cap on outer-loop passes (None for budget only).
    """

    n: int
    t_cut: float
    sed: SedSettings = field(default_factory=SedSettings)
    schedule: PenaltySchedule = field(default_factory=PenaltySchedule)
    opt: OptimizerSettings = field(default_factory=OptimizerSettings)
    seed: Optional[int] = None
    init_density: float = DEFAULT_INIT_DENSITY
    radius_shrink_step: float = 0.0
    max_rounds: Optional[int] = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if not self.t_cut > 0:
            raise ValueError(f"t_cut must be positive, got {self.t_cut}")
        if not 0 < self.init_density < 1:
            raise ValueError(f"init_density must lie in (0, 1), got {self.init_density}")
        if not 0 <= self.radius_shrink_step < 1:
            raise ValueError(f"radius_shrink_step must lie in [0, 1), got {self.radius_shrink_step}")
        if self.max_rounds is not None and self.max_rounds < 0:
            raise ValueError(f"max_rounds must be non-negative, got {self.max_rounds}")
        if self.seed is None:
            self.seed = _clock_seed()
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(eq=False)
class SolveResult:
    """Best packing found by :func:`solve`.

    Attributes:
        best: Best feasible solution.
        best_radius: Its container radius ``R*``.
        iterations: Completed outer-loop passes.
        elapsed: Wall-clock seconds spent.
        time_to_best: Seconds until ``best`` was found.
        seed: Seed of the run.
        feasible: Whether ``best`` passed the feasibility check.
        radius_history: ``R*`` after initialization and after every pass.
    """

    best: Solution
    best_radius: float
    iterations: int
    elapsed: float
    time_to_best: float
    seed: int
    feasible: bool
    radius_history: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "n": self.best.n,
            "best_radius": self.best_radius,
            "density": density(self.best),
            "iterations": self.iterations,
            "elapsed": self.elapsed,
            "time_to_best": self.time_to_best,
            "seed": self.seed,
            "feasible": self.feasible,
            "radius_history": list(self.radius_history),
        }


def initial_radius(n: int, init_density: float = DEFAULT_INIT_DENSITY) -> float:
    """Radius at which ``n`` unit spheres fill the container to ``init_density``."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return float((n / init_density) ** (1.0 / 3.0))


def default_time_budget(n: int) -> float:
    """Long-run wall-clock budget in seconds for an instance of ``n`` spheres."""
    for largest, seconds in _LONG_RUN_BUDGETS:
        if n <= largest:
            return seconds
    return _LONG_RUN_MAX_BUDGET


def _search_and_adjust(
    radius: float,
    config: SolveConfig,
    rng: np.random.Generator,
    deadline: Optional[float] = None,
) -> AdjustResult:
    found = sed(config.n, radius, config.sed, config.opt, rng, deadline)
    return adjust_container(
        Solution(found.layout, radius), config.schedule, config.opt, deadline=deadline
    )


def initialize(
    n: int, config: SolveConfig, rng: Optional[np.random.Generator] = None
) -> Solution:
    """Build the first feasible packing of ``n`` spheres.

    Runs SED at the radius given by ``config.init_density`` and adjusts the
    container. An infeasible adjustment is retried once with a reseeded
    stream.

    Raises:
        InfeasibleSolutionError: If the retry is infeasible too.
    """
    if n != config.n:
        raise ValueError(f"Config is for n={config.n}, asked to initialize n={n}")
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    radius = initial_radius(n, config.init_density)
    logger.debug(f"Initializing n={n} at R={radius:.6f}")

    adjusted = _search_and_adjust(radius, config, rng)
    if adjusted.feasible:
        return adjusted.solution

    retry_seed = int(rng.integers(0, 2**63))
    logger.warning(f"Initial packing for n={n} is infeasible; retrying with seed {retry_seed}")
    adjusted = _search_and_adjust(radius, config, np.random.default_rng(retry_seed))
    if adjusted.feasible:
        return adjusted.solution
    raise InfeasibleSolutionError(
        f"Could not build a feasible initial packing for n={n} "
        f"(worst violation {adjusted.report.worst_violation:.3e})",
        adjusted.report,
    )


def solve(config: SolveConfig) -> SolveResult:
    """Search for the smallest container radius of ``config.n`` unit spheres.

    After initialization, every pass runs SED at the incumbent radius
    (optionally shrunk by ``radius_shrink_step``), adjusts the container
    and keeps the result when it is feasible with a smaller radius. Passes
    continue until the budget or ``max_rounds`` is exhausted; the deadline is
    also honored between SED candidates and between penalty rounds.

    Args:
        config: Run configuration.

    Returns:
        SolveResult with the best packing and timing metadata.
    """
    assert config.seed is not None
    start = time.monotonic()
    deadline = start + config.t_cut
    rng = np.random.default_rng(config.seed)

    best = initialize(config.n, config, rng)
    time_to_best = time.monotonic() - start
    history = [best.radius]
    logger.info(f"n={config.n} seed={config.seed}: initial R={best.radius:.12f}")

    rounds = 0
    while time.monotonic() < deadline:
        if config.max_rounds is not None and rounds >= config.max_rounds:
            break
        radius = best.radius * (1.0 - config.radius_shrink_step)
        adjusted = _search_and_adjust(radius, config, rng, deadline)
        rounds += 1
        if adjusted.feasible and adjusted.solution.radius < best.radius:
            best = adjusted.solution
            time_to_best = time.monotonic() - start
            logger.info(
                f"n={config.n} seed={config.seed}: improved R={best.radius:.12f} "
                f"after {rounds} rounds ({time_to_best:.1f}s)"
            )
        history.append(best.radius)

    elapsed = time.monotonic() - start
    logger.info(
        f"n={config.n} seed={config.seed}: finished with R={best.radius:.12f} "
        f"after {rounds} rounds in {elapsed:.1f}s"
    )
    return SolveResult(
        best=best,
        best_radius=best.radius,
        iterations=rounds,
        elapsed=elapsed,
        time_to_best=time_to_best,
        seed=config.seed,
        feasible=check_feasible(best, ADJUST_GEOM_TOL).feasible,
        radius_history=history,
    )
