"""Container adjustment by penalty continuation.

The container radius becomes a variable: the optimizer minimizes

    U(z) = E(x, R) + lambda * R^2,   z = [x_1, y_1, z_1, ..., x_n, y_n, z_n, R]

for a geometrically decreasing ``lambda``. A large ``lambda`` squeezes the
container, a small one lets it relax until the overlaps vanish, leaving a
feasible layout at a locally minimal radius.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .geometry import check_feasible
from .lbfgs import OptimizerSettings, minimize
from .models import FeasibilityReport, Layout, Solution
from .objectives import PenalizedObjective

logger = logging.getLogger(__name__)

ADJUST_GEOM_TOL = 1e-7


@dataclass
class PenaltySchedule:
    """Geometric schedule ``lambda_k = lambda0 * factor**k``, ``k < rounds``."""

    lambda0: float = 1e-4
    factor: float = 0.5
    rounds: int = 35

    def __post_init__(self) -> None:
        if not self.lambda0 > 0:
            raise ValueError(f"lambda0 must be positive, got {self.lambda0}")
        if not 0 < self.factor < 1:
            raise ValueError(f"factor must lie in (0, 1), got {self.factor}")
        if self.rounds < 1:
            raise ValueError(f"rounds must be positive, got {self.rounds}")

    def lambdas(self) -> np.ndarray:
        return self.lambda0 * self.factor ** np.arange(self.rounds)

    @property
    def final_lambda(self) -> float:
        return float(self.lambdas()[-1])


@dataclass(eq=False)
class AdjustResult:
    """Outcome of :func:`adjust_container`.

    Attributes:
        solution: Adjusted solution with the snapped radius.
        feasible: Whether ``solution`` passed the feasibility check.
        report: The feasibility check itself.
        radius_history: Radius variable at the end of every penalty round.
        iterations: Optimizer iterations over all rounds.
    """

    solution: Solution
    feasible: bool
    report: FeasibilityReport
    radius_history: List[float] = field(default_factory=list)
    iterations: int = 0


def to_augmented(s: Solution) -> np.ndarray:
    """Join centers and radius into ``z`` (length ``3n + 1``)."""
    return np.append(s.layout.as_vector(), s.radius)


def from_augmented(z: np.ndarray) -> Solution:
    """Split ``z`` back into a solution."""
    z = np.asarray(z, dtype=np.float64)
    _check_length(z)
    return Solution(Layout.from_vector(z[:-1]), float(z[-1]))


def _check_length(z: np.ndarray) -> int:
    if z.ndim != 1 or z.size < 4 or (z.size - 1) % 3:
        raise ValueError(f"Augmented vector must have length 3n + 1, got shape {z.shape}")
    return (z.size - 1) // 3


def penalized_energy(z: np.ndarray, lam: float) -> Tuple[float, np.ndarray]:
    """Value and gradient of ``U = E + lam * R^2`` at ``z``."""
    z = np.asarray(z, dtype=np.float64)
    n = _check_length(z)
    return PenalizedObjective(n, lam).evaluate(z)


def adjust_container(
    s: Solution,
    schedule: Optional[PenaltySchedule] = None,
    opt: Optional[OptimizerSettings] = None,
    geom_tol: float = ADJUST_GEOM_TOL,
    deadline: Optional[float] = None,
) -> AdjustResult:
    """Shrink or grow the container until ``s`` is feasible at a locally minimal radius.

    Minimizes the penalized energy once per ``lambda`` in the schedule, each
    time starting from the previous optimum. The final radius is snapped to
    ``max |c_i| + 1``, the smallest container holding the final centers.

    Args:
        s: Starting solution; overlaps are allowed.
        schedule: Penalty schedule.
        opt: Optimizer settings for every round.
        geom_tol: Tolerance of the closing feasibility check.
        deadline: ``time.monotonic()`` value after which no further penalty
            round starts; the first round always runs.

    Returns:
        AdjustResult; ``feasible`` is False when the check fails, in which
        case the solution must not be recorded as a packing.
    """
    schedule = schedule or PenaltySchedule()
    opt = opt or OptimizerSettings()
    z = to_augmented(s)
    history: List[float] = []
    iterations = 0

    for k, lam in enumerate(schedule.lambdas()):
        if k > 0 and deadline is not None and time.monotonic() >= deadline:
            logger.debug(f"Deadline reached after {k} penalty rounds")
            break
        z, report = minimize(PenalizedObjective(s.n, float(lam)), z, opt)
        iterations += report.iterations
        history.append(float(z[-1]))
        logger.debug(
            f"Penalty round {k}: lambda={lam:.3e}, R={z[-1]:.12f}, "
            f"U={report.final_value:.3e}, iterations={report.iterations}"
        )

    centers = z[:-1].reshape(-1, 3)
    snapped = float(np.sqrt(np.max(np.sum(centers * centers, axis=1)))) + 1.0
    solution = Solution(Layout(centers), snapped)
    verdict = check_feasible(solution, geom_tol)
    if not verdict.feasible:
        logger.warning(
            f"Container adjustment for n={s.n} ended infeasible at R={snapped:.12f} "
            f"(worst violation {verdict.worst_violation:.3e})"
        )
    return AdjustResult(
        solution=solution,
        feasible=verdict.feasible,
        report=verdict,
        radius_history=history,
        iterations=iterations,
    )
