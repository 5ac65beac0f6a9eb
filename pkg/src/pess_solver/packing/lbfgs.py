"""L-BFGS minimizer with adaptive neighbor maintenance (ANM).

The optimizer keeps a neighbor index for objectives that support one and
decides when to reconstruct it with a deferring counter ``cnt`` and a
deferring length ``len``:

    after every accepted step: cnt += 1
    when cnt >= len:            build a new index
        index changed  ->  cnt = 0, len = len_reset, adopt the new index
        index unchanged ->  cnt = 0, len = len_factor * len

so a stable layout checks its neighbors at exponentially growing intervals
and an unstable one checks them every iteration.
"""

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Deque, List, Optional, Sequence, Tuple, Union

import numpy as np

from .base import Objective
from .exceptions import ObjectiveError
from .neighbors import DEFAULT_CUTOFF, NeighborIndex, build, same_structure

logger = logging.getLogger(__name__)

WOLFE_C1 = 1e-4
WOLFE_C2 = 0.9
MAX_BRACKET_STEPS = 25
MAX_ZOOM_STEPS = 30
MAX_STEP = 1e10
CURVATURE_EPS = 1e-12
FALLBACK_MAX_STEP = 0.1
FALLBACK_HALVINGS = 50

HistoryPair = Tuple[np.ndarray, np.ndarray]
# (alpha, value, gradient, directional derivative) at one trial step
TrialPoint = Tuple[float, float, np.ndarray, float]


class MaintenancePolicy(str, Enum):
    """When the optimizer reconstructs its neighbor index."""

    ADAPTIVE = "adaptive"  # ANM: defer while the neighbor sets stay the same
    EVERY_ITERATION = "every-iteration"  # brute force: rebuild after every step
    FIXED_INTERVAL = "fixed-interval"  # rebuild every len_reset steps

    @classmethod
    def normalize(cls, policy: Union[str, "MaintenancePolicy"]) -> "MaintenancePolicy":
        """Normalize a policy name to a MaintenancePolicy."""
        if isinstance(policy, MaintenancePolicy):
            return policy
        key = policy.lower().strip().replace("_", "-")
        if key in ("adaptive", "anm"):
            return cls.ADAPTIVE
        if key in ("every-iteration", "every", "brute", "brute-force"):
            return cls.EVERY_ITERATION
        if key in ("fixed-interval", "fixed", "periodic"):
            return cls.FIXED_INTERVAL
        raise ValueError(
            f"Unknown maintenance policy: {policy}. "
            f"Expected one of: {', '.join(p.value for p in cls)}"
        )


@dataclass
class OptimizerSettings:
    """Knobs of :func:`minimize`.

    Attributes:
        max_iter: Iteration cap.
        grad_tol: Stop when the gradient norm falls to this value.
        memory: Number of curvature pairs kept by L-BFGS.
        cutoff: Neighbor distance threshold passed to index builds.
        len_reset: Deferring length after a changed index (the rebuild
            interval under ``FIXED_INTERVAL``).
        len_factor: Growth factor of the deferring length while the index
            stays unchanged.
        policy: Neighbor maintenance policy.
    """

    max_iter: int = 10_000
    grad_tol: float = 1e-12
    memory: int = 7
    cutoff: float = DEFAULT_CUTOFF
    len_reset: int = 1
    len_factor: float = 2.0
    policy: MaintenancePolicy = MaintenancePolicy.ADAPTIVE

    def __post_init__(self) -> None:
        self.policy = MaintenancePolicy.normalize(self.policy)
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be positive, got {self.max_iter}")
        if not self.grad_tol > 0:
            raise ValueError(f"grad_tol must be positive, got {self.grad_tol}")
        if self.memory < 1:
            raise ValueError(f"memory must be at least 1, got {self.memory}")
        if not self.cutoff > 0:
            raise ValueError(f"cutoff must be positive, got {self.cutoff}")
        if self.len_reset < 1:
            raise ValueError(f"len_reset must be at least 1, got {self.len_reset}")
        if not self.len_factor > 1:
            raise ValueError(f"len_factor must exceed 1, got {self.len_factor}")
        if self.cutoff < 2:
            logger.warning(f"cutoff {self.cutoff} < 2 cannot see every overlapping pair")

    @property
    def initial_length(self) -> int:
        if self.policy is MaintenancePolicy.EVERY_ITERATION:
            return 1
        return self.len_reset

    @property
    def safe_drift(self) -> float:
        """Displacement since the last rebuild below which a stale index is exact."""
        return (self.cutoff - 2.0) / 2.0


@dataclass
class AnmState:
    """Deferring counter ``cnt`` and deferring length ``length``."""

    cnt: int = 0
    length: int = 1

    @property
    def due(self) -> bool:
        return self.cnt >= self.length

    def advance(self) -> None:
        self.cnt += 1

    def record_check(self, changed: bool, settings: OptimizerSettings) -> None:
        """Update counter and length after a maintenance check."""
        self.cnt = 0
        if settings.policy is not MaintenancePolicy.ADAPTIVE or changed:
            self.length = settings.initial_length
        else:
            self.length = int(math.ceil(self.length * settings.len_factor))


@dataclass
class OptimizeReport:
    """Counters collected by one :func:`minimize` call."""

    iterations: int = 0
    rebuilds: int = 0
    maintenance_checks: int = 0
    final_value: float = math.nan
    final_grad_norm: float = math.nan
    converged: bool = False
    stalled: bool = False
    line_search_failures: int = 0
    length_history: List[int] = field(default_factory=list)
    max_drift: float = 0.0
    drift_warnings: int = 0

    @property
    def deferring_ratio(self) -> float:
        """``1 - N_rec / N_iter``; 0 when no iteration ran."""
        if self.iterations == 0:
            return 0.0
        return 1.0 - self.rebuilds / self.iterations


@dataclass
class LineSearchResult:
    alpha: float
    value: float
    gradient: np.ndarray
    success: bool
    evaluations: int


def _evaluate(
    objective: Objective, x: np.ndarray, index: Optional[NeighborIndex], iteration: Optional[int]
) -> Tuple[float, np.ndarray]:
    value, grad = objective.evaluate(x, index)
    if not math.isfinite(value) or not np.all(np.isfinite(grad)):
        raise ObjectiveError(f"Objective returned a non-finite value ({value})", iteration)
    return float(value), grad


def two_loop_recursion(history: Sequence[HistoryPair], g: np.ndarray) -> np.ndarray:
    """Search direction ``-H g`` from the stored curvature pairs.

    Args:
        history: ``(s, y)`` pairs, oldest first, each with ``s.y > 0``.
        g: Current gradient.

    Returns:
        The L-BFGS descent direction.
    """
    q = np.array(g, dtype=np.float64)
    coefficients: List[Tuple[float, float]] = []
    for s, y in reversed(history):
        rho = 1.0 / float(y @ s)
        a = rho * float(s @ q)
        q -= a * y
        coefficients.append((rho, a))

    gamma = 1.0
    if history:
        s, y = history[-1]
        gamma = float(s @ y) / float(y @ y)
    r = gamma * q

    for (s, y), (rho, a) in zip(history, reversed(coefficients)):
        b = rho * float(y @ r)
        r += (a - b) * s
    return -r


def _cubic_minimizer(
    a1: float, f1: float, g1: float, a2: float, f2: float, g2: float, lower: float, upper: float
) -> float:
    # Minimizer of the cubic through (a1, f1, g1) and (a2, f2, g2), kept in [lower, upper].
    if a1 == a2:
        return 0.5 * (lower + upper)
    d1 = g1 + g2 - 3.0 * (f1 - f2) / (a1 - a2)
    disc = d1 * d1 - g1 * g2
    if disc < 0:
        return 0.5 * (lower + upper)
    d2 = math.copysign(math.sqrt(disc), a2 - a1)
    denom = g2 - g1 + 2.0 * d2
    if denom == 0:
        return 0.5 * (lower + upper)
    candidate = a2 - (a2 - a1) * (g2 + d2 - d1) / denom
    if not math.isfinite(candidate):
        return 0.5 * (lower + upper)
    return min(max(candidate, lower), upper)


def line_search(
    objective: Objective,
    x: np.ndarray,
    d: np.ndarray,
    g: np.ndarray,
    value: Optional[float] = None,
    index: Optional[NeighborIndex] = None,
    alpha0: float = 1.0,
    c1: float = WOLFE_C1,
    c2: float = WOLFE_C2,
) -> LineSearchResult:
    """Find a step satisfying the strong Wolfe conditions along ``d``.

    Brackets an acceptable step by doubling, then zooms in with safeguarded
    cubic interpolation.

    Args:
        objective: Objective to search along.
        x: Current point.
        d: Descent direction (``g.d < 0``).
        g: Gradient at ``x``.
        value: Objective value at ``x`` (evaluated if omitted).
        index: Neighbor index used for every evaluation.
        alpha0: First trial step.
        c1: Sufficient-decrease constant.
        c2: Curvature constant.

    Returns:
        LineSearchResult; on failure ``success`` is False and ``alpha`` is the
        lowest-value step seen (0 when nothing decreased the objective).
    """
    slope0 = float(g @ d)
    if not slope0 < 0:
        raise ValueError(f"Search direction is not a descent direction (g.d = {slope0})")
    evaluations = 0
    if value is None:
        value, _ = _evaluate(objective, x, index, None)
        evaluations += 1

    def phi(alpha: float) -> Tuple[float, np.ndarray, float]:
        nonlocal evaluations
        evaluations += 1
        f, grad = _evaluate(objective, x + alpha * d, index, None)
        return f, grad, float(grad @ d)

    best_alpha, best_f, best_g = 0.0, value, g

    def result(alpha: float, f: float, grad: np.ndarray, success: bool) -> LineSearchResult:
        return LineSearchResult(alpha, f, grad, success, evaluations)

    def zoom(lo: TrialPoint, hi: TrialPoint) -> LineSearchResult:
        nonlocal best_alpha, best_f, best_g
        for _ in range(MAX_ZOOM_STEPS):
            a_lo, f_lo, _, s_lo = lo
            a_hi, f_hi, _, s_hi = hi
            left, right = min(a_lo, a_hi), max(a_lo, a_hi)
            width = right - left
            if width <= 1e-16 * max(1.0, right):
                break
            alpha = _cubic_minimizer(
                a_lo, f_lo, s_lo, a_hi, f_hi, s_hi, left + 0.1 * width, right - 0.1 * width
            )
            f, grad, slope = phi(alpha)
            if f < best_f:
                best_alpha, best_f, best_g = alpha, f, grad
            if f > value + c1 * alpha * slope0 or f >= f_lo:
                hi = (alpha, f, grad, slope)
            else:
                if abs(slope) <= -c2 * slope0:
                    return result(alpha, f, grad, True)
                if slope * (a_hi - a_lo) >= 0:
                    hi = lo
                lo = (alpha, f, grad, slope)
        return result(best_alpha, best_f, best_g, False)

    prev: TrialPoint = (0.0, value, g, slope0)
    alpha = alpha0
    for i in range(MAX_BRACKET_STEPS):
        f, grad, slope = phi(alpha)
        current = (alpha, f, grad, slope)
        if f < best_f:
            best_alpha, best_f, best_g = alpha, f, grad
        if f > value + c1 * alpha * slope0 or (i > 0 and f >= prev[1]):
            return zoom(prev, current)
        if abs(slope) <= -c2 * slope0:
            return result(alpha, f, grad, True)
        if slope >= 0:
            return zoom(current, prev)
        prev = current
        alpha = min(2.0 * alpha, MAX_STEP)
    return result(best_alpha, best_f, best_g, False)


def _fallback_step(
    objective: Objective,
    x: np.ndarray,
    value: float,
    g: np.ndarray,
    index: Optional[NeighborIndex],
    iteration: int,
) -> Optional[Tuple[np.ndarray, float, np.ndarray]]:
    # Backtracking steepest descent with the displacement capped at FALLBACK_MAX_STEP.
    gnorm_sq = float(g @ g)
    if not gnorm_sq > 0:
        return None
    alpha = min(1.0, FALLBACK_MAX_STEP / math.sqrt(gnorm_sq))
    for _ in range(FALLBACK_HALVINGS):
        x_try = x - alpha * g
        f_try, g_try = _evaluate(objective, x_try, index, iteration)
        if f_try < value - WOLFE_C1 * alpha * gnorm_sq:
            return x_try, f_try, g_try
        alpha *= 0.5
    return None


def _max_displacement(centers: np.ndarray, anchor: np.ndarray) -> float:
    delta = centers - anchor
    return float(np.sqrt(np.max(np.sum(delta * delta, axis=1), initial=0.0)))


def minimize(
    objective: Objective, x0: np.ndarray, settings: Optional[OptimizerSettings] = None
) -> Tuple[np.ndarray, OptimizeReport]:
    """Minimize ``objective`` from ``x0`` with L-BFGS and neighbor maintenance.

    Each iteration computes the two-loop direction, runs a strong Wolfe line
    search, takes the step, advances the deferring counter, runs the
    maintenance check when it is due, and finally tests convergence on the
    gradient norm. Identical inputs give identical outputs.

    Args:
        objective: Objective to minimize.
        x0: Starting point (not modified).
        settings: Optimizer settings; defaults to :class:`OptimizerSettings`.

    Returns:
        Tuple of the final point and an :class:`OptimizeReport`.

    Raises:
        ValueError: If ``x0`` has the wrong size or non-finite entries.
        ObjectiveError: If the objective produces NaN or Inf.
    """
    settings = settings or OptimizerSettings()
    x = np.array(x0, dtype=np.float64).reshape(-1)
    if x.size != objective.dimension:
        raise ValueError(f"x0 has {x.size} components, objective expects {objective.dimension}")
    if not np.all(np.isfinite(x)):
        raise ValueError("x0 must be finite")
    objective.project(x)

    report = OptimizeReport()
    tracking = objective.uses_neighbors
    index: Optional[NeighborIndex] = None
    anchor: Optional[np.ndarray] = None
    if tracking:
        index = build(objective.centers(x), settings.cutoff)
        anchor = objective.centers(x).copy()
    state = AnmState(length=settings.initial_length)
    history: Deque[HistoryPair] = deque(maxlen=settings.memory)

    f, g = _evaluate(objective, x, index, 0)
    gnorm = math.sqrt(float(g @ g))
    report.converged = gnorm <= settings.grad_tol

    for k in range(settings.max_iter):
        if report.converged:
            break
        d = two_loop_recursion(history, g)
        if not float(g @ d) < 0:
            d = -g
            history.clear()
            if not float(g @ d) < 0:
                # g.g underflowed; no usable descent direction is left.
                report.stalled = True
                logger.debug(f"Gradient too small to search along at iteration {k}; stopping")
                break

        step = line_search(objective, x, d, g, f, index)
        if step.success:
            x_new = x + step.alpha * d
            f_new, g_new = step.value, step.gradient
        else:
            report.line_search_failures += 1
            history.clear()
            fallback = _fallback_step(objective, x, f, g, index, k)
            if fallback is None:
                report.stalled = True
                logger.debug(f"No descent possible at iteration {k} (|g| = {gnorm:.3e}); stopping")
                break
            x_new, f_new, g_new = fallback

        if objective.project(x_new):
            history.clear()
            f_new, g_new = _evaluate(objective, x_new, index, k)
        else:
            s = x_new - x
            y = g_new - g
            if float(s @ y) > CURVATURE_EPS * float(np.linalg.norm(s) * np.linalg.norm(y)):
                history.append((s, y))
        x, f, g = x_new, f_new, g_new
        report.iterations += 1
        state.advance()

        if tracking:
            assert index is not None and anchor is not None
            centers = objective.centers(x)
            drift = _max_displacement(centers, anchor)
            report.max_drift = max(report.max_drift, drift)
            if drift > settings.safe_drift and settings.policy is not MaintenancePolicy.EVERY_ITERATION:
                if report.drift_warnings == 0:
                    logger.warning(
                        f"Sphere moved {drift:.3f} since the last neighbor rebuild "
                        f"(safe bound {settings.safe_drift:.3f}); energy may be understated"
                    )
                report.drift_warnings += 1
            if state.due:
                report.maintenance_checks += 1
                report.length_history.append(state.length)
                candidate = build(centers, settings.cutoff)
                changed = not same_structure(index, candidate)
                # Baseline policies adopt every build; ANM only a changed one.
                if changed or settings.policy is not MaintenancePolicy.ADAPTIVE:
                    report.rebuilds += 1
                    index = candidate
                    anchor = centers.copy()
                if changed:
                    f, g = _evaluate(objective, x, index, k)
                state.record_check(changed, settings)

        gnorm = math.sqrt(float(g @ g))
        if gnorm <= settings.grad_tol:
            report.converged = True

    report.final_value = f
    report.final_grad_norm = float(np.linalg.norm(g))
    logger.debug(
        f"minimize: {report.iterations} iterations, {report.rebuilds} rebuilds, "
        f"f = {f:.3e}, |g| = {report.final_grad_norm:.3e}, converged = {report.converged}"
    )
    return x, report
