"""Solution-space Exploring and Descent (SED) at a fixed container radius.

SED looks for a zero-energy layout: it descends from a random layout, then
repeatedly perturbs the current layout ``m`` times, descends from every
perturbation and moves to one of the resulting candidates. The number of
candidates grows as the energy falls,

    J(x) = ceil(-c * log2(E(x))),   m = max(1, J(x)),

so good layouts are explored more thoroughly than poor ones.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Iterator, List, Optional

import numpy as np

from .lbfgs import OptimizerSettings, minimize
from .models import Layout, Solution
from .neighbors import build, energy_with_neighbors
from .objectives import ElasticObjective

logger = logging.getLogger(__name__)

DEFAULT_EXPLORATION_CAP = 600


@dataclass
class SedSettings:
    """SED parameters.

    Attributes:
        s_iter: Maximum number of perturb-descend-select iterations.
        c: Exploration coefficient of ``J``.
        theta: Half-width of the uniform coordinate perturbation.
        feasible_energy: Energy at or below which a layout counts as feasible.
        exploration_cap: Upper bound on the candidates of one iteration.
    """

    s_iter: int = 700
    c: float = 7.0
    theta: float = 0.8
    feasible_energy: float = 1e-25
    exploration_cap: int = DEFAULT_EXPLORATION_CAP

    def __post_init__(self) -> None:
        for name in ("s_iter", "c", "theta", "feasible_energy", "exploration_cap"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value}")


@dataclass(eq=False)
class Candidate:
    """A locally minimized layout and its elastic energy at the search radius."""

    layout: Layout
    energy: float


@dataclass(eq=False)
class CandidateSet:
    """Candidates produced in one exploration round."""

    members: List[Candidate]

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("A candidate set needs at least one member")

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[Candidate]:
        return iter(self.members)

    def __getitem__(self, i: int) -> Candidate:
        return self.members[i]

    @property
    def energies(self) -> np.ndarray:
        return np.array([m.energy for m in self.members], dtype=np.float64)


@dataclass(frozen=True)
class SedStep:
    """State after one SED iteration."""

    iteration: int
    energy: float
    best_energy: float
    m: int


@dataclass(eq=False)
class SedResult:
    """Lowest-energy layout found by :func:`sed`.

    Attributes:
        layout: Best layout.
        energy: Its elastic energy at the search radius.
        feasible: Whether ``energy`` reached the feasibility threshold.
        iterations: Completed SED iterations.
        timed_out: Whether the deadline stopped the search.
        trace: One :class:`SedStep` per completed iteration.
    """

    layout: Layout
    energy: float
    feasible: bool
    iterations: int = 0
    timed_out: bool = False
    trace: List[SedStep] = field(default_factory=list)


def exploration_score(e: float, c: float = 7.0) -> float:
    """``J = ceil(-c * log2(e))``; ``inf`` for ``e <= 0``."""
    if e <= 0:
        return math.inf
    return float(math.ceil(-c * math.log2(e)))


def exploration_count(e: float, c: float = 7.0, cap: int = DEFAULT_EXPLORATION_CAP) -> int:
    """Number of candidates ``m = max(1, J(e))``, clamped to ``cap``.

    Args:
        e: Energy of the current layout.
        c: Exploration coefficient.
        cap: Largest count returned; also the value for ``e <= 0``.

    Returns:
        Candidate count in ``[1, cap]``.
    """
    score = exploration_score(e, c)
    if score >= cap:
        return int(cap)
    return max(1, int(score))


def perturb(layout: Layout, theta: float, rng: np.random.Generator) -> Layout:
    """Shift every coordinate by an independent ``uniform(-theta, theta)`` draw."""
    if not theta > 0:
        raise ValueError(f"theta must be positive, got {theta}")
    shift = rng.uniform(-theta, theta, size=layout.centers.shape)
    return Layout(layout.centers + shift)


def select(
    current: Candidate,
    candidates: CandidateSet,
    c: float,
    rng: np.random.Generator,
    cap: int = DEFAULT_EXPLORATION_CAP,
) -> Candidate:
    """Pick the next current layout.

    Returns the lowest-energy candidate (first on ties) when it improves on
    ``current``; otherwise samples a candidate with probability proportional
    to ``exp(J)``.
    """
    energies = candidates.energies
    best = int(np.argmin(energies))
    if energies[best] < current.energy:
        return candidates[best]

    scores = np.array([min(exploration_score(e, c), float(cap)) for e in energies])
    weights = np.exp(scores - scores.max())
    probabilities = weights / weights.sum()
    return candidates[int(rng.choice(len(candidates), p=probabilities))]


def random_layout(n: int, radius: float, rng: np.random.Generator) -> Layout:
    """Centers drawn uniformly from the ball of radius ``max(radius - 1, 0)``.

    Uses rejection sampling from the enclosing cube; overlaps are allowed.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    ball = max(radius - 1.0, 0.0)
    if ball == 0.0:
        return Layout(np.zeros((n, 3)))

    accepted: List[np.ndarray] = []
    count = 0
    while count < n:
        # The ball fills ~52% of the cube.
        draw = rng.uniform(-ball, ball, size=(2 * (n - count) + 8, 3))
        inside = draw[np.einsum("ij,ij->i", draw, draw) <= ball * ball]
        accepted.append(inside)
        count += inside.shape[0]
    return Layout(np.concatenate(accepted)[:n])


def _descend(layout: Layout, radius: float, opt: OptimizerSettings) -> Candidate:
    objective = ElasticObjective(layout.n, radius)
    x, _ = minimize(objective, layout.as_vector(), opt)
    result = Layout.from_vector(x)
    # A fresh index is exact for every overlapping pair.
    energy = energy_with_neighbors(Solution(result, radius), build(result, opt.cutoff)).total
    return Candidate(result, energy)


def _expired(deadline: Optional[float]) -> bool:
    return deadline is not None and time.monotonic() >= deadline


def sed(
    n: int,
    radius: float,
    settings: Optional[SedSettings] = None,
    opt: Optional[OptimizerSettings] = None,
    rng: Optional[np.random.Generator] = None,
    deadline: Optional[float] = None,
    start: Optional[Layout] = None,
) -> SedResult:
    """Search for a zero-energy layout of ``n`` unit spheres in radius ``radius``.

    Every round draws one child seed per candidate before any descent runs,
    so results depend only on the generator state, not on evaluation order.

    Args:
        n: Number of spheres.
        radius: Fixed container radius.
        settings: SED parameters.
        opt: Optimizer settings for every local descent.
        rng: Random stream; a fresh unseeded one when omitted.
        deadline: ``time.monotonic()`` value after which no new candidate is
            started.
        start: Initial layout instead of a random one.

    Returns:
        SedResult with the lowest-energy layout found.
    """
    settings = settings or SedSettings()
    opt = opt or OptimizerSettings()
    rng = rng if rng is not None else np.random.default_rng()
    if start is not None and start.n != n:
        raise ValueError(f"Start layout has {start.n} spheres, expected {n}")

    initial = start.copy() if start is not None else random_layout(n, radius, rng)
    current = _descend(initial, radius, opt)
    best = current
    result = SedResult(layout=best.layout, energy=best.energy, feasible=False)

    for iteration in range(settings.s_iter):
        if best.energy <= settings.feasible_energy:
            break
        if _expired(deadline):
            result.timed_out = True
            break

        m = exploration_count(current.energy, settings.c, settings.exploration_cap)
        seeds = rng.integers(0, 2**63, size=m)
        members: List[Candidate] = []
        for k in range(m):
            if k > 0 and _expired(deadline):
                result.timed_out = True
                break
            trial = perturb(current.layout, settings.theta, np.random.default_rng(int(seeds[k])))
            members.append(_descend(trial, radius, opt))

        current = select(current, CandidateSet(members), settings.c, rng, settings.exploration_cap)
        if current.energy < best.energy:
            best = current
        result.trace.append(SedStep(iteration, current.energy, best.energy, m))
        result.iterations = iteration + 1
        logger.debug(
            f"SED n={n} R={radius:.6f} iteration {iteration}: m={m}, "
            f"E={current.energy:.3e}, best={best.energy:.3e}"
        )
        if result.timed_out:
            break

    result.layout = best.layout
    result.energy = best.energy
    result.feasible = best.energy <= settings.feasible_energy
    return result
