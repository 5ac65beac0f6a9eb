"""Overlap distances, elastic energy, gradient, density and feasibility.

All lengths are measured in units of the packed sphere radius (r = 1).
The elastic energy of a solution is

    E = sum_{i<j} O_ij^2 + sum_i O_i0^2,
    O_ij = max(0, 2 - |c_i - c_j|),  O_i0 = max(0, |c_i| + 1 - R).

``energy_gradient`` returns the gradient itself, so a descent step is
``x - alpha * grad``.

The brute-force routines here enumerate every pair and are the reference
for the neighbor-restricted evaluation in :mod:`pess_solver.packing.neighbors`.
"""

import logging
import math
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np

from .models import (
    ContainerViolation,
    EnergyReport,
    FeasibilityReport,
    PairViolation,
    Solution,
)

logger = logging.getLogger(__name__)

# Separations below this are treated as coincident.
SINGULAR_DISTANCE = 1e-12
DEFAULT_GEOM_TOL = 1e-9

_FALLBACK_DIRECTION = np.array([1.0, 0.0, 0.0])


def pair_overlap(a: Sequence[float], b: Sequence[float]) -> float:
    """Overlap depth ``max(0, 2 - |a - b|)`` of two unit spheres."""
    diff = np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)
    return max(0.0, 2.0 - math.sqrt(float(np.dot(diff, diff))))


def container_overlap(a: Sequence[float], radius: float) -> float:
    """Protrusion ``max(0, |a| + 1 - R)`` of a unit sphere out of the container."""
    c = np.asarray(a, dtype=np.float64)
    return max(0.0, math.sqrt(float(np.dot(c, c))) + 1.0 - radius)


@lru_cache(maxsize=64)
def all_pairs(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Index arrays of every pair ``i < j`` in lexicographic order."""
    first, second = np.triu_indices(n, k=1)
    first.setflags(write=False)
    second.setflags(write=False)
    return first, second


def _unit_rows(vectors: np.ndarray, norms: np.ndarray) -> np.ndarray:
    units = np.empty_like(vectors)
    regular = norms >= SINGULAR_DISTANCE
    units[regular] = vectors[regular] / norms[regular, None]
    units[~regular] = _FALLBACK_DIRECTION
    return units


def pair_terms(
    centers: np.ndarray, first: np.ndarray, second: np.ndarray
) -> Tuple[float, float, np.ndarray]:
    """Pair part of the elastic energy restricted to the listed pairs.

    Args:
        centers: ``(n, 3)`` sphere centers.
        first: Indices ``i`` of the pairs to include.
        second: Indices ``j`` of the pairs to include (``i < j``).

    Returns:
        ``(value, max_overlap, grad)`` where ``grad`` has shape ``(n, 3)``.
    """
    grad = np.zeros_like(centers)
    if first.size == 0:
        return 0.0, 0.0, grad
    diff = centers[first] - centers[second]
    dist = np.sqrt(np.sum(diff * diff, axis=1))
    overlap = 2.0 - dist
    active = overlap > 0.0
    if not np.any(active):
        return 0.0, 0.0, grad
    depth = overlap[active]
    value = float(np.dot(depth, depth))
    # dE/dc_i = -2 O_ij (c_i - c_j) / l_ij, and the opposite for c_j.
    push = (-2.0 * depth)[:, None] * _unit_rows(diff[active], dist[active])
    np.add.at(grad, first[active], push)
    np.add.at(grad, second[active], -push)
    return value, float(depth.max()), grad


def container_terms(
    centers: np.ndarray, radius: float
) -> Tuple[float, float, np.ndarray, float]:
    """Container part of the elastic energy.

    Returns:
        ``(value, max_overlap, grad, d_radius)``; ``d_radius`` is the
        derivative with respect to the container radius.
    """
    norms = np.sqrt(np.sum(centers * centers, axis=1))
    overlap = norms + 1.0 - radius
    active = overlap > 0.0
    grad = np.zeros_like(centers)
    if not np.any(active):
        return 0.0, 0.0, grad, 0.0
    depth = overlap[active]
    grad[active] = (2.0 * depth)[:, None] * _unit_rows(centers[active], norms[active])
    return float(np.dot(depth, depth)), float(depth.max()), grad, float(-2.0 * depth.sum())


def energy(s: Solution) -> EnergyReport:
    """Total elastic energy of a solution by enumerating every pair."""
    centers = s.layout.centers
    pair_value, pair_max, _ = pair_terms(centers, *all_pairs(s.n))
    wall_value, wall_max, _, _ = container_terms(centers, s.radius)
    return EnergyReport(
        total=pair_value + wall_value,
        max_pair_overlap=pair_max,
        max_container_overlap=wall_max,
    )


def energy_gradient(s: Solution) -> np.ndarray:
    """Analytic gradient of the elastic energy as a flat ``3n`` vector."""
    centers = s.layout.centers
    _, _, pair_grad = pair_terms(centers, *all_pairs(s.n))
    _, _, wall_grad, _ = container_terms(centers, s.radius)
    return (pair_grad + wall_grad).reshape(-1)


def density(s: Solution) -> float:
    """Volume fraction ``n r^3 / R^3`` occupied by the unit spheres."""
    return s.n / s.radius**3


def check_feasible(s: Solution, geom_tol: float = DEFAULT_GEOM_TOL) -> FeasibilityReport:
    """Check non-overlap and containment within ``geom_tol``.

    Args:
        s: Solution to check.
        geom_tol: Allowed slack on every constraint.

    Returns:
        FeasibilityReport listing every violating pair and sphere.
    """
    if geom_tol < 0:
        raise ValueError(f"geom_tol must be non-negative, got {geom_tol}")
    centers = s.layout.centers
    first, second = all_pairs(s.n)
    diff = centers[first] - centers[second]
    dist = np.sqrt(np.sum(diff * diff, axis=1))
    bad_pairs = np.nonzero(dist < 2.0 - geom_tol)[0]
    norms = np.sqrt(np.sum(centers * centers, axis=1))
    bad_spheres = np.nonzero(norms + 1.0 > s.radius + geom_tol)[0]

    report = FeasibilityReport(
        feasible=bad_pairs.size == 0 and bad_spheres.size == 0,
        geom_tol=geom_tol,
        pair_violations=[
            PairViolation(int(first[k]), int(second[k]), float(2.0 - dist[k])) for k in bad_pairs
        ],
        container_violations=[
            ContainerViolation(int(i), float(norms[i] + 1.0 - s.radius)) for i in bad_spheres
        ],
    )
    if not report.feasible:
        logger.debug(
            f"Infeasible at tol={geom_tol:g}: {len(report.pair_violations)} pair and "
            f"{len(report.container_violations)} container violations"
        )
    return report
