"""Data models for packing layouts, solutions and evaluation reports."""

from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np


@dataclass(eq=False)
class Layout:
    """Centers of ``n`` unit spheres, stored as an ``(n, 3)`` float array.

    The flat ``3n`` view ``[x_1, y_1, z_1, ..., x_n, y_n, z_n]`` is the
    search variable of the fixed-radius problem.
    """

    centers: np.ndarray

    def __post_init__(self) -> None:
        centers = np.array(self.centers, dtype=np.float64)
        if centers.ndim == 1:
            if centers.size % 3:
                raise ValueError(f"Flat center vector length {centers.size} is not a multiple of 3")
            centers = centers.reshape(-1, 3)
        if centers.ndim != 2 or centers.shape[1] != 3 or centers.shape[0] < 1:
            raise ValueError(f"Expected centers of shape (n, 3) with n >= 1, got {centers.shape}")
        if not np.all(np.isfinite(centers)):
            raise ValueError("Layout coordinates must be finite")
        self.centers = centers

    @property
    def n(self) -> int:
        """Number of spheres."""
        return int(self.centers.shape[0])

    def as_vector(self) -> np.ndarray:
        """Return a flat copy of the coordinates."""
        return self.centers.reshape(-1).copy()

    @classmethod
    def from_vector(cls, x: np.ndarray) -> "Layout":
        """Build a layout from a flat ``3n`` coordinate vector."""
        return cls(np.asarray(x, dtype=np.float64).reshape(-1, 3))

    def copy(self) -> "Layout":
        return Layout(self.centers.copy())


@dataclass(eq=False)
class Solution:
    """A layout paired with a container radius ``R``."""

    layout: Layout
    radius: float

    def __post_init__(self) -> None:
        radius = float(self.radius)
        if not np.isfinite(radius) or radius <= 0:
            raise ValueError(f"Container radius must be positive and finite, got {self.radius}")
        self.radius = radius

    @property
    def n(self) -> int:
        return self.layout.n

    def to_dict(self) -> Dict[str, Any]:
        """Convert to a JSON-friendly dictionary."""
        return {
            "n": self.n,
            "radius": self.radius,
            "centers": self.layout.centers.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Solution":
        """Create from dictionary."""
        return cls(layout=Layout(np.asarray(data["centers"])), radius=data["radius"])


@dataclass(frozen=True)
class EnergyReport:
    """Total elastic energy with the largest pair and container overlaps."""

    total: float
    max_pair_overlap: float
    max_container_overlap: float


@dataclass(frozen=True)
class PairViolation:
    first: int
    second: int
    magnitude: float  # 2 - distance


@dataclass(frozen=True)
class ContainerViolation:
    sphere: int
    magnitude: float  # |c_i| + 1 - R


@dataclass
class FeasibilityReport:
    """Outcome of a geometric feasibility check.

    Indices are 0-based. The report is truthy exactly when the solution is
    feasible, so ``if check_feasible(s, tol):`` reads naturally.
    """

    feasible: bool
    geom_tol: float
    pair_violations: List[PairViolation] = field(default_factory=list)
    container_violations: List[ContainerViolation] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.feasible

    @property
    def worst_violation(self) -> float:
        magnitudes: List[float] = [v.magnitude for v in self.pair_violations]
        magnitudes += [v.magnitude for v in self.container_violations]
        return max(magnitudes, default=0.0)

    def describe(self, limit: int = 10) -> List[str]:
        """Human-readable violation lines (1-based sphere numbers)."""
        lines: List[str] = []
        for pv in self.pair_violations[:limit]:
            lines.append(f"pair ({pv.first + 1}, {pv.second + 1}) overlaps by {pv.magnitude:.3e}")
        for cv in self.container_violations[:limit]:
            lines.append(f"sphere {cv.sphere + 1} exceeds the container by {cv.magnitude:.3e}")
        hidden = len(self.pair_violations) + len(self.container_violations) - len(lines)
        if hidden > 0:
            lines.append(f"... and {hidden} more")
        return lines
