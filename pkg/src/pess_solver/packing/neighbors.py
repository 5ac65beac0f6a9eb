"""Neighbor sets for fast elastic-energy evaluation.

``Γ(i)`` holds every sphere whose center lies strictly closer than the
cutoff to sphere ``i``. With a cutoff of at least 2, every overlapping pair
is a neighbor pair, so the energy and its gradient only need the pairs in
the index instead of all ``n(n-1)/2``.
"""

import logging
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .geometry import container_terms, pair_terms
from .models import EnergyReport, Layout, Solution

logger = logging.getLogger(__name__)

DEFAULT_CUTOFF = 4.0

_EMPTY = np.empty(0, dtype=np.intp)


@dataclass(frozen=True, eq=False)
class NeighborIndex:
    """Immutable neighbor sets in canonical (sorted) form.

    Attributes:
        cutoff: Distance below which two spheres are neighbors.
        built_for_n: Number of spheres the index was built for.
        indptr: CSR row pointers, ``Γ(i) = indices[indptr[i]:indptr[i + 1]]``.
        indices: Concatenated neighbor lists, each sorted ascending.
        first: ``i`` of every neighbor pair with ``i < j``, lexicographic order.
        second: ``j`` of every neighbor pair.
    """

    cutoff: float
    built_for_n: int
    indptr: np.ndarray
    indices: np.ndarray
    first: np.ndarray
    second: np.ndarray

    def neighbors(self, i: int) -> Tuple[int, ...]:
        """Sorted neighbor indices of sphere ``i``."""
        return tuple(int(j) for j in self.indices[self.indptr[i] : self.indptr[i + 1]])

    @property
    def lists(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(self.neighbors(i) for i in range(self.built_for_n))

    @property
    def pair_count(self) -> int:
        return int(self.first.size)


def _centers_of(layout: Union[Layout, np.ndarray]) -> np.ndarray:
    if isinstance(layout, Layout):
        return layout.centers
    return np.asarray(layout, dtype=np.float64).reshape(-1, 3)


def _from_pairs(n: int, cutoff: float, first: np.ndarray, second: np.ndarray) -> NeighborIndex:
    order = np.lexsort((second, first))
    first, second = first[order], second[order]
    owners = np.concatenate([first, second])
    members = np.concatenate([second, first])
    row_order = np.lexsort((members, owners))
    indptr = np.zeros(n + 1, dtype=np.intp)
    np.cumsum(np.bincount(owners, minlength=n), out=indptr[1:])
    for arr in (first, second, indptr):
        arr.setflags(write=False)
    indices = members[row_order]
    indices.setflags(write=False)
    return NeighborIndex(
        cutoff=cutoff,
        built_for_n=n,
        indptr=indptr,
        indices=indices,
        first=first,
        second=second,
    )


def build(layout: Union[Layout, np.ndarray], cutoff: float = DEFAULT_CUTOFF) -> NeighborIndex:
    """Build neighbor sets with a sweep along the x axis.

    Spheres are sorted by x once; each sphere is then paired only with the
    spheres that follow it in that order while their x separation stays
    below the cutoff, and the full Euclidean distance decides membership.
    The result equals the all-pairs definition ``l_ij < cutoff``.

    Args:
        layout: Layout or ``(n, 3)`` / flat ``3n`` array of centers.
        cutoff: Neighbor distance threshold (strict).

    Returns:
        NeighborIndex for the layout.
    """
    if not cutoff > 0:
        raise ValueError(f"cutoff must be positive, got {cutoff}")
    centers = _centers_of(layout)
    n = centers.shape[0]

    order = np.argsort(centers[:, 0], kind="stable")
    xs = centers[order, 0]
    # Pad the window by a few ulps so rounding in x never drops a true pair.
    reach = xs + cutoff + 4.0 * np.finfo(np.float64).eps * (np.abs(xs) + cutoff)
    stop = np.searchsorted(xs, reach, side="right")
    counts = np.maximum(stop - np.arange(1, n + 1), 0)
    total = int(counts.sum())
    if total == 0:
        return _from_pairs(n, cutoff, _EMPTY, _EMPTY)

    lead = np.repeat(np.arange(n), counts)
    step = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    a = order[lead]
    b = order[lead + 1 + step]
    diff = centers[a] - centers[b]
    keep = np.sqrt(np.sum(diff * diff, axis=1)) < cutoff
    a, b = a[keep], b[keep]
    return _from_pairs(n, cutoff, np.minimum(a, b), np.maximum(a, b))


def same_structure(a: NeighborIndex, b: NeighborIndex) -> bool:
    """True when every neighbor list of ``a`` equals that of ``b``."""
    if a.built_for_n != b.built_for_n:
        raise ValueError(
            f"Cannot compare neighbor indices for {a.built_for_n} and {b.built_for_n} spheres"
        )
    return np.array_equal(a.indptr, b.indptr) and np.array_equal(a.indices, b.indices)


def _check_size(s: Solution, idx: NeighborIndex) -> None:
    if idx.built_for_n != s.n:
        raise ValueError(f"Neighbor index built for {idx.built_for_n} spheres, solution has {s.n}")


def energy_with_neighbors(s: Solution, idx: NeighborIndex) -> EnergyReport:
    """Elastic energy counting only neighbor pairs (each pair once).

    Equals :func:`geometry.energy` as long as no pair outside the index
    overlaps; a stale index understates the energy.
    """
    _check_size(s, idx)
    centers = s.layout.centers
    pair_value, pair_max, _ = pair_terms(centers, idx.first, idx.second)
    wall_value, wall_max, _, _ = container_terms(centers, s.radius)
    return EnergyReport(
        total=pair_value + wall_value,
        max_pair_overlap=pair_max,
        max_container_overlap=wall_max,
    )


def gradient_with_neighbors(s: Solution, idx: NeighborIndex) -> np.ndarray:
    """Neighbor-restricted elastic gradient as a flat ``3n`` vector."""
    _check_size(s, idx)
    centers = s.layout.centers
    _, _, pair_grad = pair_terms(centers, idx.first, idx.second)
    _, _, wall_grad, _ = container_terms(centers, s.radius)
    return (pair_grad + wall_grad).reshape(-1)
