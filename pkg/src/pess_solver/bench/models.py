"""Data models for benchmark results."""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

# Best-known radius R*(n) per instance size.
RecordsTable = Dict[int, float]


def _number(value: float) -> str:
    return repr(float(value))


def _optional(value: Optional[float]) -> str:
    return "" if value is None else _number(value)


def _parse_optional(text: str) -> Optional[float]:
    text = text.strip()
    return None if text == "" else float(text)


@dataclass
class RunRecord:
    """Aggregate of independent runs on one instance.

    ``delta_*`` and ``rr`` are None when no best-known record exists for
    ``n``; they are never reported as zero in that case.
    """

    n: int
    runs: int
    r_best: float
    r_avg: float
    delta_best: Optional[float]
    delta_avg: Optional[float]
    hr: float
    rr: Optional[float]
    density_best: float
    time_to_best_s: float
    seed_base: int
    radii: List[float] = field(default_factory=list)
    seeds: List[int] = field(default_factory=list)
    times_to_best: List[float] = field(default_factory=list)

    def to_row(self) -> Dict[str, str]:
        """Summary CSV row."""
        return {
            "n": str(self.n),
            "r_best": _number(self.r_best),
            "r_avg": _number(self.r_avg),
            "delta_best": _optional(self.delta_best),
            "delta_avg": _optional(self.delta_avg),
            "hr": _number(self.hr),
            "rr": _optional(self.rr),
            "density_best": _number(self.density_best),
            "time_to_best_s": _number(self.time_to_best_s),
            "seed_base": str(self.seed_base),
            "runs": str(self.runs),
        }

    @classmethod
    def from_row(cls, row: Dict[str, str]) -> "RunRecord":
        """Create from a summary CSV row."""
        return cls(
            n=int(row["n"]),
            runs=int(row["runs"]),
            r_best=float(row["r_best"]),
            r_avg=float(row["r_avg"]),
            delta_best=_parse_optional(row["delta_best"]),
            delta_avg=_parse_optional(row["delta_avg"]),
            hr=float(row["hr"]),
            rr=_parse_optional(row["rr"]),
            density_best=float(row["density_best"]),
            time_to_best_s=float(row["time_to_best_s"]),
            seed_base=int(row["seed_base"]),
        )

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "n": self.n,
            "runs": self.runs,
            "r_best": self.r_best,
            "r_avg": self.r_avg,
            "delta_best": self.delta_best,
            "delta_avg": self.delta_avg,
            "hr": self.hr,
            "rr": self.rr,
            "density_best": self.density_best,
            "time_to_best_s": self.time_to_best_s,
            "seed_base": self.seed_base,
            "radii": list(self.radii),
            "seeds": list(self.seeds),
            "times_to_best": list(self.times_to_best),
        }


@dataclass
class AnmExperimentRow:
    """Paired runtime comparison of adaptive maintenance against a baseline."""

    n: int
    runs: int
    avg_runtime_anm_s: float
    avg_runtime_brute_s: float
    avg_deferring_ratio: float

    @property
    def runtime_ratio(self) -> float:
        if self.avg_runtime_brute_s <= 0:
            return math.nan
        return self.avg_runtime_anm_s / self.avg_runtime_brute_s

    def to_row(self) -> Dict[str, str]:
        return {
            "n": str(self.n),
            "runs": str(self.runs),
            "avg_runtime_anm_s": _number(self.avg_runtime_anm_s),
            "avg_runtime_brute_s": _number(self.avg_runtime_brute_s),
            "runtime_ratio": _number(self.runtime_ratio),
            "avg_deferring_ratio": _number(self.avg_deferring_ratio),
        }


class RecordStatus(str, Enum):
    """Classification of a found radius against the best-known record."""

    IMPROVED = "improved"
    EQUAL = "equal"
    WORSE = "worse"
    ABSENT = "absent"


@dataclass
class ComparisonRow:
    n: int
    r_best: Optional[float]
    record: Optional[float]
    status: RecordStatus

    @property
    def difference(self) -> Optional[float]:
        if self.r_best is None or self.record is None:
            return None
        return self.r_best - self.record


@dataclass
class ComparisonReport:
    """Per-instance classification with the Improved / Equal / Worse / Absent tally."""

    rows: List[ComparisonRow] = field(default_factory=list)

    @property
    def counts(self) -> Dict[RecordStatus, int]:
        tally = {status: 0 for status in RecordStatus}
        for row in self.rows:
            tally[row.status] += 1
        return tally


@dataclass
class DensityRow:
    n: int
    density_best: Optional[float]
    density_record: Optional[float]

    def to_row(self) -> Dict[str, str]:
        return {
            "n": str(self.n),
            "density_best": _optional(self.density_best),
            "density_record": _optional(self.density_record),
        }
