"""Reading and writing solution files and the benchmark CSV files.

Solution file (UTF-8, LF line endings)::

    n R
    x_1 y_1 z_1
    ...
    x_n y_n z_n

with every real printed at 17 significant digits, enough to round-trip a
double exactly.
"""

import csv
import logging
import math
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Union

import numpy as np

from ..packing.exceptions import SolutionFormatError
from ..packing.models import Layout, Solution
from .models import AnmExperimentRow, DensityRow, RecordsTable, RunRecord

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

RECORDS_COLUMNS = ["n", "radius"]
SUMMARY_COLUMNS = [
    "n",
    "r_best",
    "r_avg",
    "delta_best",
    "delta_avg",
    "hr",
    "rr",
    "density_best",
    "time_to_best_s",
    "seed_base",
    "runs",
]
ANM_COLUMNS = [
    "n",
    "runs",
    "avg_runtime_anm_s",
    "avg_runtime_brute_s",
    "runtime_ratio",
    "avg_deferring_ratio",
]
DENSITY_COLUMNS = ["n", "density_best", "density_record"]


def format_real(value: float) -> str:
    """Format a real at 17 significant digits, trailing zeros kept."""
    return f"{float(value):.16e}"


def solution_filename(n: int, run: int) -> str:
    return f"pess_n{n:04d}_run{run:02d}.txt"


def write_solution(path: PathLike, s: Solution) -> Path:
    """Write ``s`` in the solution file format; parent directories are created."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"{s.n} {format_real(s.radius)}"]
    lines += [" ".join(format_real(v) for v in row) for row in s.layout.centers]
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")
    logger.debug(f"Wrote solution for n={s.n} to {path}")
    return path


def _reals(tokens: Sequence[str], path: str, line: int) -> List[float]:
    try:
        values = [float(t) for t in tokens]
    except ValueError:
        raise SolutionFormatError(f"expected real numbers, got {' '.join(tokens)!r}", path, line)
    if not all(math.isfinite(v) for v in values):
        raise SolutionFormatError("coordinates must be finite", path, line)
    return values


def read_solution(path: PathLike) -> Solution:
    """Parse a solution file.

    Raises:
        SolutionFormatError: On any malformed line, with its line number.
    """
    name = str(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = f.read().splitlines()
    except (OSError, UnicodeDecodeError) as e:
        raise SolutionFormatError(f"cannot read file: {e}", name)

    # Trailing blank lines are tolerated; blank lines elsewhere are not.
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise SolutionFormatError("empty file", name, 1)

    header = lines[0].split()
    if len(header) != 2:
        raise SolutionFormatError(f"header must be 'n R', got {lines[0]!r}", name, 1)
    try:
        n = int(header[0])
    except ValueError:
        raise SolutionFormatError(f"sphere count must be an integer, got {header[0]!r}", name, 1)
    if n < 1:
        raise SolutionFormatError(f"sphere count must be positive, got {n}", name, 1)
    (radius,) = _reals(header[1:], name, 1)
    if radius <= 0:
        raise SolutionFormatError(f"container radius must be positive, got {radius}", name, 1)

    if len(lines) - 1 != n:
        raise SolutionFormatError(
            f"expected {n} coordinate lines, found {len(lines) - 1}", name, min(len(lines), n + 2)
        )
    centers = np.empty((n, 3))
    for i, text in enumerate(lines[1:]):
        tokens = text.split()
        if len(tokens) != 3:
            raise SolutionFormatError(f"expected 'x y z', got {text!r}", name, i + 2)
        centers[i] = _reals(tokens, name, i + 2)
    return Solution(Layout(centers), radius)


def _read_rows(path: PathLike, columns: Sequence[str]) -> List[Dict[str, str]]:
    name = str(path)
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            reader = csv.DictReader(f)
            missing = [c for c in columns if c not in (reader.fieldnames or [])]
            if missing:
                raise SolutionFormatError(f"missing columns: {', '.join(missing)}", name, 1)
            return list(reader)
    except OSError as e:
        raise SolutionFormatError(f"cannot read file: {e}", name)


def _write_rows(path: PathLike, columns: Sequence[str], rows: Iterable[Dict[str, str]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return path


def read_records(path: PathLike) -> RecordsTable:
    """Load best-known radii from a ``n,radius`` CSV file."""
    table: RecordsTable = {}
    for line, row in enumerate(_read_rows(path, RECORDS_COLUMNS), start=2):
        try:
            n = int(row["n"])
            radius = float(row["radius"])
        except (TypeError, ValueError):
            raise SolutionFormatError(f"malformed record {row}", str(path), line)
        if n < 1 or not radius > 0 or not math.isfinite(radius):
            raise SolutionFormatError(f"invalid record n={n} radius={radius}", str(path), line)
        if n in table:
            raise SolutionFormatError(f"duplicate record for n={n}", str(path), line)
        table[n] = radius
    return table


def write_records(path: PathLike, table: RecordsTable) -> Path:
    rows = ({"n": str(n), "radius": format_real(r)} for n, r in sorted(table.items()))
    return _write_rows(path, RECORDS_COLUMNS, rows)


def read_summary(path: PathLike) -> List[RunRecord]:
    """Load every row of a summary CSV file."""
    records: List[RunRecord] = []
    for line, row in enumerate(_read_rows(path, SUMMARY_COLUMNS), start=2):
        try:
            records.append(RunRecord.from_row(row))
        except (TypeError, ValueError) as e:
            raise SolutionFormatError(f"malformed summary row: {e}", str(path), line)
    return records


def append_summary(path: PathLike, record: RunRecord) -> Path:
    """Append one row to a summary CSV, writing the header for a new file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    is_new = not path.exists() or path.stat().st_size == 0
    with open(path, "a", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=SUMMARY_COLUMNS, lineterminator="\n")
        if is_new:
            writer.writeheader()
        writer.writerow(record.to_row())
    return path


def write_anm_rows(path: PathLike, rows: Sequence[AnmExperimentRow]) -> Path:
    return _write_rows(path, ANM_COLUMNS, (r.to_row() for r in rows))


def write_density_rows(path: PathLike, rows: Sequence[DensityRow]) -> Path:
    return _write_rows(path, DENSITY_COLUMNS, (r.to_row() for r in rows))
