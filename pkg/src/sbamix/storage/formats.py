"""
sbamix.storage.formats
~~~~~~~~~~~~~~~~~~~~~~
Plain-text readers and writers.  Every float is written with 17
significant digits so files read back bit-for-bit.

Array file::

    domain <lower> <upper>
    <row 1>
    <row 2>
    ...

one space-separated row per line.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from ..config import settings
from ..exceptions import ConfigParseError, DomainError, InvalidArray
from ..measure_model import Domain
from ..metrics import DensityBand
from ..random_measures import JointDiscreteMeasure
from ..sba import BarycenterArray, DiscreteMeasure, validate_sba

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

FLOAT_FMT = f"%.{settings.float_digits}g"


def fmt(x: float) -> str:
    return FLOAT_FMT % x


# ---------------------------------------------------------------------------
# Barycenter arrays
# ---------------------------------------------------------------------------

def write_array(path: Path, array: BarycenterArray) -> None:
    lines = [f"domain {fmt(array.domain.lower)} {fmt(array.domain.upper)}"]
    lines += [" ".join(fmt(v) for v in row) for row in array.rows]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_array(path: Path, tolerance: float | None = 1e-12) -> BarycenterArray:
    """
    Parse an array file; with ``tolerance`` set, reject invalid arrays.

    Raises:
        ConfigParseError: The file is malformed (the message names the line).
        InvalidArray: The array fails validation.
    """
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("domain"):
        raise ConfigParseError(f"{path}:1: expected 'domain <lower> <upper>'.")
    try:
        _, lower, upper = lines[0].split()
        domain = Domain(float(lower), float(upper))
    except ValueError as exc:
        raise ConfigParseError(f"{path}:1: malformed domain line.", cause=exc) from exc
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            rows.append(np.array([float(tok) for tok in line.split()]))
        except ValueError as exc:
            raise ConfigParseError(f"{path}:{lineno}: non-numeric entry.", cause=exc) from exc
    array = BarycenterArray(domain, tuple(rows))
    if tolerance is not None:
        violations = validate_sba(array, tolerance)
        if violations:
            raise InvalidArray(f"{path}: invalid array: {violations[0]}", violations=violations)
    return array


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

def write_discrete(path: Path, measure: DiscreteMeasure) -> None:
    table = np.column_stack([measure.atoms, measure.weights])
    np.savetxt(path, table, fmt=FLOAT_FMT, delimiter=",", header="atom,weight", comments="")


def read_discrete(path: Path) -> DiscreteMeasure:
    table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return DiscreteMeasure(table[:, 0], table[:, 1])


def write_matrix(path: Path, matrix: np.ndarray, header: Iterable[str] | None = None) -> None:
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    head = ",".join(header) if header is not None else ""
    np.savetxt(path, matrix, fmt=FLOAT_FMT, delimiter=",", header=head, comments="")


def read_matrix(path: Path) -> np.ndarray:
    """Read a numeric CSV matrix, skipping a header line when there is one."""
    text = Path(path).read_text(encoding="utf-8").splitlines()
    skip = 1 if text and not _is_numeric_row(text[0]) else 0
    return np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2)


def write_density(path: Path, grid: np.ndarray, density: np.ndarray) -> None:
    """Density draws with the grid as the header row."""
    write_matrix(path, density, header=(fmt(x) for x in grid))


def read_density(path: Path) -> tuple[np.ndarray, np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        grid = np.array([float(tok) for tok in fh.readline().split(",")])
    return grid, np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def write_band(path: Path, band: DensityBand) -> None:
    table = np.column_stack([band.grid, band.mean, band.lo, band.hi])
    np.savetxt(path, table, fmt=FLOAT_FMT, delimiter=",", header="x,mean,lo,hi", comments="")


def read_band(path: Path, prob: float = 0.95) -> DensityBand:
    table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return DensityBand(table[:, 0], table[:, 1], table[:, 2], table[:, 3], prob)


def _is_numeric_row(line: str) -> bool:
    try:
        [float(tok) for tok in line.split(",") if tok.strip()]
    except ValueError:
        return False
    return True


def read_data(path: Path) -> np.ndarray:
    """
    Single-column observation CSV with an optional header line.  Lines
    starting with ``#`` are comments.

    Raises:
        DomainError: A row is not a single number.
    """
    lines = [ln.strip() for ln in Path(path).read_text(encoding="utf-8").splitlines()]
    values = []
    header_seen = False
    for lineno, line in enumerate(lines, start=1):
        if not line or line.startswith("#"):
            continue
        try:
            values.append(float(line.split(",")[0]))
        except ValueError as exc:
            if not values and not header_seen:
                header_seen = True
                continue
            raise DomainError(f"{path}:{lineno}: {line!r} is not a number.", cause=exc) from exc
    return np.array(values, dtype=float)


# ---------------------------------------------------------------------------
# JSON lines
# ---------------------------------------------------------------------------

def write_mixing(
    path: Path,
    snapshots: Iterable[JointDiscreteMeasure],
    means: Iterable[float] | None = None,
) -> int:
    """Write one JSON object per snapshot; returns the count written."""
    count = 0
    means_iter = iter(means) if means is not None else None
    with open(path, "w", encoding="utf-8") as fh:
        for snap in snapshots:
            record = snap.to_dict()
            record["mean"] = next(means_iter) if means_iter is not None else snap.mean
            fh.write(json.dumps(record) + "\n")
            count += 1
    return count


def iter_mixing(path: Path) -> Iterator[JointDiscreteMeasure]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rec = json.loads(line)
                yield JointDiscreteMeasure(rec["theta"], rec["phi"], rec["weight"])


def write_json(path: Path, payload: dict) -> None:
    text = json.dumps(payload, indent=2, default=_json_default)
    Path(path).write_text(text + "\n", encoding="utf-8")


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")
