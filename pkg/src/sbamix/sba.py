"""
sbamix.sba
~~~~~~~~~~
Sequential barycenter arrays: construction from a measure, validation and
inversion back to the level-n discrete approximation.

Rows are indexed from 1.  Row ``j`` holds ``2**j - 1`` interior entries and,
when extended with the domain bounds, ``2**j + 1`` values::

    ext(j) = [lower, mu(j, 1), ..., mu(j, 2**j - 1), upper]

so that ``mu(j, 0)`` and ``mu(j, 2**j)`` are the bounds.  An array of depth
``n`` carries rows ``1 .. n + 1``; the bottom row supplies the atoms and the
rows above it the weights.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import InvalidArray, ModelConstructionError
from .measure_model import AnalyticMeasure, Domain, QuantilePiece, quantile_from_pieces

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

MAX_DEPTH = 20
WEIGHT_TOLERANCE = 1e-12


# ---------------------------------------------------------------------------
# BarycenterArray
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BarycenterArray:
    """Triangular array of depth ``n`` (rows ``1 .. n + 1``) on a domain."""

    domain: Domain
    rows: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        rows = tuple(np.array(r, dtype=float).reshape(-1) for r in self.rows)
        if len(rows) < 2:
            raise ModelConstructionError("A barycenter array needs depth >= 1 (two rows).")
        if len(rows) - 1 > MAX_DEPTH:
            raise ModelConstructionError(
                f"Depth {len(rows) - 1} exceeds the supported maximum of {MAX_DEPTH}."
            )
        for j, row in enumerate(rows, start=1):
            if row.size != 2 ** j - 1:
                raise ModelConstructionError(
                    f"Row {j} has {row.size} entries, expected {2 ** j - 1}."
                )
            row.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def depth(self) -> int:
        return len(self.rows) - 1

    def row(self, j: int) -> np.ndarray:
        return self.rows[j - 1]

    def extended_row(self, j: int) -> np.ndarray:
        """Row ``j`` with the domain bounds attached; row 0 is ``[lower, upper]``."""
        bounds_lo, bounds_hi = self.domain.lower, self.domain.upper
        if j == 0:
            return np.array([bounds_lo, bounds_hi])
        return np.concatenate(([bounds_lo], self.rows[j - 1], [bounds_hi]))

    def extended_rows(self) -> list[np.ndarray]:
        return [self.extended_row(j) for j in range(self.depth + 2)]

    def node(self, j: int, k: int) -> float:
        """Entry ``mu(j, k)`` with ``k = 0`` and ``k = 2**j`` naming the bounds."""
        if not 0 <= k <= 2 ** j:
            raise IndexError(f"Index k={k} is out of range for row {j}.")
        return float(self.extended_row(j)[k])

    def to_dict(self) -> dict:
        return {
            "domain": self.domain.to_dict(),
            "rows": [r.tolist() for r in self.rows],
        }


# ---------------------------------------------------------------------------
# DiscreteMeasure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely supported measure: strictly increasing atoms with weights."""

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        atoms = np.array(self.atoms, dtype=float).reshape(-1)
        weights = np.array(self.weights, dtype=float).reshape(-1)
        if atoms.size == 0 or atoms.size != weights.size:
            raise ModelConstructionError("Atoms and weights must be non-empty and aligned.")
        if np.any(np.diff(atoms) <= 0):
            raise ModelConstructionError("Atoms must be strictly increasing.")
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > WEIGHT_TOLERANCE:
            raise ModelConstructionError("Weights must be non-negative and sum to 1.")
        atoms.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_atoms(cls, atoms: Sequence[float], weights: Sequence[float]) -> "DiscreteMeasure":
        """Sort, merge coincident atoms and drop zero-weight ones."""
        atoms = np.asarray(atoms, dtype=float).reshape(-1)
        weights = np.asarray(weights, dtype=float).reshape(-1)
        keep = weights > 0.0
        atoms, weights = atoms[keep], weights[keep]
        order = np.argsort(atoms, kind="stable")
        uniq, inverse = np.unique(atoms[order], return_inverse=True)
        merged = np.bincount(inverse, weights=weights[order], minlength=uniq.size)
        return cls(uniq, merged)

    def __len__(self) -> int:
        return int(self.atoms.size)

    @property
    def mean(self) -> float:
        return math.fsum(self.atoms * self.weights)

    def cdf(self, x: float) -> float:
        return float(min(self.weights[self.atoms <= x].sum(), 1.0))

    def quantile_pieces(self) -> list[QuantilePiece]:
        ends = np.cumsum(self.weights)
        ends[-1] = 1.0
        starts = np.concatenate(([0.0], ends[:-1]))
        return [
            (float(u0), float(u1), float(x), float(x))
            for u0, u1, x in zip(starts, ends, self.atoms)
        ]

    def quantile(self, u: float) -> float:
        if not 0.0 < u <= 1.0:
            raise ValueError(f"Quantile level {u} is outside (0, 1].")
        return quantile_from_pieces(self.quantile_pieces(), u)

    def to_analytic(self, domain: Domain | None = None) -> AnalyticMeasure:
        return AnalyticMeasure.atoms(self.atoms.tolist(), self.weights.tolist(), domain)

    def to_dict(self) -> dict:
        return {"atoms": self.atoms.tolist(), "weights": self.weights.tolist()}


# ---------------------------------------------------------------------------
# Construction and validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    """
    One failed validity condition.

    ``condition`` is ``"i"`` (inheritance), ``"ii"`` (monotone rows) or
    ``"iii"`` (regularity of a triple).  ``index`` is the entry index for
    the first two and the triple index ``l`` for the third.
    """

    condition: str
    row: int
    index: int
    detail: str = ""

    def __str__(self) -> str:
        return f"({self.condition}) at row {self.row}, index {self.index}: {self.detail}"


def build_sba(measure: AnalyticMeasure, n: int) -> BarycenterArray:
    """
    Sequential barycenter array of ``measure`` with depth ``n``.

    Row 1 is the mean; row ``j + 1`` copies row ``j`` into its even slots
    and fills each odd slot with the barycenter of the cell between its
    neighbours.
    """
    if not 1 <= n <= MAX_DEPTH:
        raise ModelConstructionError(f"Depth must lie in [1, {MAX_DEPTH}], got {n}.")
    lower, upper = measure.domain.lower, measure.domain.upper
    ext = [lower, measure.barycenter(lower, upper), upper]
    rows = [np.array(ext[1:-1])]
    for j in range(2, n + 2):
        nxt = [lower]
        for left, right in zip(ext[:-1], ext[1:]):
            nxt.append(measure.barycenter(left, right))
            nxt.append(right)
        ext = nxt
        rows.append(np.array(ext[1:-1]))
    logger.debug("Built SBA of depth %d (%d bottom entries)", n, rows[-1].size)
    return BarycenterArray(measure.domain, tuple(rows))


def validate_sba(array: BarycenterArray, tolerance: float = 0.0) -> list[Violation]:
    """Check every validity condition and return all violations found."""
    violations: list[Violation] = []

    for j in range(1, array.depth + 2):
        row = array.row(j)
        for k in np.flatnonzero(~np.isfinite(row)):
            violations.append(Violation("ii", j, int(k) + 1, "entry is not finite"))
        ext = array.extended_row(j)
        for k in np.flatnonzero(ext[:-1] - ext[1:] > tolerance):
            violations.append(
                Violation("ii", j, int(k) + 1, f"{ext[k]!r} > {ext[k + 1]!r}")
            )

    for j in range(2, array.depth + 2):
        row, parent = array.row(j), array.row(j - 1)
        for l in np.flatnonzero(np.abs(row[1::2] - parent) > tolerance):
            violations.append(
                Violation(
                    "i", j, 2 * (int(l) + 1),
                    f"{row[2 * l + 1]!r} != parent {parent[l]!r}",
                )
            )
        left, mid, right = row[0::4], row[1::4], row[2::4]
        left_tied = np.abs(mid - left) <= tolerance
        right_tied = np.abs(right - mid) <= tolerance
        for l in np.flatnonzero(left_tied != right_tied):
            violations.append(
                Violation(
                    "iii", j, int(l) + 1,
                    f"triple ({left[l]!r}, {mid[l]!r}, {right[l]!r}) is one-sided",
                )
            )
    return violations


def is_regular(array: BarycenterArray, level: int) -> bool:
    """True when row ``level`` is strictly increasing."""
    if not 1 <= level <= array.depth + 1:
        raise IndexError(f"Level {level} is outside 1..{array.depth + 1}.")
    return bool(np.all(np.diff(array.row(level)) > 0))


def _require_valid(array: BarycenterArray, tolerance: float) -> None:
    violations = validate_sba(array, tolerance)
    if violations:
        raise InvalidArray(
            f"Array violates {len(violations)} validity condition(s); first: {violations[0]}",
            violations=violations,
        )


# ---------------------------------------------------------------------------
# Inversion
# ---------------------------------------------------------------------------

def cdf_levels(ext_rows: Sequence[np.ndarray]) -> list[np.ndarray]:
    """
    CDF values on extended rows ``0 .. n`` from extended rows ``0 .. n + 1``.

    Even slots inherit the parent value; odd slot ``2l - 1`` splits the
    parent cell's mass by the position of its barycenter between the two
    children below it.
    """
    depth = len(ext_rows) - 2
    levels = [np.array([0.0, 1.0])]
    for j in range(1, depth + 1):
        prev = levels[-1]
        below = ext_rows[j + 1]
        left, mid, right = below[1::4], below[2::4], below[3::4]
        span = right - left
        ratio = np.ones_like(span)
        np.divide(right - mid, span, out=ratio, where=span > 0)
        ratio = np.clip(ratio, 0.0, 1.0)
        lo, hi = prev[:-1], prev[1:]
        split = np.where(ratio == 1.0, hi, np.where(ratio == 0.0, lo, lo + (hi - lo) * ratio))
        cur = np.empty(2 ** j + 1)
        cur[0::2] = prev
        cur[1::2] = split
        levels.append(cur)
    return levels


def invert_cdf(array: BarycenterArray, tolerance: float = 0.0) -> dict[tuple[int, int], float]:
    """
    CDF of the represented measure at every entry of rows ``1 .. n``.

    Keys are ``(j, k)`` with ``k`` in ``0 .. 2**j``; the bounds map to 0 and 1.

    Raises:
        InvalidArray: The array is not valid.
    """
    _require_valid(array, tolerance)
    levels = cdf_levels(array.extended_rows())
    return {
        (j, k): float(value)
        for j, level in enumerate(levels) if j > 0
        for k, value in enumerate(level)
    }


def level_weights(ext_rows: Sequence[np.ndarray]) -> np.ndarray:
    """Cell probabilities at the deepest CDF level, clipped at zero."""
    return np.maximum(np.diff(cdf_levels(ext_rows)[-1]), 0.0)


def weights_level_n(array: BarycenterArray, tolerance: float = 0.0) -> np.ndarray:
    """Probabilities of the ``2**n`` cells of row ``n``."""
    _require_valid(array, tolerance)
    return level_weights(array.extended_rows())


def bottom_atoms(array: BarycenterArray) -> np.ndarray:
    """Odd entries of the bottom row: one representative per row-``n`` cell."""
    return np.array(array.row(array.depth + 1)[0::2])


def discrete_from_array(array: BarycenterArray, tolerance: float = 0.0) -> DiscreteMeasure:
    """The level-n discrete measure an array represents."""
    return DiscreteMeasure.from_atoms(bottom_atoms(array), weights_level_n(array, tolerance))


def approximate(measure: AnalyticMeasure, n: int) -> DiscreteMeasure:
    """Level-n SBA approximation of ``measure``; it preserves the mean."""
    return discrete_from_array(build_sba(measure, n))


def discrete_mean(measure: DiscreteMeasure) -> float:
    return measure.mean


def cells(array: BarycenterArray, level: int | None = None) -> list[tuple[float, float]]:
    """Half-open cells ``(mu(level, l - 1), mu(level, l)]`` of a row (default: row n)."""
    level = array.depth if level is None else level
    ext = array.extended_row(level)
    return [(float(a), float(b)) for a, b in zip(ext[:-1], ext[1:])]
