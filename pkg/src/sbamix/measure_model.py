"""
sbamix.measure_model
~~~~~~~~~~~~~~~~~~~~
Analytic probability measures on a one-dimensional domain.

A measure is a finite mixture of point masses and uniform segments.  The
operations here (CDF, partial mean, barycenter and quantile) are the only
things the SBA construction needs from a measure.

Example::

    from sbamix.measure_model import AnalyticMeasure

    g = AnalyticMeasure.uniform(0.0, 1.0)
    g.barycenter(0.0, 0.5)   # 0.25
    g.quantile(0.9)          # 0.9
"""

from __future__ import annotations

import bisect
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .exceptions import ModelConstructionError, ZeroMassUnboundedInterval

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

WEIGHT_TOLERANCE = 1e-12

# (u0, u1, x0, x1): the quantile function is affine from x0 to x1 on (u0, u1].
QuantilePiece = tuple[float, float, float, float]


# ---------------------------------------------------------------------------
# Domain
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Domain:
    """Closed interval of the extended real line a measure lives on."""

    lower: float = -math.inf
    upper: float = math.inf

    def __post_init__(self) -> None:
        if math.isnan(self.lower) or math.isnan(self.upper):
            raise ModelConstructionError("Domain bounds must not be NaN.")
        if not self.lower < self.upper:
            raise ModelConstructionError(
                f"Domain lower bound {self.lower} must be below upper bound {self.upper}."
            )

    @classmethod
    def real_line(cls) -> "Domain":
        return cls()

    @classmethod
    def half_line(cls, lower: float = 0.0) -> "Domain":
        return cls(lower=lower)

    @classmethod
    def unit_interval(cls) -> "Domain":
        return cls(0.0, 1.0)

    @property
    def kind(self) -> str:
        if math.isinf(self.lower) and math.isinf(self.upper):
            return "line"
        if math.isinf(self.lower) or math.isinf(self.upper):
            return "half-line"
        return "interval"

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper}


# ---------------------------------------------------------------------------
# Components
# ---------------------------------------------------------------------------

class ComponentKind(str, Enum):
    POINT_MASS = "point-mass"
    UNIFORM = "uniform-segment"


@dataclass(frozen=True)
class MeasureComponent:
    """A point mass at ``a`` (with ``a == b``) or a uniform law on ``[a, b]``."""

    kind: ComponentKind
    a: float
    b: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ModelConstructionError("Measure components need finite endpoints.")
        if self.kind is ComponentKind.POINT_MASS and self.a != self.b:
            raise ModelConstructionError("A point mass has a single location.")
        if self.kind is ComponentKind.UNIFORM and not self.a < self.b:
            raise ModelConstructionError(
                f"Uniform segment needs a < b, got [{self.a}, {self.b}]."
            )

    @classmethod
    def point_mass(cls, location: float) -> "MeasureComponent":
        return cls(ComponentKind.POINT_MASS, float(location), float(location))

    @classmethod
    def uniform(cls, a: float, b: float) -> "MeasureComponent":
        return cls(ComponentKind.UNIFORM, float(a), float(b))

    @property
    def location(self) -> float:
        return self.a

    @property
    def mean(self) -> float:
        return 0.5 * (self.a + self.b)

    def cdf(self, x: float) -> float:
        if self.kind is ComponentKind.POINT_MASS:
            return 1.0 if x >= self.a else 0.0
        if x <= self.a:
            return 0.0
        if x >= self.b:
            return 1.0
        return (x - self.a) / (self.b - self.a)

    def mass_in(self, lo: float, hi: float) -> float:
        """Mass of the half-open interval ``(lo, hi]``."""
        if self.kind is ComponentKind.POINT_MASS:
            return 1.0 if lo < self.a <= hi else 0.0
        left, right = max(lo, self.a), min(hi, self.b)
        if right <= left:
            return 0.0
        return (right - left) / (self.b - self.a)

    def moment_in(self, lo: float, hi: float) -> float:
        """Integral of ``x`` over ``(lo, hi]`` with respect to this component."""
        if self.kind is ComponentKind.POINT_MASS:
            return self.a if lo < self.a <= hi else 0.0
        left, right = max(lo, self.a), min(hi, self.b)
        if right <= left:
            return 0.0
        return (right - left) / (self.b - self.a) * 0.5 * (left + right)

    def to_dict(self) -> dict:
        if self.kind is ComponentKind.POINT_MASS:
            return {"kind": self.kind.value, "location": self.a}
        return {"kind": self.kind.value, "a": self.a, "b": self.b}


# ---------------------------------------------------------------------------
# AnalyticMeasure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnalyticMeasure:
    """
    Finite mixture of point masses and uniform segments on a ``Domain``.

    Intervals are half-open ``(a, b]`` throughout.  An interval whose left
    end sits at or below ``domain.lower`` is treated as starting at ``-inf``
    so that mass placed exactly on the lower bound is not lost.
    """

    domain: Domain
    components: tuple[tuple[float, MeasureComponent], ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        comps = tuple((float(w), c) for w, c in self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ModelConstructionError("A measure needs at least one component.")
        for w, c in comps:
            if not 0.0 < w <= 1.0:
                raise ModelConstructionError(f"Component weight {w} is outside (0, 1].")
            if not (self.domain.contains(c.a) and self.domain.contains(c.b)):
                raise ModelConstructionError(
                    f"Component {c.to_dict()} is not contained in the domain "
                    f"[{self.domain.lower}, {self.domain.upper}]."
                )
        total = math.fsum(w for w, _ in comps)
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            raise ModelConstructionError(f"Component weights sum to {total}, expected 1.")

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def point_mass(cls, location: float, domain: Domain | None = None) -> "AnalyticMeasure":
        return cls(domain or Domain(), ((1.0, MeasureComponent.point_mass(location)),))

    @classmethod
    def uniform(cls, a: float, b: float, domain: Domain | None = None) -> "AnalyticMeasure":
        return cls(domain or Domain(), ((1.0, MeasureComponent.uniform(a, b)),))

    @classmethod
    def atoms(
        cls,
        locations: Sequence[float],
        weights: Sequence[float] | None = None,
        domain: Domain | None = None,
    ) -> "AnalyticMeasure":
        """Discrete measure on ``locations``; equal weights unless given."""
        if weights is None:
            weights = [1.0 / len(locations)] * len(locations)
        return cls(
            domain or Domain(),
            tuple(
                (w, MeasureComponent.point_mass(x))
                for x, w in zip(locations, weights)
                if w > 0.0
            ),
        )

    @classmethod
    def mixture(
        cls,
        entries: Iterable[tuple[float, MeasureComponent]],
        domain: Domain | None = None,
    ) -> "AnalyticMeasure":
        return cls(domain or Domain(), tuple(entries))

    # ------------------------------------------------------------------
    # Basic functionals
    # ------------------------------------------------------------------

    @property
    def mean(self) -> float:
        return math.fsum(w * c.mean for w, c in self.components)

    def cdf(self, x: float) -> float:
        """Right-continuous CDF; ``-inf`` maps to 0 and ``+inf`` to 1."""
        if x == -math.inf:
            return 0.0
        if x == math.inf:
            return 1.0
        value = math.fsum(w * c.cdf(x) for w, c in self.components)
        return min(max(value, 0.0), 1.0)

    def _left(self, a: float) -> float:
        return -math.inf if a <= self.domain.lower else a

    def mass(self, a: float, b: float) -> float:
        """Mass of ``(a, b]``."""
        _check_interval(a, b)
        lo = self._left(a)
        return math.fsum(w * c.mass_in(lo, b) for w, c in self.components)

    def partial_mean(self, a: float, b: float) -> float:
        """Integral of ``x`` over ``(a, b]``; zero when the interval is massless."""
        _check_interval(a, b)
        lo = self._left(a)
        return math.fsum(w * c.moment_in(lo, b) for w, c in self.components)

    def support_hull(self, a: float, b: float) -> tuple[float, float]:
        """
        Smallest closed interval holding the support inside ``(a, b]``.

        Raises:
            ValueError: The interval carries no mass.
        """
        _check_interval(a, b)
        lo = self._left(a)
        ends = [
            (max(lo, c.a), min(b, c.b)) if c.kind is ComponentKind.UNIFORM else (c.a, c.a)
            for _, c in self.components
            if c.mass_in(lo, b) > 0.0
        ]
        if not ends:
            raise ValueError(f"Interval ({a}, {b}] carries no mass.")
        return min(e[0] for e in ends), max(e[1] for e in ends)

    def barycenter(self, a: float, b: float) -> float:
        """
        Conditional mean of the measure on ``(a, b]``.

        A massless interval falls back to its left endpoint, or to the
        domain's finite lower bound when ``a`` is ``-inf``.  The result is
        clamped into the hull of the support inside the interval, so a cell
        holding a single atom returns that atom exactly.

        Raises:
            ZeroMassUnboundedInterval: Massless interval with no finite left end.
        """
        _check_interval(a, b)
        mass = self.mass(a, b)
        if mass > 0.0:
            lo, hi = self.support_hull(a, b)
            if lo == hi:
                return lo
            value = self.partial_mean(a, b) / mass
            return min(max(value, lo), hi)
        if math.isfinite(a):
            return a
        if math.isfinite(self.domain.lower):
            return self.domain.lower
        raise ZeroMassUnboundedInterval(
            f"Interval ({a}, {b}] carries no mass and has no finite left endpoint."
        )

    # ------------------------------------------------------------------
    # Quantiles
    # ------------------------------------------------------------------

    def quantile_pieces(self) -> list[QuantilePiece]:
        """
        Piecewise-affine description of the quantile function on ``(0, 1]``.

        Atoms give flat pieces (``x0 == x1``); uniform mass between two
        breakpoints gives a rising piece.  Pieces are contiguous and the
        last one ends at exactly 1.
        """
        points = sorted({c.a for _, c in self.components} | {c.b for _, c in self.components})
        pieces: list[QuantilePiece] = []
        u = 0.0
        for i, x in enumerate(points):
            jump = math.fsum(
                w for w, c in self.components
                if c.kind is ComponentKind.POINT_MASS and c.a == x
            )
            if jump > 0.0:
                pieces.append((u, u + jump, x, x))
                u += jump
            if i + 1 < len(points):
                nxt = points[i + 1]
                spread = math.fsum(
                    w * c.mass_in(x, nxt) for w, c in self.components
                    if c.kind is ComponentKind.UNIFORM
                )
                if spread > 0.0:
                    pieces.append((u, u + spread, x, nxt))
                    u += spread
        u0, _, x0, x1 = pieces[-1]
        pieces[-1] = (u0, 1.0, x0, x1)
        return pieces

    def quantile(self, u: float) -> float:
        """Generalised inverse ``inf{x : F(x) >= u}`` for ``u`` in ``(0, 1]``."""
        if not 0.0 < u <= 1.0:
            raise ValueError(f"Quantile level {u} is outside (0, 1].")
        return quantile_from_pieces(self.quantile_pieces(), u)

    def to_dict(self) -> dict:
        return {
            "domain": self.domain.to_dict(),
            "components": [
                {"weight": w, **c.to_dict()} for w, c in self.components
            ],
        }


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def quantile_from_pieces(pieces: Sequence[QuantilePiece], u: float) -> float:
    """Evaluate a piecewise-affine quantile function at ``u``."""
    ends = [p[1] for p in pieces]
    idx = min(bisect.bisect_left(ends, u), len(pieces) - 1)
    u0, u1, x0, x1 = pieces[idx]
    if x0 == x1 or u1 <= u0:
        return x0
    t = min(max((u - u0) / (u1 - u0), 0.0), 1.0)
    return x0 + t * (x1 - x0)


def _check_interval(a: float, b: float) -> None:
    if math.isnan(a) or math.isnan(b) or a > b:
        raise ValueError(f"Invalid interval ({a}, {b}].")


def cdf(measure: AnalyticMeasure, x: float) -> float:
    return measure.cdf(x)


def partial_mean(measure: AnalyticMeasure, a: float, b: float) -> float:
    return measure.partial_mean(a, b)


def barycenter(measure: AnalyticMeasure, a: float, b: float) -> float:
    return measure.barycenter(a, b)


def quantile(measure: AnalyticMeasure, u: float) -> float:
    return measure.quantile(u)
