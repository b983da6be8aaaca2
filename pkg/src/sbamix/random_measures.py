"""
sbamix.random_measures
~~~~~~~~~~~~~~~~~~~~~~
Node laws, scale laws and the three random-measure priors built on random
barycenter arrays:

* ``sample_dsba``   - a random discrete measure of level ``n``
* ``sample_dsbasp`` - parsimonious location-scale mixing measure
* ``sample_dsbasg`` - general location-scale mixing measure

Each odd node ``mu(j, k)`` is drawn from its law restricted to the cell of
the row above that contains it; even nodes are copies of their parent.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

import numpy as np
from scipy import special, stats

from .exceptions import (
    DegenerateOutsideInterval,
    InvalidNodeLaw,
    ModelConstructionError,
)
from .measure_model import Domain
from .sba import BarycenterArray, DiscreteMeasure, MAX_DEPTH, bottom_atoms, level_weights

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())


# ---------------------------------------------------------------------------
# Node laws
# ---------------------------------------------------------------------------

class NodeLawKind(str, Enum):
    NORMAL = "normal"
    DEGENERATE = "degenerate"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class NodeLaw:
    """
    Prior law of one array node.

    ``normal`` uses ``(mean, sd)``, ``uniform`` uses ``(a, b)`` and
    ``degenerate`` is a point mass at ``value``.
    """

    kind: NodeLawKind
    mean: float = 0.0
    sd: float = 1.0
    a: float = 0.0
    b: float = 1.0
    value: float = 0.0

    def __post_init__(self) -> None:
        if self.kind is NodeLawKind.NORMAL and not (self.sd > 0 and math.isfinite(self.mean)):
            raise InvalidNodeLaw(f"Normal node law needs sd > 0, got sd={self.sd}.")
        if self.kind is NodeLawKind.UNIFORM and not self.a < self.b:
            raise InvalidNodeLaw(f"Uniform node law needs a < b, got [{self.a}, {self.b}].")
        if self.kind is NodeLawKind.DEGENERATE and not math.isfinite(self.value):
            raise InvalidNodeLaw("Degenerate node law needs a finite value.")

    @classmethod
    def normal(cls, mean: float, sd: float) -> "NodeLaw":
        return cls(NodeLawKind.NORMAL, mean=float(mean), sd=float(sd))

    @classmethod
    def uniform(cls, a: float, b: float) -> "NodeLaw":
        return cls(NodeLawKind.UNIFORM, a=float(a), b=float(b))

    @classmethod
    def degenerate(cls, value: float) -> "NodeLaw":
        return cls(NodeLawKind.DEGENERATE, value=float(value))

    @property
    def is_degenerate(self) -> bool:
        return self.kind is NodeLawKind.DEGENERATE

    def cdf(self, x: float) -> float:
        if self.kind is NodeLawKind.NORMAL:
            return float(special.ndtr((x - self.mean) / self.sd))
        if self.kind is NodeLawKind.UNIFORM:
            return float(np.clip((x - self.a) / (self.b - self.a), 0.0, 1.0))
        return 1.0 if x >= self.value else 0.0

    def logpdf(self, x: float) -> float:
        """Log density (with respect to Lebesgue measure) of a continuous law."""
        if self.kind is NodeLawKind.NORMAL:
            z = (x - self.mean) / self.sd
            return -0.5 * z * z - math.log(self.sd) - 0.5 * math.log(2.0 * math.pi)
        if self.kind is NodeLawKind.UNIFORM:
            return -math.log(self.b - self.a) if self.a <= x <= self.b else -math.inf
        raise InvalidNodeLaw("A degenerate node law has no density.")

    def log_mass(self, lo: float, hi: float) -> float:
        """Log probability of ``(lo, hi]``, stable in both normal tails."""
        if hi <= lo:
            return -math.inf
        if self.kind is NodeLawKind.NORMAL:
            alpha, beta = (lo - self.mean) / self.sd, (hi - self.mean) / self.sd
            if alpha > 0.0:
                big, small = special.log_ndtr(-alpha), special.log_ndtr(-beta)
            else:
                big, small = special.log_ndtr(beta), special.log_ndtr(alpha)
            if not math.isfinite(big):
                return -math.inf
            return float(big + np.log1p(-np.exp(small - big))) if small < big else -math.inf
        if self.kind is NodeLawKind.UNIFORM:
            width = min(hi, self.b) - max(lo, self.a)
            return math.log(width / (self.b - self.a)) if width > 0 else -math.inf
        return 0.0 if lo < self.value <= hi else -math.inf

    def to_dict(self) -> dict:
        if self.kind is NodeLawKind.NORMAL:
            return {"kind": self.kind.value, "mean": self.mean, "sd": self.sd}
        if self.kind is NodeLawKind.UNIFORM:
            return {"kind": self.kind.value, "a": self.a, "b": self.b}
        return {"kind": self.kind.value, "value": self.value}


def sample_restricted(law: NodeLaw, a: float, b: float, rng: np.random.Generator) -> float:
    """
    Draw from ``law`` conditioned on ``(a, b]`` by inverse-CDF sampling.

    The normal case works on whichever tail keeps the CDF values away from
    1 so that intervals far in the upper tail stay accurate.

    Raises:
        DegenerateOutsideInterval: A point-mass law whose point misses ``(a, b]``.
        ModelConstructionError: The law gives the interval no mass.
    """
    if law.kind is NodeLawKind.DEGENERATE:
        if a < law.value <= b:
            return law.value
        raise DegenerateOutsideInterval(
            f"Degenerate law at {law.value} lies outside ({a}, {b}]."
        )
    u = 1.0 - rng.random()
    if law.kind is NodeLawKind.UNIFORM:
        lo, hi = max(a, law.a), min(b, law.b)
        if hi <= lo:
            raise ModelConstructionError(f"Uniform node law gives ({a}, {b}] no mass.")
        return lo + (hi - lo) * u
    alpha, beta = (a - law.mean) / law.sd, (b - law.mean) / law.sd
    if alpha > 0.0:
        p_lo, p_hi = special.ndtr(-beta), special.ndtr(-alpha)
        z = -special.ndtri(p_hi - u * (p_hi - p_lo))
    else:
        p_lo, p_hi = special.ndtr(alpha), special.ndtr(beta)
        z = special.ndtri(p_lo + u * (p_hi - p_lo))
    if not p_hi > p_lo:
        raise ModelConstructionError(
            f"Normal node law N({law.mean}, {law.sd}^2) gives ({a}, {b}] no mass."
        )
    x = float(law.mean + law.sd * z)
    x = min(max(x, a), b)
    if x <= a:
        x = float(np.nextafter(a, b))
    return x


# ---------------------------------------------------------------------------
# Node-law families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NodeLawFamily:
    """
    Laws for every odd node of an array of depth ``depth`` on ``domain``.

    ``overrides`` maps ``(j, k)`` with ``k`` odd to a law; other nodes use
    ``default``.  Only the root ``(1, 1)`` may be degenerate.
    """

    depth: int
    default: NodeLaw
    overrides: Mapping[tuple[int, int], NodeLaw] = field(default_factory=dict)
    domain: Domain = field(default_factory=Domain)

    def __post_init__(self) -> None:
        if not 1 <= self.depth <= MAX_DEPTH:
            raise InvalidNodeLaw(f"Depth must lie in [1, {MAX_DEPTH}], got {self.depth}.")
        if self.default.is_degenerate:
            raise InvalidNodeLaw("Only the root node may carry a degenerate law.")
        overrides = {(int(j), int(k)): law for (j, k), law in dict(self.overrides).items()}
        for (j, k), law in overrides.items():
            if not 1 <= j <= self.depth + 1 or k % 2 == 0 or not 1 <= k <= 2 ** j - 1:
                raise InvalidNodeLaw(f"Override ({j}, {k}) does not name an odd node.")
            if law.is_degenerate and (j, k) != (1, 1):
                raise InvalidNodeLaw(f"Node ({j}, {k}) may not carry a degenerate law.")
        if (1, 1) in overrides and overrides[(1, 1)].is_degenerate:
            if not self.domain.contains(overrides[(1, 1)].value):
                raise DegenerateOutsideInterval("Degenerate root lies outside the domain.")
        object.__setattr__(self, "overrides", overrides)

    def law(self, j: int, k: int) -> NodeLaw:
        return self.overrides.get((j, k), self.default)

    @property
    def root(self) -> NodeLaw:
        return self.law(1, 1)

    def with_depth(self, depth: int) -> "NodeLawFamily":
        kept = {key: law for key, law in self.overrides.items() if key[0] <= depth + 1}
        return NodeLawFamily(depth, self.default, kept, self.domain)

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "domain": self.domain.to_dict(),
            "default": self.default.to_dict(),
            "overrides": [
                {"node": [j, k], "law": law.to_dict()}
                for (j, k), law in sorted(self.overrides.items())
            ],
        }


# ---------------------------------------------------------------------------
# Scale laws
# ---------------------------------------------------------------------------

class ScaleLawKind(str, Enum):
    INVERSE_GAMMA = "inverse-gamma"
    GAMMA = "gamma"
    LOG_NORMAL = "log-normal"


@dataclass(frozen=True)
class ScaleLaw:
    """
    Prior on a positive scale parameter.

    ``inverse-gamma`` and ``gamma`` use shape ``a`` and rate ``b``;
    ``log-normal`` uses ``a`` and ``b`` as the mean and sd of ``log phi``.
    """

    kind: ScaleLawKind
    a: float
    b: float

    def __post_init__(self) -> None:
        if not (self.b > 0 and (self.a > 0 or self.kind is ScaleLawKind.LOG_NORMAL)):
            raise InvalidNodeLaw(f"Invalid {self.kind.value} parameters ({self.a}, {self.b}).")

    @classmethod
    def inverse_gamma(cls, shape: float, rate: float) -> "ScaleLaw":
        return cls(ScaleLawKind.INVERSE_GAMMA, float(shape), float(rate))

    @classmethod
    def gamma(cls, shape: float, rate: float) -> "ScaleLaw":
        return cls(ScaleLawKind.GAMMA, float(shape), float(rate))

    @classmethod
    def log_normal(cls, mu: float, sigma: float) -> "ScaleLaw":
        return cls(ScaleLawKind.LOG_NORMAL, float(mu), float(sigma))

    def logpdf(self, phi: float) -> float:
        if not phi > 0:
            return -math.inf
        a, b = self.a, self.b
        if self.kind is ScaleLawKind.INVERSE_GAMMA:
            return a * math.log(b) - special.gammaln(a) - (a + 1.0) * math.log(phi) - b / phi
        if self.kind is ScaleLawKind.GAMMA:
            return a * math.log(b) - special.gammaln(a) + (a - 1.0) * math.log(phi) - b * phi
        z = (math.log(phi) - a) / b
        return -0.5 * z * z - math.log(phi * b) - 0.5 * math.log(2.0 * math.pi)

    def sample(self, rng: np.random.Generator, size: int | None = None) -> np.ndarray | float:
        if self.kind is ScaleLawKind.INVERSE_GAMMA:
            return self.b / rng.gamma(self.a, size=size)
        if self.kind is ScaleLawKind.GAMMA:
            return rng.gamma(self.a, 1.0 / self.b, size=size)
        return rng.lognormal(self.a, self.b, size=size)

    def distribution(self):
        """Equivalent frozen ``scipy.stats`` distribution."""
        if self.kind is ScaleLawKind.INVERSE_GAMMA:
            return stats.invgamma(self.a, scale=self.b)
        if self.kind is ScaleLawKind.GAMMA:
            return stats.gamma(self.a, scale=1.0 / self.b)
        return stats.lognorm(self.b, scale=math.exp(self.a))

    def to_dict(self) -> dict:
        if self.kind is ScaleLawKind.LOG_NORMAL:
            return {"kind": self.kind.value, "mu": self.a, "sigma": self.b}
        return {"kind": self.kind.value, "shape": self.a, "rate": self.b}


# ---------------------------------------------------------------------------
# Joint mixing measures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JointDiscreteMeasure:
    """Discrete measure on (location, scale) pairs; zero weights are allowed."""

    theta: np.ndarray
    phi: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        theta = np.array(self.theta, dtype=float).reshape(-1)
        phi = np.array(self.phi, dtype=float).reshape(-1)
        weights = np.array(self.weights, dtype=float).reshape(-1)
        if not theta.size == phi.size == weights.size > 0:
            raise ModelConstructionError("theta, phi and weights must be aligned and non-empty.")
        if np.any(phi <= 0):
            raise ModelConstructionError("Scale atoms must be positive.")
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-9:
            raise ModelConstructionError("Weights must be non-negative and sum to 1.")
        for arr in (theta, phi, weights):
            arr.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return int(self.theta.size)

    @property
    def mean(self) -> float:
        """Mean of the location marginal."""
        return math.fsum(self.theta * self.weights)

    def location_marginal(self) -> DiscreteMeasure:
        return DiscreteMeasure.from_atoms(self.theta, self.weights)

    def to_dict(self) -> dict:
        return {
            "theta": self.theta.tolist(),
            "phi": self.phi.tolist(),
            "weight": self.weights.tolist(),
        }


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------

def sample_extended_rows(family: NodeLawFamily, rng: np.random.Generator) -> list[np.ndarray]:
    """Draw a random array top-down; returns extended rows ``0 .. n + 1``."""
    lower, upper = family.domain.lower, family.domain.upper
    root = family.root
    if root.is_degenerate:
        mu = root.value
    else:
        mu = sample_restricted(root, lower, upper, rng)
        if mu == lower:
            mu = float(np.nextafter(lower, upper))
    ext = [np.array([lower, upper]), np.array([lower, mu, upper])]
    for j in range(2, family.depth + 2):
        parent = ext[-1]
        row = np.empty(2 ** j + 1)
        row[0::2] = parent
        for l in range(1, 2 ** (j - 1) + 1):
            row[2 * l - 1] = sample_restricted(
                family.law(j, 2 * l - 1), parent[l - 1], parent[l], rng
            )
        ext.append(row)
    return ext


def array_from_extended(domain: Domain, ext_rows: list[np.ndarray]) -> BarycenterArray:
    return BarycenterArray(domain, tuple(r[1:-1] for r in ext_rows[1:]))


def sample_dsba(
    n: int, family: NodeLawFamily, rng: np.random.Generator
) -> tuple[BarycenterArray, DiscreteMeasure]:
    """Random array of depth ``n`` and the discrete measure it represents."""
    family = _at_depth(family, n)
    ext = sample_extended_rows(family, rng)
    array = array_from_extended(family.domain, ext)
    measure = DiscreteMeasure.from_atoms(bottom_atoms(array), level_weights(ext))
    return array, measure


def sample_dsbasp(
    n: int, family: NodeLawFamily, scale: ScaleLaw, rng: np.random.Generator
) -> JointDiscreteMeasure:
    """Parsimonious mixing measure: one scale atom per location atom (``2**n`` pairs)."""
    family = _at_depth(family, n)
    ext = sample_extended_rows(family, rng)
    theta = ext[-1][1:-1][0::2]
    phi = np.asarray(scale.sample(rng, size=theta.size), dtype=float)
    return JointDiscreteMeasure(theta, phi, level_weights(ext))


def sample_dsbasg(
    n: int,
    family: NodeLawFamily,
    scale: ScaleLaw,
    m2: int,
    alpha: np.ndarray | list[float],
    rng: np.random.Generator,
) -> JointDiscreteMeasure:
    """
    General mixing measure: ``2**n`` locations crossed with ``m2`` scales.

    Row ``l`` of the scale-weight matrix is Dirichlet(``alpha``) and pair
    ``(l1, l2)`` gets weight ``w[l1] * W[l1, l2]``.
    """
    if m2 < 1:
        raise ModelConstructionError(f"m2 must be >= 1, got {m2}.")
    alpha = np.asarray(alpha, dtype=float).reshape(-1)
    if alpha.size != m2 or np.any(alpha <= 0):
        raise ModelConstructionError("alpha must have m2 positive entries.")
    family = _at_depth(family, n)
    ext = sample_extended_rows(family, rng)
    theta = ext[-1][1:-1][0::2]
    weights = level_weights(ext)
    phi = np.asarray(scale.sample(rng, size=m2), dtype=float)
    scale_weights = rng.dirichlet(alpha, size=theta.size) if m2 > 1 else np.ones((theta.size, 1))
    joint = weights[:, None] * scale_weights
    return JointDiscreteMeasure(
        np.repeat(theta, m2),
        np.tile(phi, theta.size),
        joint.reshape(-1),
    )


def _at_depth(family: NodeLawFamily, n: int) -> NodeLawFamily:
    if n < 1:
        raise ModelConstructionError(f"Depth must be >= 1, got {n}.")
    return family if family.depth == n else family.with_depth(n)
