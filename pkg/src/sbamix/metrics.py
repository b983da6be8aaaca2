"""
sbamix.metrics
~~~~~~~~~~~~~~
Posterior summaries and model-comparison criteria.

* ``wasserstein_p``  - exact 1-D Wasserstein distance via the quantile coupling
* ``hellinger_grid`` - Hellinger distance between densities on a uniform grid
* ``waic`` / ``lpml_cpo`` - information criteria from a log-likelihood matrix
* ``hpd_interval`` / ``density_band`` - shortest credible intervals
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Protocol, Sequence

import arviz as az
import numpy as np
from scipy import integrate, special

from .exceptions import ModelConstructionError, TooFewSamples
from .measure_model import QuantilePiece

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

MIN_HPD_SAMPLES = 20
WAIC_VARIANCE_WARNING = 0.4


class HasQuantiles(Protocol):
    def quantile_pieces(self) -> list[QuantilePiece]: ...


# ---------------------------------------------------------------------------
# Wasserstein
# ---------------------------------------------------------------------------

def _abs_power_integral(d0: float, d1: float, h: float, p: float) -> float:
    """Exact integral of ``|d0 + (d1 - d0) t / h|**p`` over ``t`` in ``[0, h]``."""
    a0, a1 = abs(d0), abs(d1)
    if d0 * d1 < 0.0:
        r = a0 / (a0 + a1)
        return h * (r * a0 ** p + (1.0 - r) * a1 ** p) / (p + 1.0)
    if a0 == a1:
        return h * a0 ** p
    if p == 1.0:
        return 0.5 * h * (a0 + a1)
    if p == 2.0:
        return h * (a0 * a0 + a0 * a1 + a1 * a1) / 3.0
    lo, hi = min(a0, a1), max(a0, a1)
    if lo == 0.0:
        return h * hi ** p / (p + 1.0)
    # (hi**(p+1) - lo**(p+1)) / ((p+1)(hi-lo)) without cancellation when hi ~ lo
    r = (hi - lo) / lo
    return h * lo ** p * special.expm1((p + 1.0) * special.log1p(r)) / ((p + 1.0) * r)


def _value_at(piece: QuantilePiece, u: float) -> float:
    u0, u1, x0, x1 = piece
    if x0 == x1 or u1 <= u0:
        return x0
    return x0 + (u - u0) / (u1 - u0) * (x1 - x0)


def wasserstein_p(m1: HasQuantiles, m2: HasQuantiles, p: float = 1.0) -> float:
    """
    ``W_p`` between two measures on the line.

    Both quantile functions are piecewise affine, so the integral of
    ``|F1^-1 - F2^-1|**p`` is evaluated in closed form on the merged
    breakpoints.  Accepts ``DiscreteMeasure`` and ``AnalyticMeasure``.
    """
    if p < 1.0:
        raise ValueError(f"p must be >= 1, got {p}.")
    pa, pb = m1.quantile_pieces(), m2.quantile_pieces()
    i = j = 0
    u = 0.0
    total = 0.0
    while i < len(pa) and j < len(pb):
        end = min(pa[i][1], pb[j][1])
        if end > u:
            d0 = _value_at(pa[i], u) - _value_at(pb[j], u)
            d1 = _value_at(pa[i], end) - _value_at(pb[j], end)
            total += _abs_power_integral(d0, d1, end - u, p)
            u = end
        if pa[i][1] <= end:
            i += 1
        if pb[j][1] <= end:
            j += 1
    return total ** (1.0 / p)


# ---------------------------------------------------------------------------
# Hellinger
# ---------------------------------------------------------------------------

def hellinger_grid(f: Sequence[float], g: Sequence[float], grid: Sequence[float]) -> float:
    """``sqrt(0.5 * integral (sqrt f - sqrt g)**2)`` by the trapezoid rule, clipped to ``[0, 1]``."""
    f, g, grid = (np.asarray(v, dtype=float) for v in (f, g, grid))
    if not f.shape == g.shape == grid.shape or grid.ndim != 1 or grid.size < 2:
        raise ValueError("f, g and grid must be 1-D sequences of equal length >= 2.")
    if np.any(f < 0) or np.any(g < 0):
        raise ValueError("Densities must be non-negative.")
    gaps = np.diff(grid)
    if not np.allclose(gaps, gaps[0], rtol=1e-9, atol=0.0):
        raise ValueError("hellinger_grid needs a uniform grid.")
    sq = (np.sqrt(f) - np.sqrt(g)) ** 2
    value = 0.5 * float(integrate.trapezoid(sq, grid))
    return float(np.clip(math.sqrt(max(value, 0.0)), 0.0, 1.0))


# ---------------------------------------------------------------------------
# WAIC / LPML
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LogLikMatrix:
    """Draws x observations matrix of ``log f(y_i | G_m)``."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or min(values.shape) < 1:
            raise ModelConstructionError("A log-likelihood matrix needs positive dimensions.")
        if not np.all(np.isfinite(values)):
            raise ModelConstructionError("Log-likelihood entries must be finite.")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def coerce(cls, ll: "LogLikMatrix | np.ndarray") -> "LogLikMatrix":
        return ll if isinstance(ll, cls) else cls(np.asarray(ll))

    @property
    def draws(self) -> int:
        return int(self.values.shape[0])

    @property
    def observations(self) -> int:
        return int(self.values.shape[1])

    def sorted_by_draw(self) -> np.ndarray:
        """Each column sorted; summaries computed on it do not depend on draw order."""
        return np.sort(self.values, axis=0)


@dataclass(frozen=True)
class WAICResult:
    waic: float
    lppd: float
    p_waic: float
    waic_se: float
    pointwise: np.ndarray

    def to_dict(self) -> dict:
        return {
            "waic": self.waic,
            "lppd": self.lppd,
            "p_waic": self.p_waic,
            "waic_se": self.waic_se,
        }


@dataclass(frozen=True)
class LPMLResult:
    lpml: float
    log_cpo: np.ndarray

    @property
    def cpo(self) -> np.ndarray:
        return np.exp(self.log_cpo)

    def to_dict(self) -> dict:
        return {"lpml": self.lpml, "cpo": self.cpo.tolist()}


def _require_draws(ll: LogLikMatrix, minimum: int = 2) -> None:
    if ll.draws < minimum:
        raise TooFewSamples(f"Need at least {minimum} draws, got {ll.draws}.")


def _arviz_waic(values: np.ndarray):
    """``az.waic`` on the log scale for a single-chain draws x observations matrix."""
    with warnings.catch_warnings():
        # the variance check is logged by waic() with the sample-variance penalty
        warnings.simplefilter("ignore")
        idata = az.from_dict(log_likelihood={"y": values[None, :, :]})
        return az.waic(idata, pointwise=True, scale="log")


def waic(ll: LogLikMatrix | np.ndarray) -> WAICResult:
    """
    WAIC with the variance penalty: ``-2 (lppd - p_waic)``.

    ``az.waic`` supplies the pointwise ``lppd_i - var_i``; its penalty uses
    the population variance and is swapped here for the sample variance.
    """
    ll = LogLikMatrix.coerce(ll)
    _require_draws(ll)
    values = ll.sorted_by_draw()
    elpd_i = np.asarray(_arviz_waic(values).waic_i, dtype=float).reshape(-1)
    lppd_i = elpd_i + np.var(values, axis=0)
    var_i = np.var(values, axis=0, ddof=1)
    if np.any(var_i > WAIC_VARIANCE_WARNING):
        logger.warning(
            "%d of %d pointwise log-likelihood variances exceed %.1f; "
            "WAIC may be unreliable",
            int(np.sum(var_i > WAIC_VARIANCE_WARNING)), var_i.size, WAIC_VARIANCE_WARNING,
        )
    pointwise = -2.0 * (lppd_i - var_i)
    se = math.sqrt(ll.observations * np.var(pointwise)) if ll.observations > 1 else 0.0
    return WAICResult(
        waic=float(pointwise.sum()),
        lppd=float(lppd_i.sum()),
        p_waic=float(var_i.sum()),
        waic_se=float(se),
        pointwise=pointwise,
    )


def lpml_cpo(ll: LogLikMatrix | np.ndarray) -> LPMLResult:
    """Harmonic-mean CPO per observation (in log space) and their log sum."""
    ll = LogLikMatrix.coerce(ll)
    _require_draws(ll)
    values = ll.sorted_by_draw()
    log_cpo = math.log(ll.draws) - special.logsumexp(-values, axis=0)
    return LPMLResult(lpml=float(log_cpo.sum()), log_cpo=log_cpo)


# ---------------------------------------------------------------------------
# HPD
# ---------------------------------------------------------------------------

def hpd_interval(samples: Sequence[float], prob: float = 0.95) -> tuple[float, float]:
    """
    Shortest interval spanning ``floor(prob * M)`` steps of the sorted sample
    (``az.hdi``); ties go to the leftmost window.
    """
    if not 0.0 < prob < 1.0:
        raise ValueError(f"prob must lie in (0, 1), got {prob}.")
    x = np.asarray(samples, dtype=float).reshape(-1)
    if x.size < MIN_HPD_SAMPLES:
        raise TooFewSamples(f"HPD needs at least {MIN_HPD_SAMPLES} samples, got {x.size}.")
    lo, hi = az.hdi(x, hdi_prob=prob)
    return float(lo), float(hi)


@dataclass(frozen=True)
class DensityBand:
    grid: np.ndarray
    mean: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    prob: float

    def local_maxima(self) -> int:
        """Number of interior strict local maxima of the mean curve."""
        m = self.mean
        return int(np.sum((m[1:-1] > m[:-2]) & (m[1:-1] > m[2:])))


def density_band(trace, prob: float = 0.95) -> DensityBand:
    """
    Pointwise posterior mean and HPD interval of the density on the trace's grid.

    With fewer than 20 retained draws the band is the pointwise range.
    """
    dens = trace.density_matrix()
    if dens.shape[0] == 0:
        raise TooFewSamples("Trace holds no retained draws.")
    mean = dens.mean(axis=0)
    if dens.shape[0] < MIN_HPD_SAMPLES:
        lo, hi = dens.min(axis=0), dens.max(axis=0)
    else:
        bounds = np.array([hpd_interval(dens[:, g], prob) for g in range(dens.shape[1])])
        lo, hi = bounds[:, 0], bounds[:, 1]
    return DensityBand(np.asarray(trace.grid, dtype=float), mean, lo, hi, prob)
