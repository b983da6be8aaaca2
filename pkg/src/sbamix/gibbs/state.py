"""
sbamix.gibbs.state
~~~~~~~~~~~~~~~~~~
Mutable MCMC state for one chain.

The array is held as extended rows ``0 .. n + 1`` so that a node move only
touches the handful of entries that carry copies of it.  Derived
quantities (CDF levels, weights, atoms, per-location kernel terms) are
cached and refreshed explicitly by the update functions.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from ..exceptions import ModelConstructionError
from ..kernels import KernelKind, clamp_parameters, log_kernel_unchecked
from ..measure_model import Domain
from ..random_measures import JointDiscreteMeasure, sample_extended_rows
from ..sba import BarycenterArray, cdf_levels, validate_sba
from .config import FitConfig, Variant
from .slice import SliceDiagnostics

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())


def safe_log(values: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(values)


@dataclass
class ChainState:
    kernel: KernelKind
    variant: Variant
    y: np.ndarray
    ext: list[np.ndarray]
    phis: np.ndarray
    scale_weights: np.ndarray | None = None
    alloc_theta: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.intp))
    alloc_phi: np.ndarray | None = None
    diagnostics: SliceDiagnostics = field(default_factory=SliceDiagnostics)

    levels: list[np.ndarray] = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)
    theta: np.ndarray = field(init=False, repr=False)
    log_k: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.y = np.asarray(self.y, dtype=float)
        self.phis = np.asarray(self.phis, dtype=float)
        if self.alloc_theta.size != self.y.size:
            self.alloc_theta = np.zeros(self.y.size, dtype=np.intp)
        if self.variant is Variant.GENERAL and self.alloc_phi is None:
            self.alloc_phi = np.zeros(self.y.size, dtype=np.intp)
        self.refresh_structure()
        self.refresh_kernels()

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def from_prior(cls, config: FitConfig, y: np.ndarray, rng: np.random.Generator) -> "ChainState":
        """Initial state from a single draw of the prior."""
        ext = sample_extended_rows(config.family, rng)
        m1 = 2 ** config.n
        if config.variant is Variant.PARSIMONIOUS:
            phis = np.asarray(config.scale_prior.sample(rng, size=m1), dtype=float)
            return cls(config.kernel, config.variant, y, ext, phis)
        phis = np.asarray(config.scale_prior.sample(rng, size=config.m2), dtype=float)
        if config.m2 > 1:
            scale_weights = rng.dirichlet(np.asarray(config.alpha), size=m1)
        else:
            scale_weights = np.ones((m1, 1))
        return cls(config.kernel, config.variant, y, ext, phis, scale_weights)

    # ------------------------------------------------------------------
    # Shape
    # ------------------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.ext) - 2

    @property
    def m1(self) -> int:
        return 2 ** self.n

    @property
    def lower(self) -> float:
        return float(self.ext[0][0])

    @property
    def upper(self) -> float:
        return float(self.ext[0][-1])

    @property
    def array(self) -> BarycenterArray:
        return BarycenterArray(
            Domain(self.lower, self.upper), tuple(r[1:-1].copy() for r in self.ext[1:])
        )

    # ------------------------------------------------------------------
    # Node access
    # ------------------------------------------------------------------

    def node(self, j: int, k: int) -> float:
        return float(self.ext[j][k])

    def set_node(self, j: int, k: int, value: float) -> None:
        """Write ``mu(j, k)`` and every inherited copy in deeper rows."""
        for r in range(j, self.n + 2):
            self.ext[r][k * 2 ** (r - j)] = value

    # ------------------------------------------------------------------
    # Caches
    # ------------------------------------------------------------------

    def refresh_structure(self) -> None:
        self.levels = cdf_levels(self.ext)
        self.weights = np.maximum(np.diff(self.levels[-1]), 0.0)
        self.theta = self.ext[-1][1:-1][0::2].copy()

    def refresh_kernels(self, columns: np.ndarray | list[int] | None = None) -> None:
        """Recompute per-location log kernel terms (``N x m1``), optionally only some columns."""
        cols = np.arange(self.m1) if columns is None else np.asarray(columns, dtype=np.intp)
        if columns is None:
            self.log_k = np.empty((self.y.size, self.m1))
        if self.variant is Variant.PARSIMONIOUS:
            theta, phi = clamp_parameters(self.kernel, self.theta[cols], self.phis[cols])
            self.log_k[:, cols] = log_kernel_unchecked(
                self.kernel, self.y[:, None], theta[None, :], phi[None, :]
            )
            return
        theta, phi = clamp_parameters(self.kernel, self.theta[cols], self.phis)
        terms = safe_log(self.scale_weights[cols])[None, :, :] + log_kernel_unchecked(
            self.kernel, self.y[:, None, None], theta[None, :, None], phi[None, None, :]
        )
        self.log_k[:, cols] = special.logsumexp(terms, axis=2)

    def full_log_kernel(self) -> np.ndarray:
        """``N x m1 x m2`` log kernels over every (location, scale) pair (general variant)."""
        theta, phi = clamp_parameters(self.kernel, self.theta, self.phis)
        return log_kernel_unchecked(
            self.kernel, self.y[:, None, None], theta[None, :, None], phi[None, None, :]
        )

    # ------------------------------------------------------------------
    # Likelihood and snapshots
    # ------------------------------------------------------------------

    def loglik_terms(self) -> np.ndarray:
        """Per-observation ``log f(y_i | G)``."""
        return special.logsumexp(safe_log(self.weights)[None, :] + self.log_k, axis=1)

    def total_loglik(self) -> float:
        return float(self.loglik_terms().sum())

    @property
    def mean(self) -> float:
        return float(np.dot(self.weights, self.theta))

    def mixing(self) -> JointDiscreteMeasure:
        if self.variant is Variant.PARSIMONIOUS:
            return JointDiscreteMeasure(self.theta, self.phis, self.weights / self.weights.sum())
        m2 = self.phis.size
        joint = (self.weights / self.weights.sum())[:, None] * self.scale_weights
        return JointDiscreteMeasure(
            np.repeat(self.theta, m2), np.tile(self.phis, self.m1), joint.reshape(-1)
        )

    def check(self) -> None:
        """Assert structural validity; meant for debug sweeps and tests."""
        violations = validate_sba(self.array)
        if violations:
            raise ModelConstructionError(f"Chain state array is invalid: {violations[0]}")
        if abs(self.weights.sum() - 1.0) > 1e-12:
            raise ModelConstructionError(f"Weights sum to {self.weights.sum()!r}.")
        if np.any(self.phis <= 0):
            raise ModelConstructionError("Scale atoms must stay positive.")
        if self.scale_weights is not None and np.any(
            np.abs(self.scale_weights.sum(axis=1) - 1.0) > 1e-12
        ):
            raise ModelConstructionError("Scale-weight rows must sum to 1.")
