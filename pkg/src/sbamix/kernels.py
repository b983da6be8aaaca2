"""
sbamix.kernels
~~~~~~~~~~~~~~
Location-scale kernels and mixture densities.

=========  ===================  ==============  ================
kernel     sample space         location        scale
=========  ===================  ==============  ================
gaussian   real line            mean            variance
beta       (0, 1)               mean            precision
gamma      (0, inf)             mean            shape
=========  ===================  ==============  ================
"""

from __future__ import annotations

import logging
from enum import Enum

import numpy as np
from scipy import special

from .exceptions import DomainError
from .measure_model import Domain
from .random_measures import JointDiscreteMeasure

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

PARAMETER_FLOOR = 1e-12
_LOG_2PI = float(np.log(2.0 * np.pi))


class KernelKind(str, Enum):
    GAUSSIAN = "gaussian"
    BETA = "beta"
    GAMMA = "gamma"

    @property
    def sample_space(self) -> Domain:
        if self is KernelKind.BETA:
            return Domain(0.0, 1.0)
        if self is KernelKind.GAMMA:
            return Domain(0.0)
        return Domain()

    @property
    def location_space(self) -> Domain:
        """Domain that the location (and so the node laws) lives on."""
        return self.sample_space


# ---------------------------------------------------------------------------
# Domain checks
# ---------------------------------------------------------------------------

def check_observations(kind: KernelKind, y: np.ndarray) -> np.ndarray:
    """
    Return ``y`` as a float array, rejecting values outside the open sample space.

    Raises:
        DomainError: A value is non-finite or outside the sample space.
    """
    y = np.asarray(y, dtype=float)
    bad = ~np.isfinite(y)
    if kind is KernelKind.BETA:
        bad |= (y <= 0.0) | (y >= 1.0)
    elif kind is KernelKind.GAMMA:
        bad |= y <= 0.0
    if np.any(bad):
        value = float(y[bad].reshape(-1)[0])
        raise DomainError(
            f"Observation {value!r} lies outside the {kind.value} sample space.", value=value
        )
    return y


def check_parameters(kind: KernelKind, theta: np.ndarray, phi: np.ndarray) -> None:
    theta, phi = np.asarray(theta, dtype=float), np.asarray(phi, dtype=float)
    if np.any(~np.isfinite(phi) | (phi <= 0.0)):
        raise DomainError(f"Scale parameters must be positive for the {kind.value} kernel.")
    bad = ~np.isfinite(theta)
    if kind is KernelKind.BETA:
        bad |= (theta <= 0.0) | (theta >= 1.0)
    elif kind is KernelKind.GAMMA:
        bad |= theta <= 0.0
    if np.any(bad):
        value = float(theta[bad].reshape(-1)[0])
        raise DomainError(
            f"Location {value!r} lies outside the {kind.value} parameter space.", value=value
        )


def clamp_parameters(
    kind: KernelKind, theta: np.ndarray, phi: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Push boundary parameters just inside their open spaces."""
    theta = np.asarray(theta, dtype=float)
    phi = np.maximum(np.asarray(phi, dtype=float), PARAMETER_FLOOR)
    if kind is KernelKind.BETA:
        theta = np.clip(theta, PARAMETER_FLOOR, 1.0 - PARAMETER_FLOOR)
    elif kind is KernelKind.GAMMA:
        theta = np.maximum(theta, PARAMETER_FLOOR)
    return theta, phi


# ---------------------------------------------------------------------------
# Kernels
# ---------------------------------------------------------------------------

def log_kernel_unchecked(
    kind: KernelKind, y: np.ndarray, theta: np.ndarray, phi: np.ndarray
) -> np.ndarray:
    """Broadcasting log kernel with no domain checks."""
    y, theta, phi = (np.asarray(v, dtype=float) for v in (y, theta, phi))
    if kind is KernelKind.GAUSSIAN:
        return -0.5 * (_LOG_2PI + np.log(phi)) - (y - theta) ** 2 / (2.0 * phi)
    if kind is KernelKind.BETA:
        a, b = theta * phi, (1.0 - theta) * phi
        return (
            special.gammaln(phi) - special.gammaln(a) - special.gammaln(b)
            + (a - 1.0) * np.log(y) + (b - 1.0) * np.log1p(-y)
        )
    rate = phi / theta
    return phi * np.log(rate) - special.gammaln(phi) + (phi - 1.0) * np.log(y) - rate * y


def log_kernel(kind: KernelKind, y, theta, phi):
    """
    Log kernel density ``log k(y | theta, phi)``.

    Raises:
        DomainError: ``y``, ``theta`` or ``phi`` is outside its space.
    """
    y = check_observations(kind, y)
    check_parameters(kind, theta, phi)
    out = log_kernel_unchecked(kind, y, theta, phi)
    return float(out) if np.ndim(out) == 0 else out


def mixture_logpdf(kind: KernelKind, mixing: JointDiscreteMeasure, y):
    """
    ``log sum_l w_l k(y | theta_l, phi_l)`` for scalar or array ``y``.

    Zero-weight pairs contribute nothing; parameters on the boundary of
    their space are floored first.
    """
    y_arr = check_observations(kind, y)
    theta, phi = clamp_parameters(kind, mixing.theta, mixing.phi)
    with np.errstate(divide="ignore"):
        log_w = np.log(mixing.weights)
    terms = log_w + log_kernel_unchecked(kind, y_arr[..., None], theta, phi)
    out = special.logsumexp(terms, axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def density_grid(kind: KernelKind, mixing: JointDiscreteMeasure, grid: np.ndarray) -> np.ndarray:
    """Mixture density evaluated on ``grid``."""
    return np.exp(mixture_logpdf(kind, mixing, np.asarray(grid, dtype=float)))
