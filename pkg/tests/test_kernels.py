"""
tests/test_kernels.py
~~~~~~~~~~~~~~~~~~~~~
Tests for sbamix.kernels — kernel densities, mixtures and domain checks.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import integrate, stats

from sbamix.exceptions import DomainError
from sbamix.kernels import (
    KernelKind,
    check_observations,
    clamp_parameters,
    density_grid,
    log_kernel,
    mixture_logpdf,
)
from sbamix.random_measures import JointDiscreteMeasure


def _support(kind: KernelKind, theta: float, phi: float) -> tuple[float, float]:
    if kind is KernelKind.GAUSSIAN:
        half = 12.0 * math.sqrt(phi)
        return theta - half, theta + half
    if kind is KernelKind.BETA:
        return 0.0, 1.0
    return 0.0, math.inf


_PARAMS = [
    (KernelKind.GAUSSIAN, 0.7, 2.5),
    (KernelKind.GAUSSIAN, -3.0, 0.2),
    (KernelKind.BETA, 0.3, 4.0),
    (KernelKind.BETA, 0.5, 2.0),
    (KernelKind.GAMMA, 2.0, 3.0),
    (KernelKind.GAMMA, 0.5, 1.5),
]


# ---------------------------------------------------------------------------
# KernelKind
# ---------------------------------------------------------------------------

class TestKernelKind:
    def test_sample_spaces(self):
        assert KernelKind.GAUSSIAN.sample_space.kind == "line"
        assert KernelKind.GAMMA.sample_space.kind == "half-line"
        assert KernelKind.BETA.sample_space.kind == "interval"

    def test_location_space_matches_sample_space(self):
        assert KernelKind.BETA.location_space == KernelKind.BETA.sample_space

    def test_from_string(self):
        assert KernelKind("gamma") is KernelKind.GAMMA


# ---------------------------------------------------------------------------
# log_kernel
# ---------------------------------------------------------------------------

class TestLogKernel:
    def test_standard_normal_at_zero(self):
        assert log_kernel(KernelKind.GAUSSIAN, 0.0, 0.0, 1.0) == pytest.approx(-0.9189385, abs=1e-7)

    def test_beta_flat(self):
        assert log_kernel(KernelKind.BETA, 0.5, 0.5, 2.0) == pytest.approx(0.0, abs=1e-12)

    def test_gamma_exponential(self):
        assert log_kernel(KernelKind.GAMMA, 1.0, 1.0, 1.0) == pytest.approx(-1.0, abs=1e-12)

    @pytest.mark.parametrize("kind, theta, phi", _PARAMS)
    def test_matches_scipy(self, kind, theta, phi):
        y = {KernelKind.GAUSSIAN: 0.4, KernelKind.BETA: 0.35, KernelKind.GAMMA: 1.7}[kind]
        if kind is KernelKind.GAUSSIAN:
            ref = stats.norm(theta, math.sqrt(phi)).logpdf(y)
        elif kind is KernelKind.BETA:
            ref = stats.beta(theta * phi, (1 - theta) * phi).logpdf(y)
        else:
            ref = stats.gamma(phi, scale=theta / phi).logpdf(y)
        assert log_kernel(kind, y, theta, phi) == pytest.approx(ref, abs=1e-10)

    @pytest.mark.parametrize("kind, theta, phi", _PARAMS)
    def test_normalised(self, kind, theta, phi):
        lo, hi = _support(kind, theta, phi)
        total, _ = integrate.quad(lambda y: math.exp(log_kernel(kind, y, theta, phi)), lo, hi)
        assert total == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("kind, theta, phi", _PARAMS)
    def test_location_is_mean(self, kind, theta, phi):
        lo, hi = _support(kind, theta, phi)
        mean, _ = integrate.quad(lambda y: y * math.exp(log_kernel(kind, y, theta, phi)), lo, hi)
        assert mean == pytest.approx(theta, abs=1e-6)

    def test_gaussian_symmetry(self):
        assert log_kernel(KernelKind.GAUSSIAN, 1.3, 0.2, 0.7) == pytest.approx(
            log_kernel(KernelKind.GAUSSIAN, 0.2, 1.3, 0.7)
        )

    def test_vectorised(self):
        out = log_kernel(KernelKind.GAUSSIAN, np.array([0.0, 1.0]), 0.0, 1.0)
        assert out.shape == (2,)
        assert out[0] > out[1]

    @pytest.mark.parametrize("kind, y", [
        (KernelKind.BETA, 0.0),
        (KernelKind.BETA, 1.0),
        (KernelKind.GAMMA, -1.0),
        (KernelKind.GAUSSIAN, math.nan),
    ])
    def test_observation_outside_space(self, kind, y):
        with pytest.raises(DomainError) as info:
            log_kernel(kind, y, 0.5, 1.0)
        assert info.value.exit_code == 4

    def test_location_outside_space(self):
        with pytest.raises(DomainError):
            log_kernel(KernelKind.BETA, 0.5, 1.2, 1.0)

    def test_non_positive_scale(self):
        with pytest.raises(DomainError):
            log_kernel(KernelKind.GAUSSIAN, 0.0, 0.0, 0.0)


# ---------------------------------------------------------------------------
# Mixtures
# ---------------------------------------------------------------------------

class TestMixture:
    def test_symmetric_two_component(self):
        g = JointDiscreteMeasure([-1.0, 1.0], [1.0, 1.0], [0.5, 0.5])
        assert mixture_logpdf(KernelKind.GAUSSIAN, g, 0.0) == pytest.approx(-1.4189385, abs=1e-7)

    def test_density_grid_values(self):
        g = JointDiscreteMeasure([0.0], [1.0], [1.0])
        values = density_grid(KernelKind.GAUSSIAN, g, np.array([-1.0, 0.0]))
        assert values == pytest.approx([0.2419707, 0.3989423], abs=1e-7)

    def test_zero_weight_ignored(self):
        with_zero = JointDiscreteMeasure([0.0, 5.0], [1.0, 1.0], [1.0, 0.0])
        single = JointDiscreteMeasure([0.0], [1.0], [1.0])
        assert mixture_logpdf(KernelKind.GAUSSIAN, with_zero, 0.3) == pytest.approx(
            mixture_logpdf(KernelKind.GAUSSIAN, single, 0.3)
        )

    def test_far_tail_is_finite(self):
        g = JointDiscreteMeasure([0.0, 1.0], [0.01, 0.01], [0.5, 0.5])
        value = mixture_logpdf(KernelKind.GAUSSIAN, g, 1000.0)
        assert math.isfinite(value)
        assert value < -1e6

    def test_boundary_location_is_clamped(self):
        g = JointDiscreteMeasure([1.0, 0.5], [3.0, 3.0], [0.5, 0.5])
        assert math.isfinite(mixture_logpdf(KernelKind.BETA, g, 0.4))

    def test_mixture_normalised(self):
        g = JointDiscreteMeasure([0.2, 0.7], [5.0, 20.0], [0.3, 0.7])
        total, _ = integrate.quad(lambda y: math.exp(mixture_logpdf(KernelKind.BETA, g, y)), 0.0, 1.0)
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_rejects_out_of_space_grid(self):
        g = JointDiscreteMeasure([2.0], [1.0], [1.0])
        with pytest.raises(DomainError):
            density_grid(KernelKind.GAMMA, g, np.array([0.0, 1.0]))


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

class TestHelpers:
    def test_check_observations_returns_array(self):
        out = check_observations(KernelKind.GAMMA, [1.0, 2.0])
        assert isinstance(out, np.ndarray)

    def test_clamp_parameters(self):
        theta, phi = clamp_parameters(KernelKind.BETA, np.array([0.0, 1.0]), np.array([0.0, 1.0]))
        assert np.all((theta > 0) & (theta < 1))
        assert np.all(phi > 0)
