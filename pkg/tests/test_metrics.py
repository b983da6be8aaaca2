"""
tests/test_metrics.py
~~~~~~~~~~~~~~~~~~~~~
Tests for sbamix.metrics — Wasserstein and Hellinger distances, WAIC, LPML
and HPD summaries.
"""

from __future__ import annotations

import logging
import math

import arviz as az
import numpy as np
import pytest
from scipy import stats

from sbamix.exceptions import ModelConstructionError, TooFewSamples
from sbamix.gibbs import Trace
from sbamix.measure_model import AnalyticMeasure, MeasureComponent
from sbamix.metrics import (
    DensityBand,
    LogLikMatrix,
    density_band,
    hellinger_grid,
    hpd_interval,
    lpml_cpo,
    waic,
    wasserstein_p,
)
from sbamix.sba import DiscreteMeasure


def _random_discrete(gen: np.random.Generator) -> DiscreteMeasure:
    k = int(gen.integers(1, 6))
    return DiscreteMeasure.from_atoms(gen.normal(0.0, 2.0, k), gen.dirichlet(np.ones(k)))


# ---------------------------------------------------------------------------
# Wasserstein
# ---------------------------------------------------------------------------

class TestWasserstein:
    def test_two_atoms(self):
        assert wasserstein_p(DiscreteMeasure([0.0], [1.0]), DiscreteMeasure([1.0], [1.0])) == 1.0

    def test_uniform_against_midpoint(self, unit_uniform):
        assert wasserstein_p(unit_uniform, AnalyticMeasure.point_mass(0.5)) == pytest.approx(0.25)

    def test_w2_uniform_against_midpoint(self, unit_uniform):
        assert wasserstein_p(unit_uniform, AnalyticMeasure.point_mass(0.5), p=2) == pytest.approx(
            math.sqrt(1.0 / 12.0), abs=1e-12
        )

    def test_two_against_three_points(self, two_points, three_points):
        assert wasserstein_p(two_points, three_points) == pytest.approx(0.5, abs=1e-12)

    def test_uniform_shift(self):
        a = AnalyticMeasure.uniform(0.0, 1.0)
        b = AnalyticMeasure.uniform(0.3, 1.3)
        assert wasserstein_p(a, b, p=3) == pytest.approx(0.3, abs=1e-12)

    @pytest.mark.parametrize("p", [1.5, 2.5, 3.0, 4.5, 7.0])
    def test_shift_distance_for_any_p(self, p):
        a = AnalyticMeasure.mixture([
            (0.4, MeasureComponent.uniform(-1.0, 0.5)), (0.6, MeasureComponent.point_mass(2.0)),
        ])
        b = AnalyticMeasure.mixture([
            (0.4, MeasureComponent.uniform(-0.9, 0.6)), (0.6, MeasureComponent.point_mass(2.1)),
        ])
        assert wasserstein_p(a, b, p=p) == pytest.approx(0.1, abs=1e-10)

    def test_general_p_against_quadrature(self):
        a = AnalyticMeasure.mixture([
            (0.5, MeasureComponent.uniform(0.0, 1.0)), (0.5, MeasureComponent.point_mass(2.0)),
        ])
        b = AnalyticMeasure.uniform(0.0, 3.0)
        grid = (np.arange(4000) + 0.5) / 4000
        diffs = np.array([a.quantile(u) - b.quantile(u) for u in grid])
        approx = float(np.mean(np.abs(diffs) ** 1.5)) ** (1 / 1.5)
        assert wasserstein_p(a, b, p=1.5) == pytest.approx(approx, abs=1e-3)

    def test_rejects_small_p(self, two_points):
        with pytest.raises(ValueError):
            wasserstein_p(two_points, two_points, p=0.5)

    def test_metric_axioms(self):
        gen = np.random.default_rng(11)
        for _ in range(100):
            a, b, c = (_random_discrete(gen) for _ in range(3))
            for p in (1.0, 2.0):
                assert wasserstein_p(a, a, p) == pytest.approx(0.0, abs=1e-12)
                assert wasserstein_p(a, b, p) == pytest.approx(wasserstein_p(b, a, p), abs=1e-12)
                assert wasserstein_p(a, c, p) <= wasserstein_p(a, b, p) + wasserstein_p(b, c, p) + 1e-12

    def test_matches_scipy_for_p_one(self):
        gen = np.random.default_rng(12)
        for _ in range(50):
            a, b = _random_discrete(gen), _random_discrete(gen)
            ref = stats.wasserstein_distance(a.atoms, b.atoms, a.weights, b.weights)
            assert wasserstein_p(a, b) == pytest.approx(ref, abs=1e-10)


# ---------------------------------------------------------------------------
# Hellinger
# ---------------------------------------------------------------------------

class TestHellinger:
    def test_shifted_normals(self):
        grid = np.linspace(-8.0, 9.0, 4000)
        f, g = stats.norm(0, 1).pdf(grid), stats.norm(1, 1).pdf(grid)
        assert hellinger_grid(f, g, grid) == pytest.approx(math.sqrt(1 - math.exp(-0.125)), abs=1e-4)

    def test_identical_is_zero(self):
        grid = np.linspace(0.0, 1.0, 11)
        assert hellinger_grid(np.ones(11), np.ones(11), grid) == 0.0

    def test_clipped_to_one(self):
        grid = np.linspace(0.0, 1.0, 5)
        f = np.array([4.0, 4.0, 0.0, 0.0, 0.0])
        g = np.array([0.0, 0.0, 0.0, 4.0, 4.0])
        assert 0.0 <= hellinger_grid(f, g, grid) <= 1.0

    def test_uniform_grid_required(self):
        with pytest.raises(ValueError):
            hellinger_grid([1.0, 1.0, 1.0], [1.0, 1.0, 1.0], [0.0, 0.1, 0.5])

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            hellinger_grid([1.0, 1.0], [1.0], [0.0, 1.0])

    def test_negative_density(self):
        with pytest.raises(ValueError):
            hellinger_grid([1.0, -1.0], [1.0, 1.0], [0.0, 1.0])


# ---------------------------------------------------------------------------
# WAIC / LPML
# ---------------------------------------------------------------------------

class TestWaic:
    def test_constant_matrix(self):
        ll = np.full((4, 3), math.log(0.5))
        result = waic(ll)
        assert result.p_waic == 0.0
        assert result.lppd == pytest.approx(3 * math.log(0.5))
        assert result.waic == pytest.approx(-6 * math.log(0.5))
        assert result.waic_se == pytest.approx(0.0, abs=1e-12)

    def test_two_draw_example(self, caplog):
        ll = np.log(np.array([[0.2], [0.8]]))
        with caplog.at_level(logging.WARNING, logger="sbamix.metrics"):
            result = waic(ll)
        var = math.log(4.0) ** 2 / 2.0
        assert result.p_waic == pytest.approx(var)
        assert result.waic == pytest.approx(-2.0 * (math.log(0.5) - var))
        assert "unreliable" in caplog.text

    def test_draw_order_invariant(self, rng):
        ll = rng.normal(-2.0, 0.3, size=(50, 8))
        shuffled = ll[rng.permutation(50)]
        assert waic(ll).waic == waic(shuffled).waic
        assert lpml_cpo(ll).lpml == lpml_cpo(shuffled).lpml

    def test_observation_order_invariant(self, rng):
        ll = rng.normal(-2.0, 0.3, size=(50, 8))
        assert waic(ll[:, ::-1]).waic == pytest.approx(waic(ll).waic, abs=1e-12)

    def test_too_few_draws(self):
        with pytest.raises(TooFewSamples) as info:
            waic(np.zeros((1, 3)))
        assert info.value.exit_code == 3

    def test_to_dict(self):
        assert set(waic(np.zeros((2, 2))).to_dict()) == {"waic", "lppd", "p_waic", "waic_se"}

    def test_agrees_with_arviz(self, rng):
        ll = rng.normal(-2.0, 0.3, size=(200, 6))
        ref = az.waic(az.from_dict(log_likelihood={"y": ll[None]}), scale="log")
        result = waic(ll)
        assert result.lppd == pytest.approx(ref.elpd_waic + ref.p_waic, abs=1e-9)
        assert result.p_waic == pytest.approx(ref.p_waic * 200 / 199, abs=1e-9)
        assert result.waic == pytest.approx(-2.0 * (result.lppd - result.p_waic), abs=1e-9)


class TestLpml:
    def test_constant_cpo(self):
        result = lpml_cpo(np.full((5, 2), math.log(0.5)))
        assert result.cpo == pytest.approx([0.5, 0.5])
        assert result.lpml == pytest.approx(2 * math.log(0.5))

    def test_harmonic_mean(self):
        result = lpml_cpo(np.log(np.array([[0.2], [0.8]])))
        assert result.cpo[0] == pytest.approx(2.0 / (5.0 + 1.25))

    def test_cpo_below_mean_likelihood(self, rng):
        ll = rng.normal(-3.0, 1.0, size=(200, 10))
        cpo = lpml_cpo(ll).cpo
        assert np.all(cpo <= np.exp(ll).mean(axis=0) + 1e-15)

    def test_stable_for_very_negative_entries(self):
        ll = np.array([[-800.0, -1.0], [-801.0, -1.2]])
        assert np.all(np.isfinite(lpml_cpo(ll).log_cpo))

    def test_to_dict(self):
        d = lpml_cpo(np.zeros((2, 3))).to_dict()
        assert d["cpo"] == pytest.approx([1.0, 1.0, 1.0])


class TestLogLikMatrix:
    def test_non_finite_rejected(self):
        with pytest.raises(ModelConstructionError):
            LogLikMatrix(np.array([[0.0, math.inf]]))

    def test_needs_two_dimensions(self):
        with pytest.raises(ModelConstructionError):
            LogLikMatrix(np.zeros(3))

    def test_shape(self):
        ll = LogLikMatrix(np.zeros((4, 2)))
        assert (ll.draws, ll.observations) == (4, 2)
        assert LogLikMatrix.coerce(ll) is ll


# ---------------------------------------------------------------------------
# HPD
# ---------------------------------------------------------------------------

class TestHpd:
    def test_evenly_spaced_width(self):
        lo, hi = hpd_interval(np.arange(100.0), 0.95)
        assert hi - lo == 95.0
        assert lo == 0.0

    def test_normal_sample(self, rng):
        lo, hi = hpd_interval(rng.standard_normal(100_000), 0.95)
        assert lo == pytest.approx(-1.96, abs=0.05)
        assert hi == pytest.approx(1.96, abs=0.05)

    def test_skewed_sample_is_shorter_than_equal_tails(self, rng):
        x = rng.exponential(size=20_000)
        lo, hi = hpd_interval(x, 0.9)
        q_lo, q_hi = np.quantile(x, [0.05, 0.95])
        assert hi - lo < q_hi - q_lo
        assert lo < 0.01

    def test_constant_samples(self):
        assert hpd_interval(np.full(30, 2.5)) == (2.5, 2.5)

    def test_too_few_samples(self):
        with pytest.raises(TooFewSamples):
            hpd_interval(np.arange(19.0))

    @pytest.mark.parametrize("prob", [0.0, 1.0, 1.5])
    def test_prob_range(self, prob):
        with pytest.raises(ValueError):
            hpd_interval(np.arange(50.0), prob)

    @pytest.mark.parametrize("prob", [0.5, 0.9, 0.95])
    def test_agrees_with_arviz(self, rng, prob):
        x = rng.gamma(2.0, size=5000)
        assert hpd_interval(x, prob) == tuple(float(v) for v in az.hdi(x, hdi_prob=prob))


class TestDensityBand:
    def _trace(self, draws: int) -> Trace:
        gen = np.random.default_rng(draws)
        trace = Trace(grid=np.linspace(0.0, 1.0, 5))
        for _ in range(draws):
            trace.append(np.zeros(1), gen.uniform(0.5, 1.5, 5), 0.0)
        return trace

    def test_hpd_band(self):
        band = density_band(self._trace(40))
        assert band.mean.shape == (5,)
        assert np.all(band.lo <= band.mean) and np.all(band.mean <= band.hi)
        assert band.prob == 0.95

    def test_short_trace_uses_range(self):
        trace = self._trace(5)
        band = density_band(trace)
        assert band.lo == pytest.approx(trace.density_matrix().min(axis=0))
        assert band.hi == pytest.approx(trace.density_matrix().max(axis=0))

    def test_empty_trace(self):
        with pytest.raises(TooFewSamples):
            density_band(Trace(grid=np.linspace(0.0, 1.0, 5)))

    def test_local_maxima(self):
        grid = np.arange(5.0)
        mean = np.array([0.0, 1.0, 0.0, 2.0, 0.0])
        assert DensityBand(grid, mean, mean, mean, 0.95).local_maxima() == 2

    def test_plateau_is_not_a_maximum(self):
        mean = np.array([0.0, 1.0, 1.0, 0.0])
        assert DensityBand(np.arange(4.0), mean, mean, mean, 0.95).local_maxima() == 0
