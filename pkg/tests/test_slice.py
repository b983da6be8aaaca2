"""
tests/test_slice.py
~~~~~~~~~~~~~~~~~~~
Tests for sbamix.gibbs.slice — bounded and stepping-out slice steps, the
random-walk fallback and the diagnostic counters.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import stats

from sbamix.exceptions import NonFiniteTarget
from sbamix.gibbs.slice import (
    SliceDiagnostics,
    rw_metropolis,
    slice_sample_bounded,
    slice_sample_stepout,
)


def _flat(x: float) -> float:
    return 0.0


def _std_normal(x: float) -> float:
    return -0.5 * x * x


def _chain(step, init: float, size: int) -> np.ndarray:
    out = np.empty(size)
    x = init
    for i in range(size):
        x = step(x)
        out[i] = x
    return out


# ---------------------------------------------------------------------------
# Bounded slice
# ---------------------------------------------------------------------------

class TestSliceBounded:
    def test_flat_target_is_uniform(self, rng):
        draws = _chain(lambda x: slice_sample_bounded(_flat, (0.0, 1.0), x, 100, rng), 0.5, 10_000)
        assert stats.kstest(draws, "uniform").statistic < 0.02

    def test_stays_inside_bracket(self, rng):
        for _ in range(500):
            x = slice_sample_bounded(_std_normal, (-0.3, 0.1), 0.0, 100, rng)
            assert -0.3 < x <= 0.1

    def test_truncated_normal_moments(self, rng):
        draws = _chain(
            lambda x: slice_sample_bounded(_std_normal, (-2.0, 2.0), x, 100, rng), 0.0, 20_000
        )
        ref = stats.truncnorm(-2.0, 2.0)
        assert abs(draws.mean()) < 0.05
        assert draws.var() == pytest.approx(ref.var(), abs=0.05)

    def test_seeded_determinism(self):
        first = slice_sample_bounded(_std_normal, (-1.0, 1.0), 0.2, 100, np.random.default_rng(1))
        second = slice_sample_bounded(_std_normal, (-1.0, 1.0), 0.2, 100, np.random.default_rng(1))
        assert first == second

    def test_non_finite_start(self, rng):
        with pytest.raises(NonFiniteTarget) as info:
            slice_sample_bounded(lambda x: -math.inf, (0.0, 1.0), 0.5, 100, rng)
        assert info.value.exit_code == 5

    def test_nan_start_is_non_finite(self, rng):
        with pytest.raises(NonFiniteTarget):
            slice_sample_bounded(lambda x: math.nan, (0.0, 1.0), 0.5, 100, rng)

    def test_start_outside_bracket(self, rng):
        with pytest.raises(ValueError):
            slice_sample_bounded(_flat, (0.0, 1.0), 1.5, 100, rng)

    def test_exhausted_shrinkage_keeps_current_point(self, rng):
        diagnostics = SliceDiagnostics()

        def spike(x: float) -> float:
            return 0.0 if x == 0.5 else -math.inf

        x = slice_sample_bounded(spike, (0.0, 1.0), 0.5, 25, rng, diagnostics)
        assert x == 0.5
        assert diagnostics.shrink_exhausted == 1
        assert diagnostics.evaluations == 26


# ---------------------------------------------------------------------------
# Stepping out
# ---------------------------------------------------------------------------

class TestSliceStepout:
    def test_normal_moments(self, rng):
        draws = _chain(lambda x: slice_sample_stepout(_std_normal, x, 1.0, rng), 0.0, 20_000)
        assert abs(draws.mean()) < 0.05
        assert draws.var() == pytest.approx(1.0, abs=0.08)

    def test_narrow_width_still_moves(self, rng):
        draws = _chain(lambda x: slice_sample_stepout(_std_normal, x, 0.05, rng), 3.0, 500)
        assert draws.min() < 1.0

    def test_counts_evaluations(self, rng):
        diagnostics = SliceDiagnostics()
        slice_sample_stepout(_std_normal, 0.0, 1.0, rng, diagnostics=diagnostics)
        assert diagnostics.evaluations >= 3


# ---------------------------------------------------------------------------
# Random-walk Metropolis
# ---------------------------------------------------------------------------

class TestRandomWalk:
    def test_normal_mean(self, rng):
        draws = _chain(lambda x: rw_metropolis(_std_normal, x, 2.0, rng), 0.0, 20_000)
        assert abs(draws.mean()) < 0.1

    def test_acceptance_tracked(self, rng):
        diagnostics = SliceDiagnostics()
        x = 0.0
        for _ in range(200):
            x = rw_metropolis(_std_normal, x, 1.0, rng, diagnostics)
        assert diagnostics.rw_proposals == 200
        assert 0.0 < diagnostics.rw_acceptance < 1.0

    def test_rejects_into_minus_infinity(self, rng):
        def half(x: float) -> float:
            return 0.0 if x > 0 else -math.inf

        for _ in range(100):
            assert rw_metropolis(half, 0.01, 5.0, rng) > 0


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------

class TestSliceDiagnostics:
    def test_merge_adds_counters(self):
        a = SliceDiagnostics(evaluations=3, rw_proposals=2, rw_accepted=1)
        b = SliceDiagnostics(evaluations=4, skipped_nodes=1)
        merged = a.merge(b)
        assert merged.evaluations == 7
        assert merged.skipped_nodes == 1
        assert merged.rw_acceptance == 0.5

    def test_acceptance_without_proposals(self):
        assert SliceDiagnostics().rw_acceptance == 0.0

    def test_to_dict(self):
        assert set(SliceDiagnostics().to_dict()) == {
            "evaluations", "shrink_exhausted", "skipped_nodes", "rw_proposals", "rw_accepted",
        }
