"""
tests/conftest.py
~~~~~~~~~~~~~~~~~
Shared pytest fixtures for the sbamix test suite.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from sbamix.config import Settings
from sbamix.gibbs import FitConfig, GridSpec, Variant
from sbamix.kernels import KernelKind
from sbamix.measure_model import AnalyticMeasure, Domain, MeasureComponent
from sbamix.random_measures import NodeLaw, NodeLawFamily, ScaleLaw
from sbamix.sba import BarycenterArray, build_sba

CONFIGS = Path(__file__).parent.parent / "configs"


# ---------------------------------------------------------------------------
# Settings
# ---------------------------------------------------------------------------

@pytest.fixture
def default_settings() -> Settings:
    return Settings(_env_file=None)  # type: ignore[call-arg]


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


# ---------------------------------------------------------------------------
# Measures
# ---------------------------------------------------------------------------

@pytest.fixture
def unit_uniform() -> AnalyticMeasure:
    return AnalyticMeasure.uniform(0.0, 1.0, Domain.unit_interval())


@pytest.fixture
def two_points() -> AnalyticMeasure:
    return AnalyticMeasure.atoms([0.0, 1.0])


@pytest.fixture
def three_points() -> AnalyticMeasure:
    return AnalyticMeasure.atoms([0.0, 1.0, 2.0])


@pytest.fixture
def four_part() -> AnalyticMeasure:
    """Uniform pieces on [-2, -1] and [1, 2] with atoms at -1 and 1; mean 0."""
    return AnalyticMeasure.mixture([
        (0.25, MeasureComponent.uniform(-2.0, -1.0)),
        (0.25, MeasureComponent.point_mass(-1.0)),
        (0.25, MeasureComponent.point_mass(1.0)),
        (0.25, MeasureComponent.uniform(1.0, 2.0)),
    ])


@pytest.fixture
def uniform_array(unit_uniform) -> BarycenterArray:
    return build_sba(unit_uniform, 2)


# ---------------------------------------------------------------------------
# Priors
# ---------------------------------------------------------------------------

@pytest.fixture
def normal_family() -> NodeLawFamily:
    return NodeLawFamily(2, NodeLaw.normal(0.0, 1.0))


@pytest.fixture
def centred_family() -> NodeLawFamily:
    """Depth-1 family with the mean pinned at 0."""
    return NodeLawFamily(
        1, NodeLaw.normal(0.0, 1.0), {(1, 1): NodeLaw.degenerate(0.0)}
    )


@pytest.fixture
def unit_family() -> NodeLawFamily:
    return NodeLawFamily(2, NodeLaw.uniform(0.0, 1.0), domain=Domain.unit_interval())


@pytest.fixture
def ig_prior() -> ScaleLaw:
    return ScaleLaw.inverse_gamma(0.5, 1.5)


@pytest.fixture
def fit_config(normal_family, ig_prior) -> FitConfig:
    return FitConfig(
        kernel=KernelKind.GAUSSIAN,
        variant=Variant.PARSIMONIOUS,
        family=normal_family,
        scale_prior=ig_prior,
        iterations=20,
        burn_in=5,
        thin=3,
        seed=42,
        grid=GridSpec(-4.0, 4.0, 41),
        progress_every=0,
    )


@pytest.fixture
def general_config(normal_family, ig_prior) -> FitConfig:
    return FitConfig(
        kernel=KernelKind.GAUSSIAN,
        variant=Variant.GENERAL,
        family=normal_family,
        scale_prior=ig_prior,
        iterations=20,
        burn_in=5,
        thin=3,
        seed=42,
        m2=2,
        alpha=(1.0, 1.0),
        grid=GridSpec(-4.0, 4.0, 41),
        progress_every=0,
    )


# ---------------------------------------------------------------------------
# Data and files
# ---------------------------------------------------------------------------

@pytest.fixture
def bimodal_data() -> np.ndarray:
    gen = np.random.default_rng(5)
    return np.concatenate([gen.normal(-2.0, 0.5, 15), gen.normal(2.0, 0.5, 15)])


@pytest.fixture
def data_csv(tmp_path, bimodal_data) -> Path:
    path = tmp_path / "data.csv"
    path.write_text("y\n" + "\n".join(repr(float(v)) for v in bimodal_data) + "\n")
    return path


@pytest.fixture
def quick_fit_toml(tmp_path) -> Path:
    path = tmp_path / "fit.toml"
    path.write_text(
        '[prior]\n'
        'variant = "parsimonious"\n'
        'depth = 2\n'
        'default_law = { kind = "normal", mean = 0.0, sd = 3.0 }\n'
        'scale = { kind = "inverse-gamma", shape = 2.0, rate = 1.0 }\n'
        '\n'
        '[fit]\n'
        'kernel = "gaussian"\n'
        'iterations = 60\n'
        'burn_in = 10\n'
        'thin = 2\n'
        'seed = 3\n'
        'grid = { lo = -5.0, hi = 5.0, count = 51 }\n'
    )
    return path


@pytest.fixture
def configs_dir() -> Path:
    return CONFIGS
