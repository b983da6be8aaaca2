"""
sbamix
~~~~~~
Sequential barycenter arrays and the random measures built on them:
discrete approximations of probability measures, mean-constrained priors
and Gibbs samplers for location-scale mixture models.

Typical usage::

    from sbamix import AnalyticMeasure, approximate, wasserstein_p

    g = AnalyticMeasure.uniform(0.0, 1.0)
    g4 = approximate(g, 4)          # 16 atoms, same mean as g
    wasserstein_p(g, g4)            # 2**-6
"""

from .config import RunConfig, Settings, settings
from .exceptions import (
    AllMinusInfinity,
    ConfigParseError,
    DegenerateInterval,
    DegenerateOutsideInterval,
    DomainError,
    InvalidArray,
    InvalidNodeLaw,
    ModelConstructionError,
    NonFiniteTarget,
    NumericalError,
    SBAMixError,
    TooFewSamples,
    ZeroMassUnboundedInterval,
)
from .gibbs import FitConfig, Trace, run_chain, run_chains
from .kernels import KernelKind, density_grid, log_kernel, mixture_logpdf
from .measure_model import AnalyticMeasure, ComponentKind, Domain, MeasureComponent
from .metrics import (
    LogLikMatrix,
    density_band,
    hellinger_grid,
    hpd_interval,
    lpml_cpo,
    waic,
    wasserstein_p,
)
from .random_measures import (
    JointDiscreteMeasure,
    NodeLaw,
    NodeLawFamily,
    ScaleLaw,
    sample_dsba,
    sample_dsbasg,
    sample_dsbasp,
    sample_restricted,
)
from .sba import (
    BarycenterArray,
    DiscreteMeasure,
    Violation,
    approximate,
    build_sba,
    cells,
    discrete_mean,
    invert_cdf,
    is_regular,
    validate_sba,
    weights_level_n,
)

__all__ = [
    # Measures and arrays
    "AnalyticMeasure",
    "BarycenterArray",
    "ComponentKind",
    "DiscreteMeasure",
    "Domain",
    "MeasureComponent",
    "Violation",
    "approximate",
    "build_sba",
    "cells",
    "discrete_mean",
    "invert_cdf",
    "is_regular",
    "validate_sba",
    "weights_level_n",
    # Random measures
    "JointDiscreteMeasure",
    "NodeLaw",
    "NodeLawFamily",
    "ScaleLaw",
    "sample_dsba",
    "sample_dsbasg",
    "sample_dsbasp",
    "sample_restricted",
    # Kernels
    "KernelKind",
    "density_grid",
    "log_kernel",
    "mixture_logpdf",
    # Sampling
    "FitConfig",
    "Trace",
    "run_chain",
    "run_chains",
    # Metrics
    "LogLikMatrix",
    "density_band",
    "hellinger_grid",
    "hpd_interval",
    "lpml_cpo",
    "waic",
    "wasserstein_p",
    # Configuration
    "RunConfig",
    "Settings",
    "settings",
    # Exceptions
    "SBAMixError",
    "ConfigParseError",
    "ModelConstructionError",
    "InvalidArray",
    "ZeroMassUnboundedInterval",
    "DegenerateOutsideInterval",
    "InvalidNodeLaw",
    "DegenerateInterval",
    "TooFewSamples",
    "DomainError",
    "NumericalError",
    "NonFiniteTarget",
    "AllMinusInfinity",
]
