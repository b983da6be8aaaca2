"""
sbamix.config
~~~~~~~~~~~~~
All configuration for sbamix in one place.

  Settings   - process-wide settings (env prefix: SBAMIX_)
  RunConfig  - schema of the TOML run file read by the CLI
  FitConfig  - immutable snapshot returned by RunConfig.fit_config()

Override settings via environment variables or a .env file:
  SBAMIX_LOG_LEVEL=INFO
  SBAMIX_PROGRESS_EVERY=5000

A run file looks like::

    [prior]
    variant = "parsimonious"
    depth = 4
    default_law = { kind = "normal", mean = 30.0, sd = 7.65 }
    scale = { kind = "inverse-gamma", shape = 0.5, rate = 1.5 }

    [fit]
    kernel = "gaussian"
    iterations = 220000
    burn_in = 20000
    thin = 10
    seed = 20240601
"""

from __future__ import annotations

import math
import sys
from pathlib import Path
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .exceptions import ConfigParseError, ModelConstructionError
from .gibbs.config import (
    FitConfig,
    GridSpec,
    NodeTarget,
    PhiSampler,
    SliceSettings,
    Variant,
)
from .kernels import KernelKind
from .measure_model import AnalyticMeasure, Domain, MeasureComponent
from .random_measures import NodeLaw, NodeLawFamily, ScaleLaw

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


# ---------------------------------------------------------------------------
# Process-wide settings
# ---------------------------------------------------------------------------

class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="SBAMIX_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    log_level:      str  = Field(default="WARNING")
    float_digits:   int  = Field(default=17, ge=6, le=17)
    progress_every: int  = Field(default=1000, ge=0)
    default_chains: int  = Field(default=1, ge=1)
    debug_sweeps:   bool = Field(default=False)

    @field_validator("log_level")
    @classmethod
    def _upper_level(cls, v: str) -> str:
        level = v.strip().upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"Unknown log level {v!r}.")
        return level


# ---------------------------------------------------------------------------
# Run file schema
# ---------------------------------------------------------------------------

class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class DomainSpec(_Section):
    lower: float = -math.inf
    upper: float = math.inf

    def to_domain(self) -> Domain:
        return Domain(self.lower, self.upper)


class ComponentSpec(_Section):
    weight:   float = Field(gt=0.0, le=1.0)
    kind:     Literal["point", "point-mass", "uniform", "uniform-segment"]
    location: Optional[float] = None
    a:        Optional[float] = None
    b:        Optional[float] = None

    @model_validator(mode="after")
    def _fields_for_kind(self) -> "ComponentSpec":
        if self.kind.startswith("point") and self.location is None:
            raise ValueError("a point mass needs 'location'")
        if self.kind.startswith("uniform") and (self.a is None or self.b is None):
            raise ValueError("a uniform segment needs 'a' and 'b'")
        return self

    def to_component(self) -> tuple[float, MeasureComponent]:
        if self.kind.startswith("point"):
            return self.weight, MeasureComponent.point_mass(self.location)
        return self.weight, MeasureComponent.uniform(self.a, self.b)


class MeasureSpec(_Section):
    domain:     DomainSpec = Field(default_factory=DomainSpec)
    components: list[ComponentSpec] = Field(min_length=1)
    depth:      int = Field(default=4, ge=1, le=20)

    def to_measure(self) -> AnalyticMeasure:
        return AnalyticMeasure.mixture(
            (c.to_component() for c in self.components), self.domain.to_domain()
        )


class NodeLawSpec(_Section):
    kind:  Literal["normal", "degenerate", "uniform"] = "normal"
    mean:  float = 0.0
    sd:    float = Field(default=1.0, gt=0.0)
    value: Optional[float] = None
    a:     Optional[float] = None
    b:     Optional[float] = None

    def to_law(self) -> NodeLaw:
        if self.kind == "degenerate":
            if self.value is None:
                raise ModelConstructionError("A degenerate node law needs 'value'.")
            return NodeLaw.degenerate(self.value)
        if self.kind == "uniform":
            if self.a is None or self.b is None:
                raise ModelConstructionError("A uniform node law needs 'a' and 'b'.")
            return NodeLaw.uniform(self.a, self.b)
        return NodeLaw.normal(self.mean, self.sd)


class OverrideSpec(_Section):
    node: tuple[int, int]
    law:  NodeLawSpec


class ScaleSpec(_Section):
    kind:  Literal["inverse-gamma", "gamma", "log-normal"] = "inverse-gamma"
    shape: float = Field(default=0.5, gt=0.0)
    rate:  float = Field(default=1.5, gt=0.0)
    mu:    float = 0.0
    sigma: float = Field(default=1.0, gt=0.0)

    def to_law(self) -> ScaleLaw:
        if self.kind == "gamma":
            return ScaleLaw.gamma(self.shape, self.rate)
        if self.kind == "log-normal":
            return ScaleLaw.log_normal(self.mu, self.sigma)
        return ScaleLaw.inverse_gamma(self.shape, self.rate)


class PriorSpec(_Section):
    variant:     Literal["parsimonious", "general"] = "parsimonious"
    depth:       int = Field(default=4, ge=1, le=20)
    depths:      Optional[list[int]] = None
    m2:          Optional[int] = Field(default=None, ge=1)
    alpha:       Optional[list[float]] = None
    domain:      Optional[DomainSpec] = None
    default_law: NodeLawSpec = Field(default_factory=NodeLawSpec)
    overrides:   list[OverrideSpec] = Field(default_factory=list)
    scale:       ScaleSpec = Field(default_factory=ScaleSpec)

    @field_validator("depths")
    @classmethod
    def _depths_in_range(cls, v: Optional[list[int]]) -> Optional[list[int]]:
        if v is not None and (not v or any(not 1 <= d <= 20 for d in v)):
            raise ValueError("depths must be a non-empty list of integers in [1, 20]")
        return v

    @field_validator("alpha")
    @classmethod
    def _alpha_positive(cls, v: Optional[list[float]]) -> Optional[list[float]]:
        if v is not None and any(a <= 0 for a in v):
            raise ValueError("alpha entries must be positive")
        return v

    def depth_list(self) -> list[int]:
        return list(self.depths) if self.depths else [self.depth]

    def resolved_m2(self, n: int) -> int:
        if self.m2 is not None:
            return self.m2
        return len(self.alpha) if self.alpha else n

    def resolved_alpha(self, n: int) -> tuple[float, ...]:
        m2 = self.resolved_m2(n)
        alpha = tuple(self.alpha) if self.alpha else (1.0,) * m2
        if len(alpha) != m2:
            raise ModelConstructionError(f"alpha has {len(alpha)} entries but m2 = {m2}.")
        return alpha

    def family(self, n: int, domain: Domain) -> NodeLawFamily:
        overrides = {
            (o.node[0], o.node[1]): o.law.to_law()
            for o in self.overrides if o.node[0] <= n + 1
        }
        return NodeLawFamily(n, self.default_law.to_law(), overrides, domain)


class GridModel(_Section):
    lo:    float
    hi:    float
    count: int = Field(default=200, ge=2)

    @model_validator(mode="after")
    def _ordered(self) -> "GridModel":
        if not self.lo < self.hi:
            raise ValueError("grid needs lo < hi")
        return self


class FitSpec(_Section):
    kernel:               Literal["gaussian", "beta", "gamma"] = "gaussian"
    iterations:           int = Field(default=2000, ge=1)
    burn_in:              int = Field(default=0, ge=0)
    thin:                 int = Field(default=1, ge=1)
    seed:                 Optional[int] = None
    chains:               Optional[int] = Field(default=None, ge=1)
    slice_width_fraction: float = Field(default=1.0, gt=0.0, le=1.0)
    max_shrink:           int = Field(default=100, ge=1)
    max_steps:            int = Field(default=50, ge=1)
    grid:                 Optional[GridModel] = None
    grid_count:           int = Field(default=200, ge=2)
    node_target:          Literal["marginal", "joint"] = "marginal"
    update_nodes:         bool = True
    phi_sampler:          Literal["slice", "rw"] = "slice"
    phi_step:             float = Field(default=1.0, gt=0.0)
    rw_scale:             float = Field(default=0.5, gt=0.0)

    @model_validator(mode="after")
    def _burn_in_below_iterations(self) -> "FitSpec":
        if self.burn_in >= self.iterations:
            raise ValueError("burn_in must be smaller than iterations")
        return self


class OutputSpec(_Section):
    write_mixing: bool = True
    band_prob:    float = Field(default=0.95, gt=0.0, lt=1.0)


class RunConfig(_Section):
    """One TOML file fully determines a run."""

    measure: Optional[MeasureSpec] = None
    prior:   Optional[PriorSpec] = None
    fit:     FitSpec = Field(default_factory=FitSpec)
    output:  OutputSpec = Field(default_factory=OutputSpec)

    # ------------------------------------------------------------------
    # Loading
    # ------------------------------------------------------------------

    @classmethod
    def from_toml_text(cls, text: str, source: str = "<config>") -> "RunConfig":
        """
        Raises:
            ConfigParseError: TOML syntax error (with line number) or schema violation.
        """
        try:
            raw = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigParseError(f"{source}: {exc}", cause=exc) from exc
        try:
            return cls.model_validate(raw)
        except ValidationError as exc:
            first = exc.errors()[0]
            where = ".".join(str(p) for p in first["loc"]) or "<root>"
            raise ConfigParseError(f"{source}: [{where}] {first['msg']}", cause=exc) from exc

    @classmethod
    def from_toml(cls, path: Path) -> "RunConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigParseError(f"Cannot read config file {path}.", cause=exc) from exc
        return cls.from_toml_text(text, str(path))

    # ------------------------------------------------------------------
    # Derived objects
    # ------------------------------------------------------------------

    def require_measure(self) -> MeasureSpec:
        if self.measure is None:
            raise ConfigParseError("Config has no [measure] section.")
        return self.measure

    def require_prior(self) -> PriorSpec:
        if self.prior is None:
            raise ConfigParseError("Config has no [prior] section.")
        return self.prior

    @property
    def kernel(self) -> KernelKind:
        return KernelKind(self.fit.kernel)

    def prior_domain(self) -> Domain:
        prior = self.require_prior()
        return prior.domain.to_domain() if prior.domain else self.kernel.location_space

    def family(self, n: int) -> NodeLawFamily:
        return self.require_prior().family(n, self.prior_domain())

    def fit_config(
        self,
        n: int,
        *,
        seed: int | None = None,
        data: np.ndarray | None = None,
        progress_every: int | None = None,
    ) -> FitConfig:
        """
        Frozen sampler settings at depth ``n``.

        ``seed`` overrides ``[fit].seed``.  Without an explicit ``[fit.grid]``
        the density grid is padded around ``data`` when it is given.
        """
        prior, fit = self.require_prior(), self.fit
        general = prior.variant == "general"
        if fit.grid is not None:
            grid = GridSpec(fit.grid.lo, fit.grid.hi, fit.grid.count)
        elif data is not None:
            grid = GridSpec.around(data, self.kernel, fit.grid_count)
        else:
            grid = None
        return FitConfig(
            kernel=self.kernel,
            variant=Variant(prior.variant),
            family=self.family(n),
            scale_prior=prior.scale.to_law(),
            iterations=fit.iterations,
            burn_in=fit.burn_in,
            thin=fit.thin,
            seed=fit.seed if seed is None else seed,
            m2=prior.resolved_m2(n) if general else 1,
            alpha=prior.resolved_alpha(n) if general else (1.0,),
            slice=SliceSettings(fit.slice_width_fraction, fit.max_shrink, fit.max_steps),
            grid=grid,
            node_target=NodeTarget(fit.node_target),
            update_nodes=fit.update_nodes,
            phi_sampler=PhiSampler(fit.phi_sampler),
            phi_step=fit.phi_step,
            rw_scale=fit.rw_scale,
            keep_mixing=self.output.write_mixing,
            progress_every=settings.progress_every if progress_every is None else progress_every,
        )


# ---------------------------------------------------------------------------
# Module-level singleton
# ---------------------------------------------------------------------------

settings = Settings()

__all__ = [
    "ComponentSpec",
    "DomainSpec",
    "FitSpec",
    "MeasureSpec",
    "NodeLawSpec",
    "PriorSpec",
    "RunConfig",
    "ScaleSpec",
    "Settings",
    "settings",
]
