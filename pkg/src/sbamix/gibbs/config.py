"""
sbamix.gibbs.config
~~~~~~~~~~~~~~~~~~~
Immutable snapshot of everything one MCMC run needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..exceptions import ModelConstructionError
from ..kernels import KernelKind
from ..random_measures import NodeLawFamily, ScaleLaw


class Variant(str, Enum):
    PARSIMONIOUS = "parsimonious"
    GENERAL = "general"


class NodeTarget(str, Enum):
    """
    ``marginal``: node prior density times the marginal likelihood.
    ``joint``: additionally divides by the restricted-prior normalisers of
    the descendants whose cells move with the node.
    """

    MARGINAL = "marginal"
    JOINT = "joint"


class PhiSampler(str, Enum):
    SLICE = "slice"
    RW = "rw"


@dataclass(frozen=True)
class SliceSettings:
    width_fraction: float = 1.0
    max_shrink: int = 100
    max_steps: int = 50

    def __post_init__(self) -> None:
        if not 0.0 < self.width_fraction <= 1.0:
            raise ModelConstructionError("width_fraction must lie in (0, 1].")
        if self.max_shrink < 1 or self.max_steps < 1:
            raise ModelConstructionError("max_shrink and max_steps must be >= 1.")


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    count: int = 200

    def __post_init__(self) -> None:
        if not (self.lo < self.hi and self.count >= 2):
            raise ModelConstructionError("Grid needs lo < hi and at least 2 points.")

    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)

    @classmethod
    def around(cls, data: np.ndarray, kernel: KernelKind, count: int = 200) -> "GridSpec":
        """Grid covering the data range padded by 10% on each side (kept inside the sample space)."""
        data = np.asarray(data, dtype=float)
        if data.size == 0:
            lo, hi = (0.0, 1.0) if kernel is not KernelKind.GAUSSIAN else (-3.0, 3.0)
        else:
            lo, hi = float(data.min()), float(data.max())
            pad = 0.1 * (hi - lo) if hi > lo else 1.0
            lo, hi = lo - pad, hi + pad
        if kernel is KernelKind.BETA:
            lo, hi = max(lo, 1e-3), min(hi, 1.0 - 1e-3)
        elif kernel is KernelKind.GAMMA:
            lo = max(lo, 1e-3)
        return cls(lo, hi, count)


@dataclass(frozen=True)
class FitConfig:
    """Run settings for one chain set at a single depth ``n``."""

    kernel: KernelKind
    variant: Variant
    family: NodeLawFamily
    scale_prior: ScaleLaw
    iterations: int
    burn_in: int = 0
    thin: int = 1
    seed: int | None = None
    m2: int = 1
    alpha: tuple[float, ...] = (1.0,)
    slice: SliceSettings = field(default_factory=SliceSettings)
    grid: GridSpec | None = None
    node_target: NodeTarget = NodeTarget.MARGINAL
    update_nodes: bool = True
    phi_sampler: PhiSampler = PhiSampler.SLICE
    phi_step: float = 1.0
    rw_scale: float = 0.5
    keep_mixing: bool = True
    progress_every: int = 1000

    def __post_init__(self) -> None:
        if self.iterations < 1 or not 0 <= self.burn_in < self.iterations:
            raise ModelConstructionError("Need iterations >= 1 and 0 <= burn_in < iterations.")
        if self.thin < 1:
            raise ModelConstructionError("thin must be >= 1.")
        if self.variant is Variant.GENERAL:
            if self.m2 < 1 or len(self.alpha) != self.m2 or min(self.alpha) <= 0:
                raise ModelConstructionError("General variant needs m2 >= 1 and m2 positive alphas.")
        if self.phi_step <= 0 or self.rw_scale <= 0:
            raise ModelConstructionError("phi_step and rw_scale must be positive.")

    @property
    def n(self) -> int:
        return self.family.depth

    @property
    def retained(self) -> int:
        return (self.iterations - self.burn_in) // self.thin

    def is_retained(self, t: int) -> bool:
        """True when iteration ``t`` (1-based) is kept."""
        return t > self.burn_in and (t - self.burn_in) % self.thin == 0

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel.value,
            "variant": self.variant.value,
            "n": self.n,
            "family": self.family.to_dict(),
            "scale_prior": self.scale_prior.to_dict(),
            "iterations": self.iterations,
            "burn_in": self.burn_in,
            "thin": self.thin,
            "seed": self.seed,
            "m2": self.m2,
            "alpha": list(self.alpha),
            "slice": {
                "width_fraction": self.slice.width_fraction,
                "max_shrink": self.slice.max_shrink,
                "max_steps": self.slice.max_steps,
            },
            "grid": None if self.grid is None else {
                "lo": self.grid.lo, "hi": self.grid.hi, "count": self.grid.count,
            },
            "node_target": self.node_target.value,
            "update_nodes": self.update_nodes,
            "phi_sampler": self.phi_sampler.value,
            "phi_step": self.phi_step,
            "rw_scale": self.rw_scale,
        }
