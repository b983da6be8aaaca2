"""
sbamix.gibbs.trace
~~~~~~~~~~~~~~~~~~
Retained posterior draws of one or more chains.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from ..random_measures import JointDiscreteMeasure
from .slice import SliceDiagnostics


@dataclass
class Trace:
    """Append-only record of retained draws on a fixed density grid."""

    grid: np.ndarray
    loglik: list[np.ndarray] = field(default_factory=list)
    density: list[np.ndarray] = field(default_factory=list)
    mixing: list[JointDiscreteMeasure] = field(default_factory=list)
    means: list[float] = field(default_factory=list)
    diagnostics: SliceDiagnostics = field(default_factory=SliceDiagnostics)
    seeds: list[int | None] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.means)

    def append(
        self,
        loglik: np.ndarray,
        density: np.ndarray,
        mean: float,
        mixing: JointDiscreteMeasure | None = None,
    ) -> None:
        self.loglik.append(np.asarray(loglik, dtype=float))
        self.density.append(np.asarray(density, dtype=float))
        self.means.append(float(mean))
        if mixing is not None:
            self.mixing.append(mixing)

    def loglik_matrix(self) -> np.ndarray:
        """Draws x observations."""
        n_obs = self.loglik[0].size if self.loglik else 0
        return np.vstack(self.loglik) if self.loglik else np.empty((0, n_obs))

    def density_matrix(self) -> np.ndarray:
        """Draws x grid points."""
        return np.vstack(self.density) if self.density else np.empty((0, self.grid.size))

    def mean_density(self) -> np.ndarray:
        return self.density_matrix().mean(axis=0)

    @classmethod
    def merge(cls, traces: Iterable["Trace"]) -> "Trace":
        """Concatenate chains in the given order (all must share the grid)."""
        traces = list(traces)
        if not traces:
            raise ValueError("Nothing to merge.")
        merged = cls(grid=traces[0].grid)
        for t in traces:
            if not np.array_equal(t.grid, merged.grid):
                raise ValueError("Cannot merge traces evaluated on different grids.")
            merged.loglik.extend(t.loglik)
            merged.density.extend(t.density)
            merged.mixing.extend(t.mixing)
            merged.means.extend(t.means)
            merged.seeds.extend(t.seeds)
            merged.diagnostics = merged.diagnostics.merge(t.diagnostics)
        return merged
