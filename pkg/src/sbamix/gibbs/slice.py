"""
sbamix.gibbs.slice
~~~~~~~~~~~~~~~~~~
Univariate slice samplers (bounded shrinkage and stepping-out) and a
random-walk Metropolis fallback.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..exceptions import NonFiniteTarget

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

LogTarget = Callable[[float], float]


@dataclass
class SliceDiagnostics:
    """Running counters; one instance per chain."""

    evaluations: int = 0
    shrink_exhausted: int = 0
    skipped_nodes: int = 0
    rw_proposals: int = 0
    rw_accepted: int = 0

    @property
    def rw_acceptance(self) -> float:
        return self.rw_accepted / self.rw_proposals if self.rw_proposals else 0.0

    def merge(self, other: "SliceDiagnostics") -> "SliceDiagnostics":
        return SliceDiagnostics(
            self.evaluations + other.evaluations,
            self.shrink_exhausted + other.shrink_exhausted,
            self.skipped_nodes + other.skipped_nodes,
            self.rw_proposals + other.rw_proposals,
            self.rw_accepted + other.rw_accepted,
        )

    def to_dict(self) -> dict:
        return {
            "evaluations": self.evaluations,
            "shrink_exhausted": self.shrink_exhausted,
            "skipped_nodes": self.skipped_nodes,
            "rw_proposals": self.rw_proposals,
            "rw_accepted": self.rw_accepted,
        }


def _evaluate(logtarget: LogTarget, x: float, diagnostics: SliceDiagnostics | None) -> float:
    if diagnostics is not None:
        diagnostics.evaluations += 1
    value = logtarget(x)
    return -math.inf if math.isnan(value) else value


def _start(logtarget: LogTarget, init: float, diagnostics: SliceDiagnostics | None) -> float:
    f0 = _evaluate(logtarget, init, diagnostics)
    if not math.isfinite(f0):
        raise NonFiniteTarget(f"Log target is {f0} at the current point {init!r}.")
    return f0


def _shrink(
    logtarget: LogTarget,
    lo: float,
    hi: float,
    init: float,
    log_y: float,
    max_shrink: int,
    rng: np.random.Generator,
    diagnostics: SliceDiagnostics | None,
) -> float:
    for _ in range(max_shrink):
        x = lo + (hi - lo) * (1.0 - rng.random())
        if lo < x < hi and _evaluate(logtarget, x, diagnostics) > log_y:
            return x
        if x < init:
            lo = x
        else:
            hi = x
    if diagnostics is not None:
        diagnostics.shrink_exhausted += 1
    logger.debug("Slice shrinkage exhausted after %d steps; keeping %r", max_shrink, init)
    return init


def slice_sample_bounded(
    logtarget: LogTarget,
    bracket: tuple[float, float],
    init: float,
    max_shrink: int,
    rng: np.random.Generator,
    diagnostics: SliceDiagnostics | None = None,
) -> float:
    """
    One slice-sampling step on a bounded bracket using shrinkage only.

    Proposals land strictly inside the bracket.  After ``max_shrink``
    rejected proposals the current point is returned unchanged.

    Raises:
        NonFiniteTarget: ``logtarget(init)`` is not finite.
    """
    lo, hi = bracket
    if not lo < init <= hi:
        raise ValueError(f"Initial point {init!r} is outside ({lo}, {hi}].")
    f0 = _start(logtarget, init, diagnostics)
    log_y = f0 - rng.exponential()
    return _shrink(logtarget, lo, hi, init, log_y, max_shrink, rng, diagnostics)


def slice_sample_stepout(
    logtarget: LogTarget,
    init: float,
    width: float,
    rng: np.random.Generator,
    *,
    max_steps: int = 50,
    max_shrink: int = 100,
    diagnostics: SliceDiagnostics | None = None,
) -> float:
    """One stepping-out slice step on an unbounded coordinate."""
    f0 = _start(logtarget, init, diagnostics)
    log_y = f0 - rng.exponential()
    lo = init - width * rng.random()
    hi = lo + width
    left_steps = int(math.floor(max_steps * rng.random()))
    right_steps = max_steps - 1 - left_steps
    while left_steps > 0 and _evaluate(logtarget, lo, diagnostics) > log_y:
        lo -= width
        left_steps -= 1
    while right_steps > 0 and _evaluate(logtarget, hi, diagnostics) > log_y:
        hi += width
        right_steps -= 1
    return _shrink(logtarget, lo, hi, init, log_y, max_shrink, rng, diagnostics)


def rw_metropolis(
    logtarget: LogTarget,
    init: float,
    scale: float,
    rng: np.random.Generator,
    diagnostics: SliceDiagnostics | None = None,
) -> float:
    """Gaussian random-walk Metropolis step."""
    f0 = _start(logtarget, init, diagnostics)
    proposal = init + scale * rng.standard_normal()
    f1 = _evaluate(logtarget, proposal, diagnostics)
    if diagnostics is not None:
        diagnostics.rw_proposals += 1
    if math.log(1.0 - rng.random()) < f1 - f0:
        if diagnostics is not None:
            diagnostics.rw_accepted += 1
        return proposal
    return init
