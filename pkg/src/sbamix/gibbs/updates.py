"""
sbamix.gibbs.updates
~~~~~~~~~~~~~~~~~~~~
Individual Gibbs updates.  Each function takes a ``ChainState``, mutates it
in place, refreshes the caches it invalidated and returns it.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from ..exceptions import AllMinusInfinity, DegenerateInterval
from ..kernels import KernelKind, clamp_parameters, log_kernel_unchecked
from ..random_measures import NodeLaw, NodeLawFamily, NodeLawKind, ScaleLaw, ScaleLawKind
from ..sba import BarycenterArray
from .config import FitConfig, NodeTarget, PhiSampler, Variant
from .slice import rw_metropolis, slice_sample_bounded, slice_sample_stepout
from .state import ChainState, safe_log

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

MIN_INTERVAL_WIDTH = 1e-13
_MAX_LOG_SCALE = 700.0


# ---------------------------------------------------------------------------
# Allocations
# ---------------------------------------------------------------------------

def draw_categorical(log_p: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """
    One categorical draw per row of unnormalised log probabilities.

    Raises:
        AllMinusInfinity: Some row has no finite entry.
    """
    top = log_p.max(axis=1, keepdims=True)
    if np.any(~np.isfinite(top)):
        row = int(np.flatnonzero(~np.isfinite(top[:, 0]))[0])
        raise AllMinusInfinity(f"Every component has zero density at observation {row}.")
    p = np.exp(log_p - top)
    cum = np.cumsum(p, axis=1)
    cum /= cum[:, -1:]
    cum[:, -1] = 1.0
    u = 1.0 - rng.random(log_p.shape[0])
    return (cum < u[:, None]).sum(axis=1).astype(np.intp)


def update_allocations_parsimonious(state: ChainState, rng: np.random.Generator) -> ChainState:
    if state.y.size:
        state.alloc_theta = draw_categorical(safe_log(state.weights)[None, :] + state.log_k, rng)
    return state


def update_allocations_general(state: ChainState, rng: np.random.Generator) -> ChainState:
    """Joint draw of (location, scale) labels over all ``m1 * m2`` pairs."""
    if not state.y.size:
        return state
    m2 = state.phis.size
    log_p = (
        safe_log(state.weights)[None, :, None]
        + safe_log(state.scale_weights)[None, :, :]
        + state.full_log_kernel()
    )
    flat = draw_categorical(log_p.reshape(state.y.size, -1), rng)
    state.alloc_theta, state.alloc_phi = flat // m2, flat % m2
    return state


# ---------------------------------------------------------------------------
# Scale atoms
# ---------------------------------------------------------------------------

def inverse_gamma_posterior(prior: ScaleLaw, residuals: np.ndarray) -> ScaleLaw:
    """Conjugate Inverse-Gamma update for a Gaussian variance given residuals."""
    residuals = np.asarray(residuals, dtype=float)
    return ScaleLaw.inverse_gamma(
        prior.a + 0.5 * residuals.size, prior.b + 0.5 * float(np.sum(residuals ** 2))
    )


def _conjugate_draws(
    prior: ScaleLaw, labels: np.ndarray, residuals: np.ndarray, size: int, rng: np.random.Generator
) -> np.ndarray:
    return np.array([
        inverse_gamma_posterior(prior, residuals[labels == j]).sample(rng)
        for j in range(size)
    ])


def update_phi_gaussian(state: ChainState, prior: ScaleLaw, rng: np.random.Generator) -> ChainState:
    """Redraw every variance from its Inverse-Gamma full conditional (prior when the cluster is empty)."""
    if state.kernel is not KernelKind.GAUSSIAN or prior.kind is not ScaleLawKind.INVERSE_GAMMA:
        raise ValueError("Conjugate update needs a gaussian kernel and an inverse-gamma prior.")
    residuals = state.y - state.theta[state.alloc_theta]
    state.phis = _conjugate_draws(prior, state.alloc_theta, residuals, state.m1, rng)
    state.refresh_kernels()
    return state


def _scale_target(
    kernel: KernelKind, y: np.ndarray, theta: np.ndarray, prior: ScaleLaw
):
    """Log full conditional of ``s = log phi`` (including the Jacobian)."""

    def target(s: float) -> float:
        if s > _MAX_LOG_SCALE:
            return -math.inf
        phi = math.exp(s)
        value = prior.logpdf(phi) + s
        if y.size:
            th, ph = clamp_parameters(kernel, theta, phi)
            value += float(np.sum(log_kernel_unchecked(kernel, y, th, ph)))
        return value

    return target


def _step_scale(
    target, phi: float, config: FitConfig, rng: np.random.Generator, state: ChainState
) -> float:
    s0 = math.log(phi)
    if config.phi_sampler is PhiSampler.RW:
        s1 = rw_metropolis(target, s0, config.rw_scale, rng, state.diagnostics)
    else:
        s1 = slice_sample_stepout(
            target, s0, config.phi_step, rng,
            max_steps=config.slice.max_steps,
            max_shrink=config.slice.max_shrink,
            diagnostics=state.diagnostics,
        )
    return math.exp(s1)


def update_phi_nonconjugate(
    state: ChainState, prior: ScaleLaw, rng: np.random.Generator, config: FitConfig
) -> ChainState:
    """Slice (or random-walk) update of each ``log phi_j`` against its cluster's likelihood."""
    for j in range(state.m1):
        members = state.y[state.alloc_theta == j]
        target = _scale_target(state.kernel, members, state.theta[j], prior)
        state.phis[j] = _step_scale(target, float(state.phis[j]), config, rng, state)
    state.refresh_kernels()
    return state


def update_scale_weights(
    state: ChainState, alpha: np.ndarray | tuple[float, ...], rng: np.random.Generator
) -> ChainState:
    """Each location's scale-weight row from Dirichlet(alpha + counts)."""
    alpha = np.asarray(alpha, dtype=float)
    counts = np.zeros((state.m1, alpha.size))
    np.add.at(counts, (state.alloc_theta, state.alloc_phi), 1.0)
    for l in range(state.m1):
        state.scale_weights[l] = rng.dirichlet(alpha + counts[l])
    state.refresh_kernels()
    return state


def update_scale_atoms_general(
    state: ChainState, prior: ScaleLaw, rng: np.random.Generator, config: FitConfig
) -> ChainState:
    """Global scale atoms, each pooling the observations allocated to it across locations."""
    m2 = state.phis.size
    located = state.theta[state.alloc_theta]
    if state.kernel is KernelKind.GAUSSIAN and prior.kind is ScaleLawKind.INVERSE_GAMMA:
        state.phis = _conjugate_draws(prior, state.alloc_phi, state.y - located, m2, rng)
    else:
        for j in range(m2):
            mask = state.alloc_phi == j
            target = _scale_target(state.kernel, state.y[mask], located[mask], prior)
            state.phis[j] = _step_scale(target, float(state.phis[j]), config, rng, state)
    state.refresh_kernels()
    return state


def update_dispersions(
    state: ChainState, config: FitConfig, rng: np.random.Generator
) -> ChainState:
    prior = config.scale_prior
    if config.variant is Variant.GENERAL:
        update_scale_weights(state, config.alpha, rng)
        return update_scale_atoms_general(state, prior, rng, config)
    if state.kernel is KernelKind.GAUSSIAN and prior.kind is ScaleLawKind.INVERSE_GAMMA:
        return update_phi_gaussian(state, prior, rng)
    return update_phi_nonconjugate(state, prior, rng, config)


# ---------------------------------------------------------------------------
# Nodes
# ---------------------------------------------------------------------------

def feasible_interval(array: BarycenterArray, j: int, k: int) -> tuple[float, float]:
    """
    Cell ``(lo, hi]`` an odd node may move in without crossing its neighbours.

    Rows with children use the two children beside the node; the bottom
    row uses the parent cell containing the node.
    """
    if k % 2 == 0 or not 1 <= j <= array.depth + 1 or not 1 <= k < 2 ** j:
        raise ValueError(f"({j}, {k}) is not an odd node of a depth-{array.depth} array.")
    if j == array.depth + 1:
        parent = array.extended_row(j - 1)
        return float(parent[(k - 1) // 2]), float(parent[(k + 1) // 2])
    child = array.extended_row(j + 1)
    return float(child[2 * k - 1]), float(child[2 * k + 1])


def node_bracket(state: ChainState, j: int, k: int) -> tuple[float, float]:
    """
    Feasible interval tightened to the bottom-row neighbours of the node's
    deepest copy; moving anywhere inside it keeps the whole array valid.
    """
    if j == state.n + 1:
        parent = state.ext[j - 1]
        return float(parent[(k - 1) // 2]), float(parent[(k + 1) // 2])
    i = k * 2 ** (state.n + 1 - j)
    bottom = state.ext[state.n + 1]
    return float(bottom[i - 1]), float(bottom[i + 1])


def node_window(state: ChainState, j: int, k: int, law: NodeLaw) -> tuple[float, float]:
    """
    Bracket of ``mu(j, k)`` intersected with the support of a uniform law.

    Raises:
        DegenerateInterval: The window is narrower than ``MIN_INTERVAL_WIDTH``
            or no longer holds the current value.
    """
    lo, hi = node_bracket(state, j, k)
    if law.kind is NodeLawKind.UNIFORM:
        lo, hi = max(lo, law.a), min(hi, law.b)
    if hi - lo < MIN_INTERVAL_WIDTH or not lo < state.node(j, k) <= hi:
        raise DegenerateInterval(f"bracket ({lo!r}, {hi!r}] of node ({j}, {k}) is degenerate")
    return lo, hi


def node_order(n: int) -> list[tuple[int, int]]:
    """Odd nodes bottom-up, left to right, root last."""
    return [(j, k) for j in range(n + 1, 0, -1) for k in range(1, 2 ** j, 2)]


def _descendant_log_norm(state: ChainState, family: NodeLawFamily, j: int, k: int) -> float:
    total = 0.0
    for r in range(j + 1, state.n + 2):
        c = k * 2 ** (r - 1 - j)
        parent = state.ext[r - 1]
        total += family.law(r, 2 * c - 1).log_mass(parent[c - 1], parent[c])
        total += family.law(r, 2 * c + 1).log_mass(parent[c], parent[c + 1])
    return total


def update_node(
    state: ChainState,
    j: int,
    k: int,
    rng: np.random.Generator,
    config: FitConfig,
) -> ChainState:
    """
    Slice-sample ``mu(j, k)`` within its bracket against prior density times
    the marginal mixture likelihood.  Narrow brackets are skipped.
    """
    family = config.family
    law = family.law(j, k)
    if law.is_degenerate:
        return state
    try:
        lo, hi = node_window(state, j, k, law)
    except DegenerateInterval as exc:
        state.diagnostics.skipped_nodes += 1
        logger.debug("Skipping node (%d, %d): %s", j, k, exc)
        return state
    current = state.node(j, k)

    bottom = j == state.n + 1
    column = [(k - 1) // 2] if bottom else None
    joint = config.node_target is NodeTarget.JOINT

    def target(x: float) -> float:
        state.set_node(j, k, x)
        state.refresh_structure()
        if bottom:
            state.refresh_kernels(column)
        value = law.logpdf(x)
        if joint:
            value -= _descendant_log_norm(state, family, j, k)
        return value + state.total_loglik()

    if math.isinf(lo) or math.isinf(hi):
        # Outermost bottom nodes on an unbounded domain: step out from the
        # current point, never leaving the open side of the bracket.
        def inside(x: float) -> float:
            return target(x) if lo < x <= hi else -math.inf

        new = slice_sample_stepout(
            inside, current, law.sd, rng,
            max_steps=config.slice.max_steps,
            max_shrink=config.slice.max_shrink,
            diagnostics=state.diagnostics,
        )
    else:
        bracket = (lo, hi)
        fraction = config.slice.width_fraction
        if fraction < 1.0:
            # window placed uniformly around the current point, then cut to the bracket
            width = fraction * (hi - lo)
            left = current - width * (1.0 - rng.random())
            bracket = (max(lo, left), min(hi, left + width))
        new = slice_sample_bounded(
            target, bracket, current, config.slice.max_shrink, rng, state.diagnostics
        )
    state.set_node(j, k, new)
    state.refresh_structure()
    if bottom:
        state.refresh_kernels(column)
    return state


def update_nodes(state: ChainState, config: FitConfig, rng: np.random.Generator) -> ChainState:
    for j, k in node_order(state.n):
        update_node(state, j, k, rng, config)
    return state
