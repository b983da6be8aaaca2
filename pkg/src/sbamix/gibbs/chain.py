"""
sbamix.gibbs.chain
~~~~~~~~~~~~~~~~~~
Chain driver: initialisation from the prior, sweeps, retention, and
concurrent execution of several independently seeded chains.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np

from .. import progress as _progress
from ..exceptions import DomainError, NumericalError
from ..kernels import check_observations, density_grid
from .config import FitConfig, GridSpec, Variant
from .state import ChainState
from .trace import Trace
from .updates import (
    update_allocations_general,
    update_allocations_parsimonious,
    update_dispersions,
    update_nodes,
)

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())


def _check_family_domain(config: FitConfig) -> None:
    space = config.kernel.location_space
    domain = config.family.domain
    if domain.lower < space.lower or domain.upper > space.upper:
        raise DomainError(
            f"Node-law domain [{domain.lower}, {domain.upper}] exceeds the "
            f"{config.kernel.value} location space [{space.lower}, {space.upper}]."
        )


def sweep(
    state: ChainState, config: FitConfig, rng: np.random.Generator, *, debug: bool = False
) -> ChainState:
    """Allocations, then dispersions, then nodes bottom-up with the root last."""
    if config.variant is Variant.GENERAL:
        update_allocations_general(state, rng)
    else:
        update_allocations_parsimonious(state, rng)
    update_dispersions(state, config, rng)
    if debug:
        state.check()
    if config.update_nodes:
        update_nodes(state, config, rng)
        if debug:
            state.check()
    return state


def run_chain(
    config: FitConfig,
    data: Sequence[float] | np.ndarray,
    *,
    seed: int | None = None,
    debug: bool = False,
) -> Trace:
    """
    Run one chain and return its retained draws.

    ``seed`` overrides ``config.seed``.  Empty ``data`` samples the prior.

    Raises:
        DomainError: Data or the node-law domain do not fit the kernel.
        NumericalError: The log likelihood became non-finite.
    """
    y = check_observations(config.kernel, np.asarray(data, dtype=float).reshape(-1))
    _check_family_domain(config)
    seed = config.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    grid = (config.grid or GridSpec.around(y, config.kernel)).points()

    state = ChainState.from_prior(config, y, rng)
    trace = Trace(grid=grid, diagnostics=state.diagnostics, seeds=[seed])
    logger.info(
        "Chain start: %s/%s n=%d, %d observations, %d iterations (seed %s)",
        config.variant.value, config.kernel.value, config.n, y.size, config.iterations, seed,
    )

    for t in range(1, config.iterations + 1):
        sweep(state, config, rng, debug=debug)
        if config.is_retained(t):
            loglik = state.loglik_terms()
            if not np.all(np.isfinite(loglik)):
                raise NumericalError(f"Non-finite log likelihood at iteration {t}.")
            mixing = state.mixing()
            trace.append(
                loglik,
                density_grid(config.kernel, mixing, grid),
                state.mean,
                mixing if config.keep_mixing else None,
            )
        if config.progress_every and t % config.progress_every == 0:
            _progress.emit(f"iteration {t}/{config.iterations}, retained {len(trace)}")

    logger.info(
        "Chain done: %d draws retained, %d shrink exhaustions, %d skipped node updates",
        len(trace), state.diagnostics.shrink_exhausted, state.diagnostics.skipped_nodes,
    )
    return trace


def chain_seeds(seed: int | None, chains: int) -> list[int | None]:
    return [None if seed is None else seed + i for i in range(chains)]


def run_chains(
    config: FitConfig,
    data: Sequence[float] | np.ndarray,
    chains: int = 1,
    *,
    callback: Callable[[int, str], None] | None = None,
    debug: bool = False,
) -> Trace:
    """
    Run ``chains`` chains concurrently (chain ``i`` seeded ``seed + i``) and
    merge their traces in chain order.  ``debug`` validates every sweep.
    """
    if chains < 1:
        raise ValueError(f"chains must be >= 1, got {chains}.")

    def _run(index: int, seed: int | None) -> Trace:
        if callback is not None:
            _progress.set_callback(lambda msg: callback(index, msg))
        try:
            return run_chain(config, data, seed=seed, debug=debug)
        finally:
            _progress.clear_callback()

    seeds = chain_seeds(config.seed, chains)
    if chains == 1:
        return _run(0, seeds[0])
    with ThreadPoolExecutor(max_workers=chains) as pool:
        futures = [pool.submit(_run, i, s) for i, s in enumerate(seeds)]
        return Trace.merge(f.result() for f in futures)
