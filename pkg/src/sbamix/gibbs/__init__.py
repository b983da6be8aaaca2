"""
sbamix.gibbs
~~~~~~~~~~~~
Gibbs samplers for the parsimonious and general location-scale mixtures.
"""

from .chain import chain_seeds, run_chain, run_chains, sweep
from .config import FitConfig, GridSpec, NodeTarget, PhiSampler, SliceSettings, Variant
from .slice import SliceDiagnostics, rw_metropolis, slice_sample_bounded, slice_sample_stepout
from .state import ChainState
from .trace import Trace
from .updates import (
    feasible_interval,
    inverse_gamma_posterior,
    node_bracket,
    node_window,
    node_order,
    update_allocations_general,
    update_allocations_parsimonious,
    update_node,
    update_phi_gaussian,
    update_phi_nonconjugate,
    update_scale_atoms_general,
    update_scale_weights,
)

__all__ = [
    "ChainState",
    "FitConfig",
    "GridSpec",
    "NodeTarget",
    "PhiSampler",
    "SliceDiagnostics",
    "SliceSettings",
    "Trace",
    "Variant",
    "chain_seeds",
    "feasible_interval",
    "inverse_gamma_posterior",
    "node_bracket",
    "node_window",
    "node_order",
    "run_chain",
    "run_chains",
    "rw_metropolis",
    "slice_sample_bounded",
    "slice_sample_stepout",
    "sweep",
    "update_allocations_general",
    "update_allocations_parsimonious",
    "update_node",
    "update_phi_gaussian",
    "update_phi_nonconjugate",
    "update_scale_atoms_general",
    "update_scale_weights",
]
