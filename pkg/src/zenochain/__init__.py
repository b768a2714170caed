"""Dot-chain lattice under repeated projective measurement of the dot occupancy."""

from zenochain.model import ModelSpec, build_hamiltonian, chain_dispersion, max_group_velocity
from zenochain.propagator import EigenSystem, Propagator, diagonalize, propagate, spectral_width, tau_star
from zenochain.channel import (
    TrajectoryRecord,
    NoFrontError,
    initial_state,
    measure_reduce,
    step,
    evolve,
    front_velocity,
)
from zenochain.spectral import (
    Superoperator,
    SpectralDecomposition,
    ChainInvariantReport,
    build_superoperator,
    decompose,
    survival_spectral,
    decay_rate,
    rate_scan,
    stationary_state,
    chain_invariant_check,
)
from zenochain.twolevel import TwoLevelParams, survival_closed_form, transition_matrix

__version__ = "0.1.0"
