"""Exact dynamics of n atom-cavity systems coupled by two-photon exchange."""

from .model import (
    ATOMIC,
    PHOTONIC,
    SystemParams,
    basis_index,
    basis_state,
    build_fock_hamiltonian,
    build_reduced_hamiltonian,
    embed_manifold_state,
    random_manifold_state,
    symmetric_photonic_state,
)
from .dynamics import (
    approx_large_hopping,
    approx_small_hopping,
    block_hamiltonians,
    evolve,
    evolve_closed_form_tan1,
    fourier_transform,
    inverse_fourier,
    propagate_block,
)
from .entanglement import (
    analytic_concurrence_n2,
    concurrence,
    partial_transpose_eigenvalues,
    reduce_to_atom_pair,
)
from .analysis import (
    atomic_probability,
    find_max_concurrence_times,
    photonic_probability,
    predicted_transfer_times,
    site_populations,
    transfer_fidelity,
)
from .oracle import evolve_dense, verify_block_diagonalization, verify_reduction

__version__ = "0.1.0"
