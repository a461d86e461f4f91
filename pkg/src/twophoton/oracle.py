"""Brute-force validators, independent of the Fourier/closed-form machinery.

These deliberately take the long way round: dense spectral propagators for
the reduced Hamiltonian and explicit construction in the cutoff Fock space
(``6**n`` states) to check that the ``2n``-dimensional reduction is exact.
"""

from dataclasses import dataclass, field

import numpy as np

from .dynamics import block_hamiltonians, fourier_matrix
from .model import (
    build_fock_hamiltonian,
    build_reduced_hamiltonian,
    fock_number_operator,
    manifold_embedding,
)

__all__ = [
    "HERMITIAN_ATOL",
    "STRUCTURE_ATOL",
    "DYNAMICS_ATOL",
    "Report",
    "dense_propagator",
    "evolve_dense",
    "verify_reduction",
    "verify_block_diagonalization",
    "fock_atom_pair_density",
]

HERMITIAN_ATOL = 1e-10
STRUCTURE_ATOL = 1e-13
DYNAMICS_ATOL = 1e-10
REDUCTION_ATOL = 1e-10


@dataclass
class Report:
    """Outcome of a structural check: worst residual and where it occurred."""

    name: str
    max_residual: float
    tolerance: float
    detail: str = ""
    checks: dict = field(default_factory=dict)

    @property
    def passed(self):
        return bool(self.max_residual <= self.tolerance)

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        text = f"[{status}] {self.name}: max residual {self.max_residual:.3e} (tol {self.tolerance:.0e})"
        if self.detail and not self.passed:
            text += f" -- {self.detail}"
        return text


def _check_hermitian(H):
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    err = np.max(np.abs(H - H.conj().T)) if H.size else 0.0
    if err > HERMITIAN_ATOL:
        raise ValueError(f"matrix is not Hermitian (max |H - H^dag| = {err:.3e})")
    return H


def dense_propagator(H, t):
    """``U = V exp(-i Lambda t) V^dag`` from the spectral decomposition of ``H``."""
    H = _check_hermitian(H)
    evals, vecs = np.linalg.eigh(H)
    return (vecs * np.exp(-1j * evals * t)) @ vecs.conj().T


def evolve_dense(H, initial, t):
    """``exp(-iHt) initial``; ``t`` may be an array, giving shape ``(len(t), dim)``."""
    H = _check_hermitian(H)
    evals, vecs = np.linalg.eigh(H)
    coeffs = vecs.conj().T @ np.asarray(initial, dtype=complex)
    t = np.asarray(t, dtype=float)
    phases = np.exp(-1j * np.multiply.outer(t, evals))
    return (phases * coeffs) @ vecs.T


def _worst(matrix):
    matrix = np.asarray(matrix)
    if matrix.size == 0:
        return 0.0, None
    idx = np.unravel_index(np.argmax(np.abs(matrix)), matrix.shape)
    return float(np.abs(matrix[idx])), tuple(int(i) for i in idx)


def verify_reduction(params, reduced=None):
    """Check the reduction of the Fock-space Hamiltonian onto the manifold.

    (a) ``H_fock`` maps the embedded manifold into itself, (b) the projected
    matrix equals the reduced Hamiltonian, (c) the image stays in the
    total-excitation eigenspace with eigenvalue 2.  ``reduced`` overrides the
    matrix compared in (b), which is how fault injection is exercised.
    """
    if params.n > 4:
        raise ValueError(f"verify_reduction supports n <= 4, got n={params.n}")
    H = build_fock_hamiltonian(params)
    P = manifold_embedding(params.n)
    if reduced is None:
        reduced = build_reduced_hamiltonian(params)

    image = (H @ P).toarray()
    projected = (P.T @ H @ P).toarray()
    leak = image - P @ projected
    number = fock_number_operator(params.n)
    off_sector = (number[:, None] - 2.0) * image

    checks = {}
    details = []
    for key, residual in (
        ("invariance", leak),
        ("projection", projected - reduced),
        ("number", off_sector),
    ):
        worst, where = _worst(residual)
        checks[key] = worst
        if worst > REDUCTION_ATOL:
            details.append(f"{key} residual {worst:.3e} at element {where}")
    return Report(
        name=f"reduction n={params.n} xi={params.xi:g} tan={params.tan_theta0:g}",
        max_residual=max(checks.values()),
        tolerance=REDUCTION_ATOL,
        detail="; ".join(details),
        checks=checks,
    )


def verify_block_diagonalization(params, reduced=None):
    """Conjugate the reduced Hamiltonian by ``F (x) I_2`` and compare with the blocks."""
    n = params.n
    if reduced is None:
        reduced = build_reduced_hamiltonian(params)
    U = np.kron(fourier_matrix(n), np.eye(2))
    rotated = U.conj().T @ reduced @ U

    expected = np.zeros((2 * n, 2 * n))
    for l, block in enumerate(block_hamiltonians(params)):
        expected[2 * l : 2 * l + 2, 2 * l : 2 * l + 2] = block
    mask = np.kron(np.eye(n), np.ones((2, 2))).astype(bool)

    off_block, where_off = _worst(np.where(mask, 0.0, rotated))
    on_block, where_on = _worst(np.where(mask, rotated - expected, 0.0))
    details = []
    if off_block > STRUCTURE_ATOL:
        details.append(f"off-block residual {off_block:.3e} at {where_off}")
    if on_block > STRUCTURE_ATOL:
        details.append(f"block mismatch {on_block:.3e} at {where_on}")
    return Report(
        name=f"block-diagonalization n={n} xi={params.xi:g} tan={params.tan_theta0:g}",
        max_residual=max(off_block, on_block),
        tolerance=STRUCTURE_ATOL,
        detail="; ".join(details),
        checks={"off_block": off_block, "block": on_block},
    )


def fock_atom_pair_density(vector, n, i, j):
    """Brute-force two-atom reduced density matrix from a ``6**n`` Fock vector.

    Traces out every photon mode and every atom except ``i`` and ``j``; the
    result is in the order ``|gg>, |ge>, |eg>, |ee>`` with atom ``i`` first.
    """
    psi = np.asarray(vector, dtype=complex).reshape((2, 3) * n)
    # axes: atom_0, photon_0, atom_1, photon_1, ...
    keep = [2 * i, 2 * j]
    traced = [ax for ax in range(2 * n) if ax not in keep]
    psi = np.transpose(psi, keep + traced).reshape(4, -1)
    return psi @ psi.conj().T
