"""Parameters, manifold states and Hamiltonians for n cavities coupled by
two-photon exchange.

Every cavity holds one effective two-level atom coupled to the cavity mode
through two-photon transitions, and every pair of cavities exchanges photon
pairs with the same (dimensionless) hopping rate ``xi``.  The total excitation
number is conserved, so the dynamics starting from two photons stays inside a
``2n``-dimensional manifold spanned by

* ``|c_i>``: two photons in cavity ``i``, every atom in the ground state,
* ``|a_i>``: atom ``i`` excited, no photons anywhere.

Manifold vectors are plain numpy arrays of length ``2n`` in the interleaved
order ``[C_0, A_0, C_1, A_1, ..., C_{n-1}, A_{n-1}]``.  Functions accept a
stack of such vectors along leading axes wherever that is cheap.
"""

from dataclasses import dataclass
import math

import numpy as np
import scipy.sparse as sp

__all__ = [
    "SystemParams",
    "PHOTONIC",
    "ATOMIC",
    "basis_index",
    "basis_state",
    "symmetric_photonic_state",
    "as_state",
    "random_manifold_state",
    "build_reduced_hamiltonian",
    "FOCK_LABELS",
    "FOCK_MAX_SITES",
    "build_fock_hamiltonian",
    "fock_number_operator",
    "fock_index",
    "manifold_embedding",
    "embed_manifold_state",
]

PHOTONIC = "photonic"
ATOMIC = "atomic"

# per-site Fock basis, photon cutoff 2
FOCK_LABELS = ("g,0", "g,1", "g,2", "e,0", "e,1", "e,2")
_G2 = 2
_E0 = 3
FOCK_MAX_SITES = 5


@dataclass(frozen=True)
class SystemParams:
    """Dimensionless parameters of the coupled-cavity array.

    Parameters
    ----------
    n : int
        Number of cavities (complete-graph coupling), ``n >= 1``.
    xi : float
        Two-photon hopping strength, any finite real.
    tan_theta0 : float
        Effective atom-photon coupling ``tan(theta0) > 0``.
    """

    n: int
    xi: float
    tan_theta0: float = 1.0

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if not math.isfinite(self.xi):
            raise ValueError(f"xi must be finite, got {self.xi!r}")
        if not (math.isfinite(self.tan_theta0) and self.tan_theta0 > 0):
            raise ValueError(f"tan_theta0 must be finite and > 0, got {self.tan_theta0!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "xi", float(self.xi))
        object.__setattr__(self, "tan_theta0", float(self.tan_theta0))

    @classmethod
    def from_coupling_ratio(cls, n, xi, r):
        """Build from the ratio ``r = g1/g2`` of the atomic couplings,
        using ``tan(theta0) = 1 / (sqrt(2) r)``."""
        if not r > 0:
            raise ValueError(f"coupling ratio must be > 0, got {r!r}")
        return cls(n, xi, 1.0 / (math.sqrt(2.0) * r))

    @property
    def dim(self):
        return 2 * self.n


def basis_index(site, kind):
    """Position of ``|c_site>`` or ``|a_site>`` in the interleaved ordering."""
    if kind in (PHOTONIC, "c", "C"):
        return 2 * site
    if kind in (ATOMIC, "a", "A"):
        return 2 * site + 1
    raise ValueError(f"unknown basis kind {kind!r}; expected 'photonic' or 'atomic'")


def basis_state(n, site, kind):
    if not 0 <= site < n:
        raise ValueError(f"site {site} out of range for n={n}")
    psi = np.zeros(2 * n, dtype=complex)
    psi[basis_index(site, kind)] = 1.0
    return psi


def symmetric_photonic_state(n):
    """``(|c_0> + ... + |c_{n-1}>) / sqrt(n)``."""
    psi = np.zeros(2 * n, dtype=complex)
    psi[0::2] = 1.0 / math.sqrt(n)
    return psi


def as_state(amplitudes, n=None, atol=1e-9):
    """Validate a manifold vector: complex, even length, unit norm."""
    psi = np.asarray(amplitudes, dtype=complex)
    if psi.ndim != 1 or psi.size == 0 or psi.size % 2:
        raise ValueError(f"manifold state must be a 1-D array of even length, got shape {psi.shape}")
    if n is not None and psi.size != 2 * n:
        raise ValueError(f"expected {2 * n} amplitudes for n={n}, got {psi.size}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > atol:
        raise ValueError(f"manifold state is not normalized (norm={norm:.3e})")
    return psi


def random_manifold_state(n, rng):
    """Haar-random unit vector on the ``2n``-dimensional manifold."""
    z = rng.normal(size=2 * n) + 1j * rng.normal(size=2 * n)
    return z / np.linalg.norm(z)


def _site_block(tan_theta0):
    t = tan_theta0
    return np.array([[1.0, t], [t, t * t]])


def build_reduced_hamiltonian(params):
    """Hamiltonian restricted to the two-excitation manifold.

    ``I_n (x) [[1, t], [t, t^2]] + 2 xi (J_n - I_n) (x) [[1, 0], [0, 0]]``
    with ``t = tan(theta0)`` and ``J_n`` the all-ones matrix.
    """
    n = params.n
    hop = 2.0 * params.xi * (np.ones((n, n)) - np.eye(n))
    photon_proj = np.array([[1.0, 0.0], [0.0, 0.0]])
    return np.kron(np.eye(n), _site_block(params.tan_theta0)) + np.kron(hop, photon_proj)


def _embed_site_operator(op, site, n):
    eye = sp.identity(6, format="csr")
    out = None
    for k in range(n):
        factor = sp.csr_matrix(op) if k == site else eye
        out = factor if out is None else sp.kron(out, factor, format="csr")
    return out


def _site_matrices(tan_theta0):
    photon_a = np.diag([1.0, math.sqrt(2.0)], k=1)
    a = np.kron(np.eye(2), photon_a)  # atom (g, e) (x) photon (0, 1, 2)
    h = np.zeros((6, 6))
    h[_G2, _G2] = 1.0
    h[_E0, _G2] = h[_G2, _E0] = tan_theta0
    h[_E0, _E0] = tan_theta0**2
    number = np.diag([0.0, 1.0, 2.0, 2.0, 3.0, 4.0])  # a^dag a + s_ee - s_gg + 1
    return a, h, number


def build_fock_hamiltonian(params):
    """Full cutoff-Fock-space Hamiltonian (dimension ``6**n``), sparse CSR.

    Sites are ordered with site 0 as the most significant tensor factor.  The
    inter-cavity term is ``xi * sum_{i<j} (a_i^2dag a_j^2 + h.c.)`` with true
    bosonic matrix elements, so ``<c_i|H|c_j> = 2 xi``.

    Raises
    ------
    ValueError
        If ``n > FOCK_MAX_SITES``.
    """
    n = params.n
    if n > FOCK_MAX_SITES:
        raise ValueError(f"Fock-space oracle limited to n <= {FOCK_MAX_SITES}, got n={n}")
    a, h, _ = _site_matrices(params.tan_theta0)
    a2 = a @ a
    H = sp.csr_matrix((6**n, 6**n))
    for i in range(n):
        H = H + _embed_site_operator(h, i, n)
    if params.xi != 0.0:
        a2_ops = [_embed_site_operator(a2, i, n) for i in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                hop = a2_ops[i].T @ a2_ops[j]
                H = H + params.xi * (hop + hop.T)
    return H.tocsr()


def fock_number_operator(n):
    """Diagonal of the conserved total excitation operator on ``6**n`` states."""
    _, _, number = _site_matrices(1.0)
    diag = np.zeros(1)
    for _ in range(n):
        diag = np.add.outer(diag, np.diag(number)).ravel()
    return diag


def fock_index(site_states):
    """Flat index of a product state given per-site labels 0..5."""
    idx = 0
    for s in site_states:
        idx = 6 * idx + s
    return idx


def manifold_embedding(n):
    """Isometry (``6**n`` x ``2n``, sparse) mapping manifold vectors into Fock space."""
    rows = []
    for i in range(n):
        for local in (_G2, _E0):
            rows.append(fock_index([local if k == i else 0 for k in range(n)]))
    cols = np.arange(2 * n)
    return sp.csr_matrix((np.ones(2 * n), (rows, cols)), shape=(6**n, 2 * n))


def embed_manifold_state(state, params):
    psi = as_state(state, params.n)
    return manifold_embedding(params.n) @ psi
