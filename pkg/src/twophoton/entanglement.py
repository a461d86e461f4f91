"""Two-atom reduced states, partial transpose and Wootters concurrence.

Two-atom matrices use the basis order ``|gg>, |ge>, |eg>, |ee>`` with the
first listed atom as the left tensor factor.
"""

import numpy as np

__all__ = [
    "reduce_to_atom_pair",
    "validate_density_matrix",
    "partial_transpose",
    "partial_transpose_eigenvalues",
    "concurrence",
    "analytic_concurrence_n2",
]

_YY = np.fliplr(np.diag([-1.0, 1.0, 1.0, -1.0]))  # sigma_y (x) sigma_y


def reduce_to_atom_pair(state, i, j):
    """Reduced state of atoms ``i`` and ``j`` for manifold vector(s) ``state``.

    Photon states of different manifold vectors are orthogonal, so the only
    coherence that survives the trace is between ``|a_i>`` and ``|a_j>``.
    ``state`` may be a stack ``(..., 2n)``; the result is ``(..., 4, 4)``.
    """
    state = np.asarray(state, dtype=complex)
    n = state.shape[-1] // 2
    for k in (i, j):
        if not (isinstance(k, (int, np.integer)) and 0 <= k < n):
            raise ValueError(f"atom index {k!r} out of range for n={n}")
    if i == j:
        raise ValueError("atom pair needs two distinct sites")

    amp_a = state[..., 1::2]
    pop_a = np.abs(amp_a) ** 2
    ai, aj = amp_a[..., i], amp_a[..., j]

    rho = np.zeros(state.shape[:-1] + (4, 4), dtype=complex)
    rho[..., 0, 0] = np.sum(np.abs(state) ** 2, axis=-1) - pop_a[..., i] - pop_a[..., j]
    rho[..., 1, 1] = pop_a[..., j]
    rho[..., 2, 2] = pop_a[..., i]
    rho[..., 2, 1] = ai * np.conj(aj)
    rho[..., 1, 2] = aj * np.conj(ai)
    return rho


def validate_density_matrix(rho, atol=1e-12):
    """Raise ``ValueError`` unless ``rho`` is a Hermitian, unit-trace, PSD 4x4 stack."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-2:] != (4, 4):
        raise ValueError(f"expected two-qubit density matrices (..., 4, 4), got {rho.shape}")
    herm = np.max(np.abs(rho - np.swapaxes(rho.conj(), -1, -2)))
    if herm > 10 * atol:
        raise ValueError(f"density matrix not Hermitian (residual {herm:.3e})")
    trace = np.trace(rho, axis1=-2, axis2=-1)
    if np.max(np.abs(trace - 1.0)) > atol:
        raise ValueError(f"density matrix trace differs from 1 by {np.max(np.abs(trace - 1.0)):.3e}")
    low = np.min(np.linalg.eigvalsh(rho))
    if low < -atol:
        raise ValueError(f"density matrix has negative eigenvalue {low:.3e}")
    return rho


def partial_transpose(rho):
    """Transpose on the first atom: ``<ab|rho^T1|cd> = <cb|rho|ad>``."""
    rho = np.asarray(rho)
    r = rho.reshape(rho.shape[:-2] + (2, 2, 2, 2))
    return np.swapaxes(r, -4, -2).reshape(rho.shape)


def partial_transpose_eigenvalues(rho):
    """Ascending eigenvalues of the partial transpose; a negative one certifies entanglement."""
    rho = validate_density_matrix(rho)
    return np.linalg.eigvalsh(partial_transpose(rho))


def concurrence(rho):
    """Wootters concurrence of two-qubit density matrix(es).

    The decreasing square roots of the eigenvalues of ``rho (Y(x)Y) rho* (Y(x)Y)``
    are obtained as singular values of ``W^T (Y(x)Y) W`` where ``rho = W W^dag``.
    This avoids square roots of round-off sized eigenvalues, so separable
    states come out at ~1e-16 rather than ~1e-8.
    """
    rho = validate_density_matrix(rho)
    evals, vecs = np.linalg.eigh(rho)
    w = vecs * np.sqrt(np.clip(evals, 0.0, None))[..., None, :]
    tau = np.swapaxes(w, -1, -2) @ _YY @ w
    s = np.linalg.svd(tau, compute_uv=False)  # descending
    c = s[..., 0] - s[..., 1] - s[..., 2] - s[..., 3]
    return np.maximum(c, 0.0)


def analytic_concurrence_n2(xi, t):
    """``sin^2(t sqrt(1+xi^2)) / (1+xi^2)``: atom-atom concurrence for two
    cavities started in ``(|c_0> + |c_1>)/sqrt(2)`` at ``tan_theta0 = 1``."""
    w2 = 1.0 + np.square(xi)
    return np.sin(np.asarray(t) * np.sqrt(w2)) ** 2 / w2
