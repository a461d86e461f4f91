"""Fourier block-diagonalization and time evolution on the two-excitation
manifold.

The hopping matrix ``J_n - I_n`` is circulant, so the discrete Fourier
transform over cavity labels splits the ``2n x 2n`` Hamiltonian into ``n``
independent 2x2 blocks (one per collective mode ``l``).  Each block is
exponentiated analytically.

All evolution functions accept either a scalar time or a 1-D array of times.
For an array input the result has shape ``(len(t), 2n)``.
"""

import numpy as np

from .model import as_state

__all__ = [
    "fourier_transform",
    "inverse_fourier",
    "fourier_matrix",
    "block_hamiltonians",
    "block_propagator",
    "propagate_block",
    "evolve",
    "evolve_closed_form_tan1",
    "approx_large_hopping",
    "approx_small_hopping",
]


def _split(state):
    # (..., 2n) -> (..., n, 2) with [..., l, 0] photonic and [..., l, 1] atomic
    state = np.asarray(state, dtype=complex)
    return state.reshape(state.shape[:-1] + (state.shape[-1] // 2, 2))


def _merge(pairs):
    return pairs.reshape(pairs.shape[:-2] + (2 * pairs.shape[-2],))


def fourier_transform(state):
    """Site amplitudes -> collective-mode amplitudes.

    ``C'_l = n^{-1/2} sum_i w^{l i} C_i`` with ``w = exp(2 pi i / n)``, and the
    same for the atomic amplitudes.  Works on stacks of vectors.
    """
    # numpy's ifft carries exp(+2 pi i k l / n); "ortho" gives the 1/sqrt(n)
    return _merge(np.fft.ifft(_split(state), axis=-2, norm="ortho"))


def inverse_fourier(amps):
    """Collective-mode amplitudes -> site amplitudes, ``C_i = n^{-1/2} sum_l w^{-l i} C'_l``."""
    return _merge(np.fft.fft(_split(amps), axis=-2, norm="ortho"))


def fourier_matrix(n):
    """Unitary ``F`` with ``F[k, l] = w^{k l} / sqrt(n)``."""
    k = np.arange(n)
    return np.exp(2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)


def block_hamiltonians(params):
    """The ``n`` 2x2 blocks of the Hamiltonian in the Fourier basis, shape ``(n, 2, 2)``.

    Block 0 carries the photonic shift ``2 xi (n - 1)``; blocks ``1..n-1``
    carry ``-2 xi``.
    """
    n, xi, t = params.n, params.xi, params.tan_theta0
    blocks = np.empty((n, 2, 2))
    blocks[:, 0, 1] = blocks[:, 1, 0] = t
    blocks[:, 1, 1] = t * t
    blocks[:, 0, 0] = 1.0 - 2.0 * xi
    blocks[0, 0, 0] = 1.0 + 2.0 * xi * (n - 1)
    return blocks


def block_propagator(block, t):
    """``exp(-i B t)`` for real symmetric 2x2 block(s) ``B``.

    Uses ``B = c0 I + v . sigma``; ``exp(-iBt) = e^{-i c0 t} [cos(|v| t) I
    - i sin(|v| t) (v . sigma) / |v|]``.  ``block`` may be ``(..., 2, 2)``;
    ``t`` may be scalar or 1-D, in which case a leading time axis is added.

    Returns
    -------
    ndarray
        Complex array of shape ``t.shape + block.shape``.
    """
    block = np.asarray(block, dtype=float)
    t = np.asarray(t, dtype=float)
    tt = t.reshape(t.shape + (1,) * (block.ndim - 2))

    c0 = 0.5 * (block[..., 0, 0] + block[..., 1, 1])
    vz = 0.5 * (block[..., 0, 0] - block[..., 1, 1])
    vx = 0.5 * (block[..., 0, 1] + block[..., 1, 0])
    norm = np.hypot(vx, vz)
    safe = np.where(norm > 0.0, norm, 1.0)

    phase = np.exp(-1j * c0 * tt)
    cos = np.cos(norm * tt)
    # sin(|v| t)/|v| -> t as |v| -> 0; the v . sigma factor is then zero anyway
    sin_over = np.where(norm > 0.0, np.sin(norm * tt) / safe, tt)

    u = np.empty(np.broadcast(tt, c0).shape + (2, 2), dtype=complex)
    u[..., 0, 0] = phase * (cos - 1j * sin_over * vz)
    u[..., 1, 1] = phase * (cos + 1j * sin_over * vz)
    u[..., 0, 1] = u[..., 1, 0] = phase * (-1j * sin_over * vx)
    return u


def propagate_block(block, t, amp_pair):
    """Apply ``exp(-i B t)`` to a (photonic, atomic) amplitude pair."""
    return block_propagator(block, t) @ np.asarray(amp_pair, dtype=complex)


def evolve(params, initial, t):
    """Exact evolution of a manifold state for any ``tan_theta0``.

    Fourier transform, propagate each 2x2 block analytically, transform back.
    """
    psi = as_state(initial, params.n)
    modes = _split(fourier_transform(psi))  # (n, 2)
    u = block_propagator(block_hamiltonians(params), t)  # (..., n, 2, 2)
    evolved = np.einsum("...lab,lb->...la", u, modes)
    return inverse_fourier(_merge(evolved))


def _require_tan1(params, what):
    if params.tan_theta0 != 1.0:
        raise ValueError(f"{what} is only defined for tan_theta0 = 1, got {params.tan_theta0}")


def _closed_form_mode(xi_eff, t, c0, a0):
    # one Fourier mode at tan_theta0 = 1 with photonic shift 2*xi_eff
    w = np.sqrt(1.0 + xi_eff**2)
    phase = np.exp(-1j * (1.0 + xi_eff) * t) / w
    cos, sin = np.cos(w * t), np.sin(w * t)
    c = phase * ((w * cos - 1j * xi_eff * sin) * c0 - 1j * sin * a0)
    a = phase * ((w * cos + 1j * xi_eff * sin) * a0 - 1j * sin * c0)
    return c, a


def evolve_closed_form_tan1(params, initial, t):
    """Exact evolution at ``tan_theta0 = 1`` from the explicit mode solutions.

    Mode 0 oscillates at ``sqrt(1 + xi^2 (n-1)^2)``, modes ``l >= 1`` at
    ``sqrt(1 + xi^2)``.

    Raises
    ------
    ValueError
        If ``params.tan_theta0 != 1``.
    """
    _require_tan1(params, "evolve_closed_form_tan1")
    n, xi = params.n, params.xi
    psi = as_state(initial, n)
    modes = _split(fourier_transform(psi))
    t = np.asarray(t, dtype=float)[..., None]

    xi_eff = np.full(n, -xi)
    xi_eff[0] = xi * (n - 1)
    c, a = _closed_form_mode(xi_eff, t, modes[:, 0], modes[:, 1])
    return inverse_fourier(_merge(np.stack([c, a], axis=-1)))


def _mixing_sum(phase, amps, n):
    # (1/n) sum_k (phase - 1 + n delta_kl) x_k  for every l
    return (phase - 1.0)[..., None] * amps.sum(axis=-1, keepdims=True) / n + amps


def approx_large_hopping(params, initial, t):
    """Leading-order evolution for ``|xi| >> 1`` (atoms frozen).

    ``C_l(t) ~ e^{2 i xi t}/n sum_k (e^{-2 i xi n t} - 1 + n delta_kl) C_k(0)``
    and ``A_l(t) ~ A_l(0)``.  The result is not renormalized.
    """
    _require_tan1(params, "approx_large_hopping")
    n, xi = params.n, params.xi
    pairs = _split(as_state(initial, n))
    t = np.asarray(t, dtype=float)
    photonic = np.exp(2j * xi * t)[..., None] * _mixing_sum(np.exp(-2j * xi * n * t), pairs[:, 0], n)
    atomic = np.broadcast_to(pairs[:, 1], photonic.shape)
    return _merge(np.stack([photonic, atomic], axis=-1))


def approx_small_hopping(params, initial, t):
    """Leading-order evolution for ``|xi| << 1``.

    Local Rabi rotation ``cos t X_k - i sin t Y_k`` on every site, followed by
    the inter-cavity mixing ``e^{-i(1-xi)t}/n sum_k (e^{-i xi n t} - 1 + n
    delta_kl)``.  The result is not renormalized.
    """
    _require_tan1(params, "approx_small_hopping")
    n, xi = params.n, params.xi
    pairs = _split(as_state(initial, n))
    t = np.asarray(t, dtype=float)
    cos, sin = np.cos(t)[..., None], np.sin(t)[..., None]
    local_c = cos * pairs[:, 0] - 1j * sin * pairs[:, 1]
    local_a = cos * pairs[:, 1] - 1j * sin * pairs[:, 0]
    mix = np.exp(-1j * xi * n * t)
    prefactor = np.exp(-1j * (1.0 - xi) * t)[..., None]
    c = prefactor * _mixing_sum(mix, local_c, n)
    a = prefactor * _mixing_sum(mix, local_a, n)
    return _merge(np.stack([c, a], axis=-1))
