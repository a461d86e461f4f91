import math

import numpy as np
import pytest
from scipy.linalg import expm

from twophoton.dynamics import block_hamiltonians, evolve
from twophoton.model import SystemParams, build_reduced_hamiltonian, random_manifold_state
from twophoton.oracle import (
    dense_propagator,
    evolve_dense,
    verify_block_diagonalization,
    verify_reduction,
)


def test_zero_hamiltonian_is_identity():
    psi = np.array([0.6, 0.8j])
    np.testing.assert_allclose(evolve_dense(np.zeros((2, 2)), psi, 3.1), psi, atol=1e-16)


def test_two_level_example():
    out = evolve_dense(np.array([[1.0, 1.0], [1.0, 1.0]]), np.array([1.0, 0.0]), math.pi / 2)
    np.testing.assert_allclose(out, [0, -1], atol=1e-15)


def test_dense_matches_evolve_n4(rng):
    params = SystemParams(4, rng.uniform(-2, 2), rng.uniform(0.5, 2))
    psi = random_manifold_state(4, rng)
    np.testing.assert_allclose(evolve_dense(build_reduced_hamiltonian(params), psi, 2.19), evolve(params, psi, 2.19), atol=1e-10)


def test_dense_time_array(rng):
    H = build_reduced_hamiltonian(SystemParams(3, 0.5))
    psi = random_manifold_state(3, rng)
    ts = np.array([0.0, 1.0, 4.5])
    out = evolve_dense(H, psi, ts)
    for k, t in enumerate(ts):
        np.testing.assert_allclose(out[k], expm(-1j * t * H) @ psi, atol=1e-12)


def test_propagator_unitary_and_group_law(rng):
    m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    H = m + m.conj().T
    U = dense_propagator(H, 0.8)
    np.testing.assert_allclose(U @ U.conj().T, np.eye(6), atol=1e-12)
    np.testing.assert_allclose(dense_propagator(H, 0.0), np.eye(6), atol=1e-14)
    np.testing.assert_allclose(dense_propagator(H, 0.3) @ dense_propagator(H, 0.5), U, atol=1e-12)


def test_non_hermitian_rejected():
    with pytest.raises(ValueError):
        evolve_dense(np.array([[0.0, 1.0], [0.0, 0.0]]), np.array([1.0, 0.0]), 1.0)


@pytest.mark.parametrize("n,xi,tan", [(2, 0.5, 1.0), (3, 1.7, 0.8)])
def test_verify_reduction_passes(n, xi, tan):
    rep = verify_reduction(SystemParams(n, xi, tan))
    assert rep.passed
    assert rep.checks["projection"] < 1e-14


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_verify_reduction_without_hopping(n):
    assert verify_reduction(SystemParams(n, 0.0)).passed


def test_verify_reduction_detects_wrong_matrix():
    params = SystemParams(3, 0.4)
    wrong = build_reduced_hamiltonian(SystemParams(3, -0.4))
    rep = verify_reduction(params, reduced=wrong)
    assert not rep.passed
    assert "projection" in rep.detail and "FAIL" in str(rep)


def test_verify_reduction_guard():
    with pytest.raises(ValueError):
        verify_reduction(SystemParams(5, 0.1))


def test_block_diagonalization_n2():
    params = SystemParams(2, 0.5)
    assert verify_block_diagonalization(params).passed
    blocks = block_hamiltonians(params)
    np.testing.assert_array_equal(blocks[0], [[2, 1], [1, 1]])
    np.testing.assert_array_equal(blocks[1], [[0, 1], [1, 1]])


@pytest.mark.parametrize("n,xi", [(1, 0.9), (6, 0.35)])
def test_block_diagonalization(n, xi):
    rep = verify_block_diagonalization(SystemParams(n, xi))
    assert rep.passed and rep.max_residual < 1e-13


def test_block_diagonalization_detects_fault():
    params = SystemParams(4, 0.3)
    rep = verify_block_diagonalization(params, reduced=build_reduced_hamiltonian(SystemParams(4, -0.3)))
    assert not rep.passed


@pytest.mark.parametrize("n,xi", [(2, 0.3), (3, 1.1), (5, -0.7)])
def test_mode_zero_eigenvalues(n, xi):
    H = build_reduced_hamiltonian(SystemParams(n, xi))
    evals = np.linalg.eigvalsh(H)
    w0 = math.sqrt(1 + xi**2 * (n - 1) ** 2)
    for expected in (1 + xi * (n - 1) + w0, 1 + xi * (n - 1) - w0):
        assert np.min(np.abs(evals - expected)) < 1e-12
