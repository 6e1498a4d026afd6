"""Tensor products, traces, partial trace, and the Hermitian eigensolver."""

import numpy as np
import pytest

from qdesigns.linalg import (
    basis_state,
    dagger,
    hermitian_eig,
    hs_inner,
    partial_trace,
    random_complex_matrix,
    random_density,
    random_hermitian,
    random_kraus_channel_ops,
    random_state,
    random_unitary,
    tensor,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def test_tensor_identities():
    assert np.allclose(tensor(I2, I2), np.eye(4))
    ket01 = tensor(basis_state(2, 0), basis_state(2, 1))
    assert np.allclose(ket01, basis_state(4, 1))


def test_tensor_matches_factorwise_action():
    plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
    zero = basis_state(2, 0)
    lhs = tensor(X, Z) @ tensor(plus, zero)
    rhs = tensor(X @ plus, Z @ zero)
    assert np.abs(lhs - rhs).max() < 1e-12


def test_tensor_associative_and_bilinear():
    rng = np.random.default_rng(7)
    for _ in range(5):
        a, b, c = (random_complex_matrix(rng, 2) for _ in range(3))
        assert np.abs(tensor(tensor(a, b), c) - tensor(a, tensor(b, c))).max() < 1e-12
        s = rng.standard_normal() + 1j * rng.standard_normal()
        assert np.abs(tensor(s * a, b) - s * tensor(a, b)).max() < 1e-12
        assert np.abs(tensor(a + c, b) - tensor(a, b) - tensor(c, b)).max() < 1e-12


def test_hs_inner():
    assert abs(hs_inner(np.eye(5), np.eye(5)) - 5) < 1e-12
    rng = np.random.default_rng(3)
    a, b = random_complex_matrix(rng, 4), random_complex_matrix(rng, 4)
    assert abs(hs_inner(a, b) - np.conj(hs_inner(b, a))) < 1e-12
    aa = hs_inner(a, a)
    assert aa.real > 0 and abs(aa.imag) < 1e-12
    with pytest.raises(ValueError):
        hs_inner(np.eye(2), np.eye(3))


def test_pauli_orthogonality_qutrit():
    # tr((X^a Z^b)^dag X^a' Z^b') = d delta delta at d = 3
    d = 3
    om = np.exp(2j * np.pi / d)
    xd = np.zeros((d, d), dtype=complex)
    for j in range(d):
        xd[(j + 1) % d, j] = 1
    zd = np.diag([om**j for j in range(d)])
    paulis = {(a, b): np.linalg.matrix_power(xd, a) @ np.linalg.matrix_power(zd, b)
              for a in range(d) for b in range(d)}
    for (a, b), p in paulis.items():
        for (a2, b2), q in paulis.items():
            want = d if (a, b) == (a2, b2) else 0
            assert abs(hs_inner(p, q) - want) < 1e-9


def test_partial_trace_product_states():
    rng = np.random.default_rng(11)
    rho = random_density(rng, 3)
    sigma = random_density(rng, 4)
    joint = tensor(rho, sigma)
    assert np.abs(partial_trace(joint, (3, 4), "A") - rho).max() < 1e-12
    assert np.abs(partial_trace(joint, (3, 4), "B") - sigma).max() < 1e-12


def test_partial_trace_bell_state():
    bell = (basis_state(4, 0) + basis_state(4, 3)) / np.sqrt(2)
    proj = np.outer(bell, bell.conj())
    assert np.abs(partial_trace(proj, (2, 2), "A") - I2 / 2).max() < 1e-12


def test_partial_trace_preserves_trace():
    rng = np.random.default_rng(2)
    rho = random_density(rng, 6)
    assert abs(np.trace(partial_trace(rho, (2, 3), "A")) - 1) < 1e-12


def test_hermitian_eig_paulis():
    w, v = hermitian_eig(Z)
    assert np.allclose(w, [-1, 1])
    w, v = hermitian_eig(X)
    assert np.allclose(w, [-1, 1])
    minus = (basis_state(2, 0) - basis_state(2, 1)) / np.sqrt(2)
    plus = (basis_state(2, 0) + basis_state(2, 1)) / np.sqrt(2)
    assert np.abs(v[:, 0] - minus).max() < 1e-9  # oriented: first component positive
    assert np.abs(v[:, 1] - plus).max() < 1e-9


def test_hermitian_eig_reconstruction_and_orientation():
    rng = np.random.default_rng(5)
    a = random_hermitian(rng, 8)
    w, v = hermitian_eig(a)
    assert np.abs(v @ np.diag(w) @ v.conj().T - a).max() < 1e-8 * max(1.0, np.abs(a).max())
    assert np.abs(v.conj().T @ v - np.eye(8)).max() < 1e-10
    assert all(w[i] <= w[i + 1] + 1e-12 for i in range(7))
    with pytest.raises(ValueError):
        hermitian_eig(random_complex_matrix(rng, 4))


def test_trace_invariant_under_random_unitaries():
    rng = np.random.default_rng(9)
    for _ in range(5):
        u = random_unitary(rng, 5)
        assert np.abs(u @ dagger(u) - np.eye(5)).max() < 1e-10
        a = random_complex_matrix(rng, 5)
        assert abs(np.trace(u @ a @ dagger(u)) - np.trace(a)) < 1e-10


def test_random_state_and_kraus_helpers():
    rng = np.random.default_rng(13)
    psi = random_state(rng, 7)
    assert abs(np.linalg.norm(psi) - 1) < 1e-12
    ops = random_kraus_channel_ops(rng, 3, 4)
    total = sum(dagger(a) @ a for a in ops)
    assert np.abs(total - np.eye(3)).max() < 1e-10
