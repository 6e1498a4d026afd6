"""Dense complex linear algebra: the numerical substrate for every other module.

States are 1-D complex128 ndarrays, operators 2-D.  Qudit registers use
little-endian digit order: qudit j carries the base-d digit of weight d^j of
the computational-basis index.  All functions are pure; nothing here mutates
its inputs.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "tensor",
    "dagger",
    "hs_inner",
    "partial_trace",
    "hermitian_eig",
    "is_hermitian",
    "basis_state",
    "random_complex_matrix",
    "random_hermitian",
    "random_unitary",
    "random_state",
    "random_density",
    "random_kraus_channel_ops",
]

OPERATOR_DIM_CAP = 256
SUPERMATRIX_DIM_CAP = 4096


def tensor(*factors: np.ndarray) -> np.ndarray:
    """Kronecker product of vectors or matrices, first factor index-major."""
    if not factors:
        raise ValueError("tensor of no factors")
    out = np.asarray(factors[0], dtype=complex)
    for f in factors[1:]:
        out = np.kron(out, np.asarray(f, dtype=complex))
    return out


def dagger(a: np.ndarray) -> np.ndarray:
    return np.asarray(a).conj().T


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product tr(a^dagger b)."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.sum(a.conj() * b))


def partial_trace(rho: np.ndarray, dims: tuple[int, int], keep: str) -> np.ndarray:
    """Trace out one factor of a bipartite operator on H_A (x) H_B.

    keep is "A" or "B"; rho must be (dA*dB) x (dA*dB) with A index-major.
    """
    da, db = dims
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (da * db, da * db):
        raise ValueError(f"operator shape {rho.shape} does not match dims {dims}")
    r = rho.reshape(da, db, da, db)
    if keep == "A":
        return np.einsum("ikjk->ij", r)
    if keep == "B":
        return np.einsum("kikj->ij", r)
    raise ValueError("keep must be 'A' or 'B'")


def is_hermitian(a: np.ndarray, tol: float = 1e-9) -> bool:
    a = np.asarray(a)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and np.abs(a - a.conj().T).max() <= tol


def hermitian_eig(a: np.ndarray, tol: float = 1e-8) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix with deterministic output.

    Returns (eigenvalues ascending, eigenvector columns).  Each eigenvector is
    oriented so that its first component of non-negligible magnitude is real
    and positive, which pins the result across runs.
    """
    a = np.asarray(a, dtype=complex)
    if not is_hermitian(a, tol):
        raise ValueError("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    for k in range(v.shape[1]):
        col = v[:, k]
        idx = np.flatnonzero(np.abs(col) > 1e-8)
        pivot = idx[0] if idx.size else int(np.argmax(np.abs(col)))
        phase = col[pivot] / abs(col[pivot])
        v[:, k] = col / phase
    return w, v


def basis_state(dim: int, index: int) -> np.ndarray:
    e = np.zeros(dim, dtype=complex)
    e[index] = 1.0
    return e


def random_complex_matrix(rng: np.random.Generator, d: int) -> np.ndarray:
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


def random_hermitian(rng: np.random.Generator, d: int) -> np.ndarray:
    g = random_complex_matrix(rng, d)
    return (g + g.conj().T) / 2


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    """Random unitary from the eigenvectors of a random Hermitian matrix,
    with random eigenphases."""
    _, v = hermitian_eig(random_hermitian(rng, d))
    phases = np.exp(2j * np.pi * rng.random(d))
    return v * phases


def random_state(rng: np.random.Generator, d: int) -> np.ndarray:
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return psi / np.linalg.norm(psi)


def random_density(rng: np.random.Generator, d: int) -> np.ndarray:
    g = random_complex_matrix(rng, d)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_kraus_channel_ops(rng: np.random.Generator, d: int, n_kraus: int) -> list[np.ndarray]:
    """Random trace-preserving Kraus set: Gaussian operators normalized by
    the inverse square root of sum A^dagger A."""
    raw = [random_complex_matrix(rng, d) for _ in range(n_kraus)]
    s = sum(a.conj().T @ a for a in raw)
    w, v = hermitian_eig(s)
    s_inv_sqrt = v @ np.diag(1 / np.sqrt(w)) @ v.conj().T
    return [a @ s_inv_sqrt for a in raw]
