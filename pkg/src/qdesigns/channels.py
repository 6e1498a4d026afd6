"""Quantum channels in Kraus, supermatrix, and Choi form, plus fidelity formulas.

Operator vectorization is column-stacking: vec(rho) = rho.flatten(order="F"),
the unique convention for which the supermatrix of a Kraus channel is
literally sum_k conj(A_k) (x) A_k.  A round-trip unit test pins this.

The depolarizing channel is parametrized as rho -> p rho + (1-p) I/d (p = 1 is
the identity); the single-qubit noise channels keep the e0 = sqrt(p) I
convention, i.e. they act as the identity with probability p.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import dagger, hermitian_eig, tensor

__all__ = [
    "KrausChannel",
    "Supermatrix",
    "ChoiMatrix",
    "vec",
    "unvec",
    "identity_channel",
    "unitary_channel",
    "depolarizing",
    "standard_noise",
    "generalized_paulis",
    "kraus_to_supermatrix",
    "supermatrix_to_choi",
    "choi_to_kraus",
    "avg_fidelity_exact",
    "entanglement_fidelity",
    "avg_from_entanglement",
    "invariant_decompose",
    "channel_to_json",
    "channel_from_json",
]

TP_TOL = 1e-8


def vec(a: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(a, dtype=complex).flatten(order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    d = int(round(math.sqrt(v.size)))
    return np.asarray(v, dtype=complex).reshape((d, d), order="F")


@dataclass(frozen=True)
class KrausChannel:
    """Completely positive map rho -> sum_k A_k rho A_k^dagger."""

    dim: int
    kraus: tuple[np.ndarray, ...]
    trace_preserving: bool = field(init=False)

    def __post_init__(self):
        if not self.kraus:
            raise ValueError("need at least one Kraus operator")
        for a in self.kraus:
            if a.shape != (self.dim, self.dim):
                raise ValueError(f"Kraus operator shape {a.shape} does not match dim {self.dim}")
        total = sum(dagger(a) @ a for a in self.kraus)
        tp = bool(np.abs(total - np.eye(self.dim)).max() <= TP_TOL)
        object.__setattr__(self, "trace_preserving", tp)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (self.dim, self.dim):
            raise ValueError(f"state shape {rho.shape} does not match channel dim {self.dim}")
        out = np.zeros_like(rho)
        for a in self.kraus:
            out += a @ rho @ dagger(a)
        return out

    def compose_unitary_inverse(self, u: np.ndarray) -> "KrausChannel":
        """The cumulative-noise channel with the target unitary factored out:
        Kraus operators A_k u^dagger."""
        return KrausChannel(self.dim, tuple(a @ dagger(u) for a in self.kraus))


@dataclass(frozen=True)
class Supermatrix:
    """d^2 x d^2 matrix acting on column-stacked operators."""

    dim: int
    mat: np.ndarray

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return unvec(self.mat @ vec(rho))


@dataclass(frozen=True)
class ChoiMatrix:
    dim: int
    mat: np.ndarray


def identity_channel(d: int) -> KrausChannel:
    return KrausChannel(d, (np.eye(d, dtype=complex),))


def unitary_channel(u: np.ndarray) -> KrausChannel:
    u = np.asarray(u, dtype=complex)
    return KrausChannel(u.shape[0], (u,))


def generalized_paulis(d: int) -> list[np.ndarray]:
    """The d^2 operators X^a Z^b with X the cyclic shift and Z the clock."""
    om = np.exp(2j * np.pi / d)
    x = np.zeros((d, d), dtype=complex)
    for j in range(d):
        x[(j + 1) % d, j] = 1
    z = np.diag(om ** np.arange(d))
    out = []
    xa = np.eye(d, dtype=complex)
    for _ in range(d):
        zb = np.eye(d, dtype=complex)
        for _ in range(d):
            out.append(xa @ zb)
            zb = zb @ z
        xa = xa @ x
    return out


def depolarizing(d: int, p: float) -> KrausChannel:
    """rho -> p rho + (1-p) I/d, realized as a generalized-Pauli mixture with
    weight p + (1-p)/d^2 on the identity and (1-p)/d^2 on each other Pauli."""
    if not 0 <= p <= 1:
        raise ValueError(f"depolarizing parameter {p} outside [0, 1]")
    paulis = generalized_paulis(d)
    w_id = p + (1 - p) / d**2
    w_other = (1 - p) / d**2
    ops = [math.sqrt(w_id) * paulis[0]]
    if w_other > 0:
        ops.extend(math.sqrt(w_other) * q for q in paulis[1:])
    return KrausChannel(d, tuple(ops))


_NOISE_OPS = {
    "bit_flip": np.array([[0, 1], [1, 0]], dtype=complex),
    "phase_flip": np.diag([1, -1]).astype(complex),
    "bit_phase_flip": np.array([[0, -1j], [1j, 0]], dtype=complex),
}


def standard_noise(kind: str, p: float) -> KrausChannel:
    """Two-Kraus qubit channel sqrt(p) I, sqrt(1-p) E with E in {X, Z, Y}."""
    if kind not in _NOISE_OPS:
        raise ValueError(f"unknown noise kind {kind!r}")
    if not 0 <= p <= 1:
        raise ValueError(f"noise parameter {p} outside [0, 1]")
    ops = []
    if p > 0:
        ops.append(math.sqrt(p) * np.eye(2, dtype=complex))
    if p < 1:
        ops.append(math.sqrt(1 - p) * _NOISE_OPS[kind])
    return KrausChannel(2, tuple(ops))


def kraus_to_supermatrix(ch: KrausChannel) -> Supermatrix:
    mat = np.zeros((ch.dim**2, ch.dim**2), dtype=complex)
    for a in ch.kraus:
        mat += np.kron(a.conj(), a)
    return Supermatrix(ch.dim, mat)


def supermatrix_to_choi(s: Supermatrix) -> ChoiMatrix:
    """Choi matrix sum_ij (E_ij (x) I) S (I (x) E_ij)."""
    d = s.dim
    eye = np.eye(d, dtype=complex)
    out = np.zeros((d**2, d**2), dtype=complex)
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1
            out += tensor(e, eye) @ s.mat @ tensor(eye, e)
    return ChoiMatrix(d, out)


def choi_to_kraus(x: ChoiMatrix, drop_tol: float = 1e-10, neg_tol: float = 1e-8) -> KrausChannel:
    """Kraus operators sqrt(lambda_k) unvec(eigvec_k) of the Choi matrix.

    Eigenvalues in (-neg_tol, 0) are clipped to zero; anything more negative
    means the map is not completely positive and raises.
    """
    w, v = hermitian_eig(x.mat)
    if w.min() < -neg_tol:
        raise ValueError(f"Choi matrix has significantly negative eigenvalue {w.min():.3e}")
    ops = []
    for k in range(w.size - 1, -1, -1):
        lam = max(float(w[k]), 0.0)
        if lam <= drop_tol:
            continue
        ops.append(math.sqrt(lam) * unvec(v[:, k]))
    if not ops:
        raise ValueError("Choi matrix is numerically zero")
    return KrausChannel(x.dim, tuple(ops))


def avg_fidelity_exact(u: np.ndarray, ch: KrausChannel) -> float:
    """Closed-form average gate fidelity (sum_k |tr A_k u^dagger|^2 + d) / (d^2 + d)."""
    if not ch.trace_preserving:
        raise ValueError("average fidelity formula requires a trace-preserving channel")
    d = ch.dim
    total = sum(abs(np.trace(a @ dagger(u))) ** 2 for a in ch.kraus)
    return float((total + d) / (d**2 + d))


def entanglement_fidelity(ch: KrausChannel) -> float:
    """<phi| (I (x) E)(|phi><phi|) |phi> for the maximally entangled phi,
    computed by explicit d^2-dimensional construction."""
    d = ch.dim
    phi = np.zeros(d * d, dtype=complex)
    for x in range(d):
        phi[x * d + x] = 1
    phi /= math.sqrt(d)
    eye = np.eye(d, dtype=complex)
    val = 0.0
    for a in ch.kraus:
        big = tensor(eye, a)
        val += abs(np.vdot(phi, big @ phi)) ** 2
    return float(val)


def avg_from_entanglement(d: int, f_e: float) -> float:
    return (d * f_e + 1) / (d + 1)


def invariant_decompose(s) -> tuple[complex, complex]:
    """Parameters (p, q) of the twirl-invariant form Lambda(X) = p X + q tr(X) I/d.

    p = (tr S - tr Lambda(I)/d) / (d^2 - 1), q = tr Lambda(I)/d - p; accepts a
    Supermatrix or a KrausChannel.
    """
    if isinstance(s, KrausChannel):
        s = kraus_to_supermatrix(s)
    d = s.dim
    tr_hat = complex(np.trace(s.mat))
    tr_on_id = complex(np.trace(s.apply(np.eye(d, dtype=complex))))
    p = (tr_hat - tr_on_id / d) / (d**2 - 1)
    q = tr_on_id / d - p
    return p, q


def channel_to_json(ch: KrausChannel) -> str:
    """JSON form {"dim": d, "kraus": [[[re, im], ...row-major], ...]}."""
    payload = {
        "dim": ch.dim,
        "kraus": [[[float(z.real), float(z.imag)] for z in a.ravel()] for a in ch.kraus],
    }
    return json.dumps(payload, sort_keys=True)


def channel_from_json(text: str, completeness_tol: float = 1e-6) -> KrausChannel:
    payload = json.loads(text)
    d = int(payload["dim"])
    ops = []
    for flat in payload["kraus"]:
        if len(flat) != d * d:
            raise ValueError(f"Kraus entry has {len(flat)} numbers, wanted {d * d}")
        a = np.array([re + 1j * im for re, im in flat], dtype=complex).reshape(d, d)
        ops.append(a)
    ch = KrausChannel(d, tuple(ops))
    total = sum(dagger(a) @ a for a in ch.kraus)
    if np.abs(total - np.eye(d)).max() > completeness_tol:
        raise ValueError("Kraus operators fail the completeness check")
    return ch
