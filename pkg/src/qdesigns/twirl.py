"""Pauli group in symplectic form, exact Pauli/Clifford twirling, and the
randomized approximate Clifford-subset twirl with its l1 convergence analysis.

Qubit Pauli labels are encoded as base-4 integers: digit q of the label is
a_q + 2 b_q for the factor X^(a_q) Z^(b_q) on qubit q (qubit 0 least
significant).  Phases are tracked on PauliLabel but quotiented out everywhere
a distribution over the group is involved.

Twirling always means averaging V Lambda(V^dag X V) V^dag over the set; every
set used here (Pauli group, Clifford group) is closed under inverses, so this
agrees with the V^dag Lambda(V X V^dag) V form.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .channels import KrausChannel, Supermatrix, kraus_to_supermatrix, vec
from .circuits import Circuit, Gate, parallel_prefix_parity
from .linalg import dagger

__all__ = [
    "PauliLabel",
    "PauliChannel",
    "TwirlSample",
    "pauli_matrix",
    "symplectic_inner",
    "commutation_check",
    "char_sum",
    "pauli_twirl",
    "pauli_twirl_brute",
    "clifford_group_1q",
    "clifford_twirl_exact",
    "unitary_design_check",
    "unitary_1design_check",
    "conjugate_label",
    "sample_twirl_circuit",
    "twirl_markov_step",
    "markov_transition_matrix",
    "ideal_good_case_distribution",
    "l1_to_uniform",
    "epsilon0",
    "step1_success_probability",
    "mc_convergence",
    "mc_convergence_curve",
    "approx_twirl_channel",
    "distribution_to_csv",
    "twirl_result_json",
]

MATRIX_DIM_CAP = 256


@dataclass(frozen=True)
class PauliLabel:
    """X^xa Z^xb factor-wise on n qudits of dimension d, with a tracked
    global-phase exponent of omega_d (ignored for group-quotient purposes)."""

    d: int
    n: int
    xa: tuple[int, ...]
    xb: tuple[int, ...]
    phase: int = 0

    def __post_init__(self):
        if len(self.xa) != self.n or len(self.xb) != self.n:
            raise ValueError("component vectors must have length n")
        if any(not 0 <= c < self.d for c in self.xa + self.xb):
            raise ValueError("components must lie in [0, d)")

    @classmethod
    def identity(cls, d: int, n: int) -> "PauliLabel":
        return cls(d, n, (0,) * n, (0,) * n)

    @classmethod
    def from_int(cls, d: int, n: int, value: int) -> "PauliLabel":
        xa, xb = [], []
        for _ in range(n):
            digit = value % (d * d)
            xa.append(digit % d)
            xb.append(digit // d)
            value //= d * d
        return cls(d, n, tuple(xa), tuple(xb))

    def to_int(self) -> int:
        out = 0
        for q in range(self.n - 1, -1, -1):
            out = out * self.d * self.d + (self.xa[q] + self.d * self.xb[q])
        return out

    def is_identity(self) -> bool:
        return not any(self.xa) and not any(self.xb)

    def __mul__(self, other: "PauliLabel") -> "PauliLabel":
        if (self.d, self.n) != (other.d, other.n):
            raise ValueError("label shape mismatch")
        phase = self.phase + other.phase + sum(b * a for b, a in zip(self.xb, other.xa))
        return PauliLabel(
            self.d,
            self.n,
            tuple((x + y) % self.d for x, y in zip(self.xa, other.xa)),
            tuple((x + y) % self.d for x, y in zip(self.xb, other.xb)),
            phase % self.d,
        )


def _single_pauli(d: int, a: int, b: int) -> np.ndarray:
    om = np.exp(2j * np.pi / d)
    x = np.zeros((d, d), dtype=complex)
    for j in range(d):
        x[(j + 1) % d, j] = 1
    z = np.diag(om ** np.arange(d))
    return np.linalg.matrix_power(x, a) @ np.linalg.matrix_power(z, b)


def pauli_matrix(label: PauliLabel) -> np.ndarray:
    """Dense matrix of the label (qudit 0 least significant)."""
    if label.d**label.n > MATRIX_DIM_CAP:
        raise ValueError("matrix dimension exceeds the cap")
    factors = [_single_pauli(label.d, label.xa[q], label.xb[q]) for q in range(label.n - 1, -1, -1)]
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(out, f)
    return out * np.exp(2j * np.pi * label.phase / label.d)


def all_labels(d: int, n: int) -> list[PauliLabel]:
    return [PauliLabel.from_int(d, n, v) for v in range((d * d) ** n)]


def symplectic_inner(x: PauliLabel, y: PauliLabel) -> int:
    """(x, y)_Sp = x_a . y_b - x_b . y_a mod d."""
    if (x.d, x.n) != (y.d, y.n):
        raise ValueError("label shape mismatch")
    val = sum(a * b for a, b in zip(x.xa, y.xb)) - sum(b * a for b, a in zip(x.xb, y.xa))
    return val % x.d


def commutation_check(x: PauliLabel, y: PauliLabel) -> int:
    """Verify P_x P_y = omega^e P_y P_x at the matrix level and return e.

    The verified exponent is e = (y, x)_Sp: with Z|j> = omega^j |j> one has
    ZX = omega XZ, which fixes this orientation of the symplectic form.
    """
    e = symplectic_inner(y, x)
    if x.d**x.n > 64:
        raise ValueError("matrix verification capped at dimension 64")
    px, py = pauli_matrix(x), pauli_matrix(y)
    om = np.exp(2j * np.pi / x.d)
    if np.abs(px @ py - om**e * (py @ px)).max() > 1e-10:
        raise RuntimeError("commutation phase disagrees with matrix conjugation")  # pragma: no cover
    return e


def char_sum(j: PauliLabel) -> complex:
    """sum over all labels x of omega^((x, j)_Sp): D^2 at j = 0, else 0."""
    om = np.exp(2j * np.pi / j.d)
    return complex(sum(om ** symplectic_inner(x, j) for x in all_labels(j.d, j.n)))


@dataclass(frozen=True)
class PauliChannel:
    """Pauli superoperator rho -> sum_r beta_r P_r rho P_r^dagger, with the
    weights stored over integer labels."""

    d: int
    n: int
    weights: np.ndarray

    def __post_init__(self):
        if self.weights.shape != ((self.d * self.d) ** self.n,):
            raise ValueError("weight vector has the wrong length")

    def to_kraus(self) -> KrausChannel:
        ops = []
        for v, w in enumerate(self.weights):
            if w > 1e-14:
                ops.append(math.sqrt(float(w)) * pauli_matrix(PauliLabel.from_int(self.d, self.n, v)))
        return KrausChannel(self.d**self.n, tuple(ops))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return self.to_kraus().apply(rho)


def pauli_twirl(ch: KrausChannel, d: int = 2) -> PauliChannel:
    """Closed-form Pauli twirl: beta_r = sum_k |tr(P_r^dagger A_k)|^2 / D^2."""
    n = round(math.log(ch.dim, d))
    if d**n != ch.dim:
        raise ValueError(f"channel dim {ch.dim} is not a power of {d}")
    if ch.dim > 16:
        raise ValueError("Pauli twirl capped at D <= 16")
    dim2 = ch.dim**2
    weights = np.zeros((d * d) ** n)
    for v, label in enumerate(all_labels(d, n)):
        p = pauli_matrix(label)
        weights[v] = sum(abs(np.trace(dagger(p) @ a)) ** 2 for a in ch.kraus) / dim2
    return PauliChannel(d, n, weights)


def pauli_twirl_brute(ch: KrausChannel, rho: np.ndarray, d: int = 2) -> np.ndarray:
    """Brute-force conjugation average (1/D^2) sum_j P_j^dag E(P_j rho P_j^dag) P_j."""
    n = round(math.log(ch.dim, d))
    out = np.zeros_like(np.asarray(rho, dtype=complex))
    labels = all_labels(d, n)
    for label in labels:
        p = pauli_matrix(label)
        out += dagger(p) @ ch.apply(p @ rho @ dagger(p)) @ p
    return out / len(labels)


def clifford_group_1q() -> list[np.ndarray]:
    """All 24 single-qubit Cliffords modulo global phase, as a breadth-first
    closure of {H, S}; each matrix is phase-canonicalized (first entry of
    non-negligible magnitude made real positive)."""
    h = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    s = np.diag([1, 1j]).astype(complex)

    def canon(u: np.ndarray) -> np.ndarray:
        flat = u.ravel()
        pivot = flat[np.flatnonzero(np.abs(flat) > 1e-9)[0]]
        return u * (abs(pivot) / pivot)

    def key(u: np.ndarray) -> tuple:
        return tuple(np.round(canon(u).ravel(), 9).tolist())

    found = {key(np.eye(2, dtype=complex)): canon(np.eye(2, dtype=complex))}
    frontier = [np.eye(2, dtype=complex)]
    while frontier:
        nxt = []
        for u in frontier:
            for g in (h, s):
                v = canon(g @ u)
                k = key(v)
                if k not in found:
                    found[k] = v
                    nxt.append(v)
        frontier = nxt
    group = list(found.values())
    if len(group) != 24:
        raise RuntimeError(f"closure of {{H, S}} gave {len(group)} classes, expected 24")
    return group


def _twirl_supermatrix(unitaries, s: Supermatrix) -> Supermatrix:
    d = s.dim
    out = np.zeros_like(s.mat)
    for u in unitaries:
        u_hat = np.kron(u.conj(), u)
        out += u_hat @ s.mat @ dagger(u_hat)
    return Supermatrix(d, out / len(unitaries))


def clifford_twirl_exact(ch: KrausChannel) -> tuple[float, float]:
    """Average C Lambda(C^dag . C) C^dag over the 24 single-qubit Cliffords and
    fit the result to the depolarizing form p rho + (1-p) I/d.

    Returns (p, residual).  For any trace-preserving channel the fit is exact
    and p = (tr Lambda_hat - 1) / (d^2 - 1); a residual above 1e-6 would
    falsify the 2-design property and raises.
    """
    if ch.dim != 2:
        raise ValueError("exact Clifford twirl implemented for single qubits")
    s = kraus_to_supermatrix(ch)
    twirled = _twirl_supermatrix(clifford_group_1q(), s)
    d = ch.dim
    p = float(np.real((np.trace(s.mat) - 1) / (d**2 - 1)))
    vi = vec(np.eye(d, dtype=complex))
    target = p * np.eye(d**2) + ((1 - p) / d) * np.outer(vi, vi.conj())
    residual = float(np.abs(twirled.mat - target).max())
    if residual > 1e-6:
        raise RuntimeError(f"Clifford twirl failed to depolarize: residual {residual:.2e}")
    return p, residual


def unitary_design_check(unitaries, m: np.ndarray, n: np.ndarray, o: np.ndarray) -> float:
    """Max-entry deviation of (1/K) sum_k U_k^dag M U_k N U_k^dag O U_k from
    the Haar value p N + q tr(N) I/d."""
    d = m.shape[0]
    avg = np.zeros((d, d), dtype=complex)
    for u in unitaries:
        avg += dagger(u) @ m @ u @ n @ dagger(u) @ o @ u
    avg /= len(unitaries)
    tr_hat = np.trace(m) * np.trace(o)
    tr_on_id = np.trace(m @ o)
    p = (tr_hat - tr_on_id / d) / (d**2 - 1)
    q = tr_on_id / d - p
    haar = p * n + q * np.trace(n) * np.eye(d) / d
    return float(np.abs(avg - haar).max())


def unitary_1design_check(unitaries, rho: np.ndarray) -> float:
    """Max-entry deviation of (1/K) sum_k U_k rho U_k^dag from tr(rho) I/d."""
    d = rho.shape[0]
    avg = sum(u @ rho @ dagger(u) for u in unitaries) / len(unitaries)
    return float(np.abs(avg - np.trace(rho) * np.eye(d) / d).max())


# --- symplectic conjugation (qubits) ---------------------------------------

def _conj_bits(kind: str, qubits: tuple[int, ...], xa: list[int], xb: list[int]) -> None:
    """In-place symplectic update, phases ignored."""
    if kind == "H":
        (q,) = qubits
        xa[q], xb[q] = xb[q], xa[q]
    elif kind == "S":
        (q,) = qubits
        xb[q] ^= xa[q]
    elif kind == "T":  # X -> Y -> Z -> X
        (q,) = qubits
        xa[q], xb[q] = xa[q] ^ xb[q], xa[q]
    elif kind == "CNOT":
        c, t = qubits
        xa[t] ^= xa[c]
        xb[c] ^= xb[t]
    else:
        raise ValueError(f"conjugation not defined for gate kind {kind!r}")


def conjugate_label(gate: Gate, label: PauliLabel) -> PauliLabel:
    """Image of a Pauli label under conjugation by one Clifford gate
    (H, S, T, or CNOT), with the global phase quotiented out."""
    if label.d != 2:
        raise ValueError("label conjugation implemented for qubits")
    xa, xb = list(label.xa), list(label.xb)
    if gate.kind == "CNOT":
        _conj_bits("CNOT", (gate.controls[0], gate.targets[0]), xa, xb)
    else:
        _conj_bits(gate.kind, (gate.targets[0],), xa, xb)
    return PauliLabel(2, label.n, tuple(xa), tuple(xb), label.phase)


# --- randomized approximate twirl -------------------------------------------

@dataclass(frozen=True)
class RoundChoices:
    """One round of sampled randomness for the approximate twirl."""

    mask: int  # non-empty qubit subset B
    s_pre: tuple[int, ...]  # T exponents on non-control qubits, before fan-out
    fanout: tuple[bool, ...]  # CNOT control->target included (prob 3/4 each)
    s_post: tuple[int, ...]  # T exponents after fan-out
    s_gate: bool  # S-twirl on the control (prob 1/2)
    fanin: tuple[bool, ...]  # CNOT target->control included (prob 1/2 each)
    t_final: int  # final T exponent on the control

    @property
    def control(self) -> int:
        return (self.mask & -self.mask).bit_length() - 1


def _sample_round(n: int, rng: np.random.Generator) -> tuple[RoundChoices, int]:
    bits = 0
    mask = int(rng.integers(1, 2**n))
    bits += n
    others = n - 1
    s_pre = tuple(int(v) for v in rng.integers(0, 3, size=others))
    fanout = tuple(bool(v) for v in rng.random(others) < 0.75)
    s_post = tuple(int(v) for v in rng.integers(0, 3, size=others))
    s_gate = bool(rng.random() < 0.5)
    fanin = tuple(bool(v) for v in rng.random(others) < 0.5)
    t_final = int(rng.integers(0, 3))
    bits += 2 * others + 2 * others + 2 * others + 1 + others + 2
    return RoundChoices(mask, s_pre, fanout, s_post, s_gate, fanin, t_final), bits


def _round_gates(n: int, rc: RoundChoices) -> list[Gate]:
    """Concrete H/S/T/CNOT gate sequence realizing one sampled round."""
    control = rc.control
    members = [q for q in range(n) if (rc.mask >> q) & 1 and q != control]
    others = [q for q in range(n) if q != control]
    gates: list[Gate] = []
    if members:
        gates.extend(parallel_prefix_parity(n, members, control).gates)
    for q, s in zip(others, rc.s_pre):
        gates.extend([Gate("T", (q,))] * s)
    for q, inc in zip(others, rc.fanout):
        if inc:
            gates.append(Gate("CNOT", (q,), (control,)))
    for q, s in zip(others, rc.s_post):
        gates.extend([Gate("T", (q,))] * s)
    if rc.s_gate:
        gates.append(Gate("S", (control,)))
    for q, inc in zip(others, rc.fanin):
        if inc:
            gates.append(Gate("CNOT", (control,), (q,)))
    gates.extend([Gate("T", (control,))] * rc.t_final)
    return gates


@dataclass(frozen=True)
class TwirlSample:
    circuit: Circuit
    random_bits_used: int
    rounds: int


def sample_twirl_circuit(n: int, rounds: int, rng: np.random.Generator) -> TwirlSample:
    """Sample one circuit of the approximate-twirl ensemble: per round a
    parity fan-in onto a random control, T twirls, probability-3/4 fan-out
    CNOTs, an S twirl, probability-1/2 fan-in CNOTs, and a final T twirl."""
    if n < 2:
        raise ValueError("the randomized twirl needs n >= 2 qubits")
    circuit = Circuit(n, 2)
    total_bits = 0
    for _ in range(rounds):
        rc, bits = _sample_round(n, rng)
        total_bits += bits
        for g in _round_gates(n, rc):
            circuit.append(g)
    return TwirlSample(circuit=circuit, random_bits_used=total_bits, rounds=rounds)


# --- exact Markov chain over label distributions ----------------------------

@lru_cache(maxsize=None)
def _perm_table(n: int, kind: str, qubits: tuple[int, ...]) -> np.ndarray:
    size = 4**n
    perm = np.empty(size, dtype=np.int64)
    for v in range(size):
        xa = [(v >> (2 * q)) & 1 for q in range(n)]
        xb = [(v >> (2 * q + 1)) & 1 for q in range(n)]
        _conj_bits(kind, qubits, xa, xb)
        perm[v] = sum((xa[q] + 2 * xb[q]) << (2 * q) for q in range(n))
    return perm


def _push(dist: np.ndarray, perm: np.ndarray) -> np.ndarray:
    out = np.empty_like(dist)
    out[perm] = dist
    return out


def _step2_push(dist: np.ndarray, n: int, control: int) -> np.ndarray:
    others = [q for q in range(n) if q != control]
    t_perm = {q: _perm_table(n, "T", (q,)) for q in range(n)}
    for q in others:
        dist = (dist + _push(dist, t_perm[q]) + _push(_push(dist, t_perm[q]), t_perm[q])) / 3
    for q in others:
        dist = 0.25 * dist + 0.75 * _push(dist, _perm_table(n, "CNOT", (control, q)))
    for q in others:
        dist = (dist + _push(dist, t_perm[q]) + _push(_push(dist, t_perm[q]), t_perm[q])) / 3
    s_perm = _perm_table(n, "S", (control,))
    dist = 0.5 * dist + 0.5 * _push(dist, s_perm)
    for q in others:
        dist = 0.5 * dist + 0.5 * _push(dist, _perm_table(n, "CNOT", (q, control)))
    tc = t_perm[control]
    dist = (dist + _push(dist, tc) + _push(_push(dist, tc), tc)) / 3
    return dist


def twirl_markov_step(dist: np.ndarray, n: int) -> np.ndarray:
    """Exact one-round pushforward of a distribution over qubit Pauli labels
    under the randomized twirl (uniform over the 2^n - 1 subset choices)."""
    if n > 3:
        raise ValueError("exact chain capped at n <= 3")
    dist = np.asarray(dist, dtype=float)
    if dist.shape != (4**n,):
        raise ValueError(f"distribution length {dist.shape} != 4^{n}")
    if dist.min() < -1e-12 or abs(dist.sum() - 1) > 1e-8:
        raise ValueError("input is not a probability distribution")
    out = np.zeros_like(dist)
    for mask in range(1, 2**n):
        control = (mask & -mask).bit_length() - 1
        d_b = dist
        for q in range(n):
            if (mask >> q) & 1 and q != control:
                d_b = _push(d_b, _perm_table(n, "CNOT", (q, control)))
        out += _step2_push(d_b, n, control)
    return out / (2**n - 1)


def markov_transition_matrix(n: int) -> np.ndarray:
    """Column-stochastic matrix P with P[:, v] the one-round image of the
    point mass at label v."""
    size = 4**n
    p = np.empty((size, size))
    for v in range(size):
        e = np.zeros(size)
        e[v] = 1
        p[:, v] = twirl_markov_step(e, n)
    return p


def ideal_good_case_distribution(n: int) -> tuple[np.ndarray, np.ndarray]:
    """(exact, idealized) step-2 output for a point mass with X on the control.

    The idealized q is uniform over the support of the exact distribution;
    its support complement is exactly the labels with identity on the control
    and I/Z elsewhere, so ||u - q||_1 = 2 (2^(n-1) - 1) / (4^n - 1).
    """
    start = np.zeros(4**n)
    start[1] = 1  # X on qubit 0
    exact = _step2_push(start, n, control=0)
    support = exact > 1e-15
    ideal = np.where(support, 1.0 / support.sum(), 0.0)
    return exact, ideal


def l1_to_uniform(dist: np.ndarray) -> float:
    """l1 distance to the uniform distribution over non-identity labels."""
    dist = np.asarray(dist, dtype=float)
    u = 1.0 / (dist.size - 1)
    return float(abs(dist[0]) + np.abs(dist[1:] - u).sum())


def epsilon0(n: int) -> float:
    return 1.0 / (2**n - 2.0**-n)


def step1_success_probability(label: PauliLabel) -> float:
    """Exact probability that the fan-in step leaves X or Y on the control.

    Over the uniform non-empty subset B, the control ends with X-component
    XOR of the label's X-bits over B, so the probability is the fraction of
    subsets meeting the X-support with odd parity: 2^(n-1)/(2^n - 1) whenever
    the X-part is nonzero and 0 for pure I/Z labels.  The convergence analysis
    only uses 1/2 as a lower bound; nothing tighter is asserted anywhere.
    """
    n = label.n
    good = 0
    for mask in range(1, 2**n):
        parity = 0
        for q in range(n):
            if (mask >> q) & 1:
                parity ^= label.xa[q]
        good += parity
    return good / (2**n - 1)


# --- vectorized Monte-Carlo convergence --------------------------------------

def _mc_round(xa: np.ndarray, xb: np.ndarray, n: int, rng: np.random.Generator) -> float:
    """Apply one sampled round to every row of the (samples, n) bit arrays,
    drawing fresh randomness per sample.  Mirrors _round_gates exactly.

    Returns the empirical step-1 success rate: the fraction of samples whose
    control qubit carries X or Y after the fan-in.  The analysis only uses
    1/2 as a lower bound for it; it is reported, never asserted tighter.
    """
    m = xa.shape[0]
    mask = rng.integers(1, 2**n, size=m)
    low = mask & -mask
    control = np.round(np.log2(low)).astype(np.int64)
    rows = np.arange(m)

    def apply_t(qsel: np.ndarray, times: np.ndarray) -> None:
        # T: (a, b) -> (a xor b, a), `times` in {0,1,2} per row
        for rep in (1, 2):
            sel = times >= rep
            a = xa[rows[sel], qsel[sel]]
            b = xb[rows[sel], qsel[sel]]
            xa[rows[sel], qsel[sel]] = a ^ b
            xb[rows[sel], qsel[sel]] = a

    # step 1: fan-in parity from the other members of B onto the control
    for q in range(n):
        member = ((mask >> q) & 1).astype(bool) & (control != q)
        if not member.any():
            continue
        # CNOT(q -> control): a_ctrl ^= a_q ; b_q ^= b_ctrl
        sel = rows[member]
        xa[sel, control[member]] ^= xa[sel, q]
        xb[sel, q] ^= xb[sel, control[member]]
    success_rate = float((xa[rows, control] == 1).mean())

    for q in range(n):
        isq = control != q
        times = np.where(isq, rng.integers(0, 3, size=m), 0)
        apply_t(np.full(m, q), times)
    for q in range(n):
        inc = (rng.random(m) < 0.75) & (control != q)
        sel = rows[inc]
        # CNOT(control -> q)
        xa[sel, q] ^= xa[sel, control[inc]]
        xb[sel, control[inc]] ^= xb[sel, q]
    for q in range(n):
        isq = control != q
        times = np.where(isq, rng.integers(0, 3, size=m), 0)
        apply_t(np.full(m, q), times)
    s_on = rng.random(m) < 0.5
    sel = rows[s_on]
    xb[sel, control[s_on]] ^= xa[sel, control[s_on]]
    for q in range(n):
        inc = (rng.random(m) < 0.5) & (control != q)
        sel = rows[inc]
        # CNOT(q -> control)
        xa[sel, control[inc]] ^= xa[sel, q]
        xb[sel, q] ^= xb[sel, control[inc]]
    apply_t(control, rng.integers(0, 3, size=m))
    return success_rate


def mc_convergence_curve(
    n: int,
    k: int,
    samples: int,
    rng: np.random.Generator,
    start: PauliLabel | None = None,
) -> list[dict]:
    """Monte-Carlo l1-to-uniform estimates after each of k rounds.

    The plug-in ||empirical - u||_1 carries a multinomial sampling-noise floor
    (rising with the label count; it dwarfs small true distances), so the same
    statistic is computed for one exact-uniform multinomial draw of the same
    size and subtracted, clamped at zero.  Each entry carries the raw value,
    the calibration floor, and the corrected estimate.
    """
    if start is None:
        start = PauliLabel(2, n, (1,) + (0,) * (n - 1), (0,) * n)
    xa = np.tile(np.array(start.xa, dtype=np.int64), (samples, 1))
    xb = np.tile(np.array(start.xb, dtype=np.int64), (samples, 1))
    u = np.full(4**n - 1, 1.0 / (4**n - 1))
    null_draw = rng.multinomial(samples, u) / samples
    floor = l1_to_uniform(np.concatenate(([0.0], null_draw)))
    curve = []
    for step in range(1, k + 1):
        success = _mc_round(xa, xb, n, rng)
        values = ((xa + 2 * xb) << (2 * np.arange(n))).sum(axis=1)
        empirical = np.bincount(values, minlength=4**n) / samples
        raw = l1_to_uniform(empirical)
        curve.append(
            {
                "k": step,
                "l1_raw": raw,
                "noise_floor": floor,
                "l1": max(0.0, raw - floor),
                "step1_success": success,
            }
        )
    return curve


def mc_convergence(
    n: int,
    k: int,
    samples: int,
    rng: np.random.Generator,
    start: PauliLabel | None = None,
) -> dict:
    """Final entry of mc_convergence_curve (noise-floor-corrected l1 after k rounds)."""
    curve = mc_convergence_curve(n, k, samples, rng, start)
    return {key: curve[-1][key] for key in ("l1_raw", "noise_floor", "l1")}


def approx_twirl_channel(
    ch: KrausChannel,
    n: int,
    k: int,
    trials: int = 0,
    rng: np.random.Generator | None = None,
) -> tuple[PauliChannel, float]:
    """Push a channel's Pauli weights through k twirl rounds and bound the
    diamond-norm gap to the perfect Clifford twirl.

    trials = 0 runs the exact chain (n <= 3); otherwise the weights are
    propagated by `trials` sampled circuits per non-identity source label.
    Returns the twirled Pauli channel and B(Lambda) (eps0 + eps_k), where
    eps_k is the realized l1 gap beyond eps0, maximized over source labels in
    exact mode.
    """
    pauli_ch = pauli_twirl(ch)
    if pauli_ch.n != n:
        raise ValueError("channel size disagrees with n")
    dim = 2**n
    tr_hat = sum(abs(np.trace(a)) ** 2 for a in ch.kraus)
    tr_on_id = float(np.real(np.trace(sum(a @ dagger(a) for a in ch.kraus))))
    b_lambda = (dim * tr_on_id - tr_hat) / dim**4
    eps_k = 0.0
    if trials == 0:
        p = markov_transition_matrix(n)
        pk = np.linalg.matrix_power(p, k)
        weights = pk @ pauli_ch.weights
        for v in range(1, 4**n):
            eps_k = max(eps_k, l1_to_uniform(pk[:, v]) - epsilon0(n))
    else:
        if rng is None:
            raise ValueError("Monte-Carlo mode needs an rng")
        weights = np.zeros(4**n)
        weights[0] = pauli_ch.weights[0]
        rest = 1 - pauli_ch.weights[0]
        if rest > 1e-12:
            cond = pauli_ch.weights[1:] / rest
            picks = rng.choice(np.arange(1, 4**n), size=trials, p=cond)
            xa = np.empty((trials, n), dtype=np.int64)
            xb = np.empty((trials, n), dtype=np.int64)
            for q in range(n):
                digit = (picks >> (2 * q)) & 3
                xa[:, q] = digit & 1
                xb[:, q] = digit >> 1
            for _ in range(k):
                _mc_round(xa, xb, n, rng)
            values = ((xa + 2 * xb) << (2 * np.arange(n))).sum(axis=1)
            weights[1:] += np.bincount(values, minlength=4**n)[1:] / trials * rest
            est = mc_convergence(n, k, trials, rng)
            eps_k = max(0.0, est["l1"] - epsilon0(n))
    bound = float(np.real(b_lambda)) * (epsilon0(n) + max(eps_k, 0.0))
    return PauliChannel(2, n, weights), bound


def distribution_to_csv(dist: np.ndarray) -> str:
    lines = ["label,probability"]
    for v, p in enumerate(np.asarray(dist, dtype=float)):
        lines.append(f"{v},{float(p)!r}")
    return "\n".join(lines) + "\n"


def twirl_result_json(n: int, k: int, l1: float, bound: float) -> str:
    return json.dumps(
        {"n": n, "k": k, "l1": l1, "epsilon0": epsilon0(n), "bound": bound},
        sort_keys=True,
    )
