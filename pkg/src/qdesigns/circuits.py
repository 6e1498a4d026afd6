"""Gate-level circuits, statevector simulation, and the MUB preparation circuits.

Registers are n qudits of equal local dimension d; qudit j carries the base-d
digit of weight d^j of the computational-basis index (little-endian).  Gates
are applied in list order by local tensor contraction; the full unitary is
never materialized during simulation.

Supported gate kinds:
    H, X, Z, S, T_pi8              single-qubit (d = 2); T_pi8 is diag(1, e^{i pi/4})
    T                              the Clifford cycler H*S (d = 2)
    PhaseExp(num, den)             diag(1, exp(2 pi i num/den)) on a qubit
    Xd(num), Zd(num)               level shift / level phase on a qudit
    Fp                             discrete Fourier gate on one qudit (Fpinv: inverse)
    PhaseVec(phases, den)          diag(exp(2 pi i phases[j]/den))
    CPhase(num, den)               |u,v> -> exp(2 pi i num u v / den)|u,v>
    CNOT, CADD(num)                controlled add: target += num * control (mod d)
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .finite_algebra import GfContext, GfElement, is_prime

__all__ = [
    "Gate",
    "Circuit",
    "CircuitParseError",
    "AmplitudeSplit",
    "simulate",
    "circuit_unitary",
    "build_mub_circuit_prime",
    "build_mub_circuit_prime_power",
    "amplitude_amplify",
    "amplitude_split",
    "projected_mub_prepare",
    "embedding_prime",
    "parallel_prefix_parity",
    "classical_parity_map",
    "emit_circuit",
    "parse_circuit",
]

SIMULATE_DIM_CAP = 2**12
UNITARY_DIM_CAP = 256

_QUBIT_ONLY = {"H", "X", "Z", "S", "T_pi8", "T", "PhaseExp", "CNOT"}
_KINDS = _QUBIT_ONLY | {"Xd", "Zd", "Fp", "Fpinv", "PhaseVec", "CPhase", "CADD"}


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    num: int = 0
    den: int = 1
    phases: tuple[int, ...] = ()

    @property
    def qudits(self) -> tuple[int, ...]:
        return self.controls + self.targets


class Circuit:
    """Ordered gate list on n qudits of dimension d, immutable once built up.

    depth is the greedy-layered schedule depth: each gate occupies the
    earliest layer after the last use of any qudit it touches.
    """

    def __init__(self, n: int, d: int = 2, gates: list[Gate] | None = None):
        if n < 1 or d < 2:
            raise ValueError("need n >= 1 qudits of dimension d >= 2")
        self.n = n
        self.d = d
        self.gates: list[Gate] = []
        for g in gates or []:
            self.append(g)

    def append(self, gate: Gate) -> None:
        if gate.kind not in _KINDS:
            raise ValueError(f"unknown gate kind {gate.kind!r}")
        if gate.kind in _QUBIT_ONLY and self.d != 2:
            raise ValueError(f"gate {gate.kind} requires qubits (d = 2), register has d = {self.d}")
        qs = gate.qudits
        if len(set(qs)) != len(qs):
            raise ValueError(f"gate {gate.kind} touches a qudit twice: {qs}")
        if any(not 0 <= q < self.n for q in qs):
            raise ValueError(f"gate {gate.kind} indices {qs} out of range for n = {self.n}")
        if gate.den <= 0:
            raise ValueError("phase denominator must be positive")
        self.gates.append(gate)

    @property
    def gate_count(self) -> int:
        return len(self.gates)

    @property
    def depth(self) -> int:
        last = [0] * self.n
        depth = 0
        for g in self.gates:
            layer = 1 + max(last[q] for q in g.qudits)
            for q in g.qudits:
                last[q] = layer
            depth = max(depth, layer)
        return depth

    def inverse(self) -> "Circuit":
        inv = Circuit(self.n, self.d)
        for g in reversed(self.gates):
            for ig in _invert_gate(g, self.d):
                inv.append(ig)
        return inv

    def __iter__(self):
        return iter(self.gates)

    def __len__(self):
        return len(self.gates)


def _invert_gate(g: Gate, d: int) -> list[Gate]:
    k = g.kind
    if k in ("H", "X", "Z", "CNOT"):
        return [g]
    if k == "S":
        return [Gate("PhaseExp", g.targets, num=3, den=4)]
    if k == "T_pi8":
        return [Gate("PhaseExp", g.targets, num=7, den=8)]
    if k == "T":  # T = H*S, so T^dagger applies H first, then S^dagger
        return [Gate("H", g.targets), Gate("PhaseExp", g.targets, num=3, den=4)]
    if k == "PhaseExp":
        return [Gate("PhaseExp", g.targets, num=(-g.num) % g.den, den=g.den)]
    if k == "PhaseVec":
        return [Gate("PhaseVec", g.targets, den=g.den, phases=tuple((-x) % g.den for x in g.phases))]
    if k == "CPhase":
        return [Gate("CPhase", g.targets, num=(-g.num) % g.den, den=g.den)]
    if k == "Xd":
        return [Gate("Xd", g.targets, num=(-g.num) % d)]
    if k == "Zd":
        return [Gate("Zd", g.targets, num=(-g.num) % d)]
    if k == "Fp":
        return [Gate("Fpinv", g.targets)]
    if k == "Fpinv":
        return [Gate("Fp", g.targets)]
    if k == "CADD":
        return [Gate("CADD", g.targets, g.controls, num=(-g.num) % d)]
    raise ValueError(f"cannot invert gate kind {k!r}")  # pragma: no cover


_H2 = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_X2 = np.array([[0, 1], [1, 0]], dtype=complex)
_S2 = np.diag([1, 1j]).astype(complex)
_T_CYCLE = _H2 @ _S2


def _fourier(d: int) -> np.ndarray:
    j = np.arange(d)
    return np.exp(2j * np.pi * np.outer(j, j) / d) / math.sqrt(d)


def gate_matrix(g: Gate, d: int) -> np.ndarray:
    """Local matrix of a gate on its own qudits (controls major)."""
    k = g.kind
    if k == "H":
        return _H2
    if k == "X":
        return _X2
    if k == "Z":
        return np.diag([1, -1]).astype(complex)
    if k == "S":
        return _S2
    if k == "T_pi8":
        return np.diag([1, cmath.exp(1j * np.pi / 4)])
    if k == "T":
        return _T_CYCLE
    if k == "PhaseExp":
        return np.diag([1, cmath.exp(2j * np.pi * g.num / g.den)])
    if k == "Xd":
        m = np.zeros((d, d), dtype=complex)
        for j in range(d):
            m[(j + g.num) % d, j] = 1
        return m
    if k == "Zd":
        return np.diag([cmath.exp(2j * np.pi * g.num * j / d) for j in range(d)])
    if k == "Fp":
        return _fourier(d)
    if k == "Fpinv":
        return _fourier(d).conj().T
    if k == "PhaseVec":
        if len(g.phases) != d:
            raise ValueError(f"PhaseVec needs {d} phase numerators, got {len(g.phases)}")
        return np.diag([cmath.exp(2j * np.pi * x / g.den) for x in g.phases])
    if k == "CPhase":
        u = np.arange(d)
        return np.diag(np.exp(2j * np.pi * g.num * np.outer(u, u).ravel() / g.den))
    if k in ("CNOT", "CADD"):
        num = 1 if k == "CNOT" else g.num
        m = np.zeros((d * d, d * d), dtype=complex)
        for u in range(d):
            for v in range(d):
                m[u * d + ((v + num * u) % d), u * d + v] = 1
        return m
    raise ValueError(f"unknown gate kind {k!r}")  # pragma: no cover


def apply_local(state: np.ndarray, mat: np.ndarray, qudits: tuple[int, ...], n: int, d: int) -> np.ndarray:
    """Apply a matrix acting on the listed qudits (first listed = major index)."""
    t = state.reshape((d,) * n)
    # qudit j lives on axis n-1-j
    axes = [n - 1 - q for q in qudits]
    m = mat.reshape((d,) * (2 * len(qudits)))
    t = np.tensordot(m, t, axes=(list(range(len(qudits), 2 * len(qudits))), axes))
    # tensordot puts the new indices first, in qudit-list order
    t = np.moveaxis(t, range(len(qudits)), axes)
    return t.reshape(-1)


def _digit(idx: np.ndarray, q: int, d: int) -> np.ndarray:
    return (idx // d**q) % d


def _apply_gate(state: np.ndarray, g: Gate, n: int, d: int) -> np.ndarray:
    dim = state.size
    k = g.kind
    if k in ("Z", "S", "T_pi8", "PhaseExp", "Zd", "PhaseVec", "CPhase"):
        idx = np.arange(dim)
        if k == "CPhase":
            u = _digit(idx, g.targets[0], d)
            v = _digit(idx, g.targets[1], d)
            phases = np.exp(2j * np.pi * g.num * (u * v) / g.den)
        else:
            t = _digit(idx, g.targets[0], d)
            if k == "PhaseVec":
                phases = np.exp(2j * np.pi * np.asarray(g.phases)[t] / g.den)
            elif k == "Zd":
                phases = np.exp(2j * np.pi * g.num * t / d)
            else:
                num, den = {"Z": (1, 2), "S": (1, 4), "T_pi8": (1, 8)}.get(k, (g.num, g.den))
                phases = np.where(t == 1, cmath.exp(2j * np.pi * num / den), 1.0)
        return state * phases
    if k in ("CNOT", "CADD"):
        num = 1 if k == "CNOT" else g.num
        idx = np.arange(dim)
        c = _digit(idx, g.controls[0], d)
        v = _digit(idx, g.targets[0], d)
        new_idx = idx + ((v + num * c) % d - v) * d ** g.targets[0]
        out = np.empty_like(state)
        out[new_idx] = state
        return out
    return apply_local(state, gate_matrix(g, d), g.targets, n, d)


def simulate(circuit: Circuit, state: np.ndarray) -> np.ndarray:
    """Run the circuit on a statevector; returns a fresh array."""
    dim = circuit.d**circuit.n
    state = np.asarray(state, dtype=complex)
    if state.shape != (dim,):
        raise ValueError(f"input dimension {state.shape} does not match register size {dim}")
    if dim > SIMULATE_DIM_CAP:
        raise ValueError(f"register dimension {dim} exceeds the simulation cap {SIMULATE_DIM_CAP}")
    out = state.copy()
    for g in circuit.gates:
        out = _apply_gate(out, g, circuit.n, circuit.d)
    return out


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Full unitary by simulating every basis input (capped at dimension 256)."""
    dim = circuit.d**circuit.n
    if dim > UNITARY_DIM_CAP:
        raise ValueError(f"dimension {dim} exceeds the dense-unitary cap {UNITARY_DIM_CAP}")
    u = np.zeros((dim, dim), dtype=complex)
    for j in range(dim):
        e = np.zeros(dim, dtype=complex)
        e[j] = 1
        u[:, j] = simulate(circuit, e)
    return u


def _tournament_rounds(m: int) -> list[tuple[list[tuple[int, int]], int | None]]:
    """Round-robin schedule of all pairs {i < j} on m vertices.

    Returns one (pairs, idle_vertex) entry per round; idle_vertex is None when
    m is even.  Pairs within a round are vertex-disjoint, so each round fits
    in a single circuit layer.
    """
    odd = m % 2 == 1
    m2 = m + 1 if odd else m
    arr = list(range(m2))
    rounds = []
    for _ in range(m2 - 1):
        pairs, idle = [], None
        for i in range(m2 // 2):
            a, b = arr[i], arr[m2 - 1 - i]
            if odd and (a == m or b == m):
                idle = a if b == m else b
                continue
            pairs.append((min(a, b), max(a, b)))
        rounds.append((pairs, idle))
        arr = [arr[0]] + [arr[-1]] + arr[1:-1]
    return rounds


def build_mub_circuit_prime(p: int, n_qubits: int, a: int, b: int) -> Circuit:
    """Preparation circuit on n_qubits+1 qubits for the prime-dimension MUB
    state with labels (a, b); a = p selects the computational branch.

    For a < p the circuit is H on every qubit followed by phase injection of
    w_p^(a x^2 + b x): one controlled phase per qubit pair scheduled in
    tournament rounds and one merged-with-nothing single-qubit phase layer
    each for the linear and quadratic diagonal terms.  Restricted to the
    first p amplitudes and renormalized, the output is exactly the
    closed-form MUB state.
    """
    if not is_prime(p) or p == 2:
        raise ValueError(f"p = {p} must be an odd prime")
    m = n_qubits + 1
    if p > 2**m:
        raise ValueError(f"p = {p} does not fit on {m} qubits")
    if not 0 <= a <= p:
        raise ValueError(f"basis label a = {a} outside 0..{p}")
    if not 0 <= b < p:
        raise ValueError(f"state label b = {b} outside 0..{p - 1}")
    c = Circuit(n=m, d=2)
    if a == p:
        for i in range(m):
            if (b >> i) & 1:
                c.append(Gate("X", (i,)))
        return c
    for i in range(m):
        c.append(Gate("H", (i,)))
    # quadratic cross terms w^(a 2^(i+j+1)) per pair, linear phases absorbed
    # into tournament idle slots when m is odd
    rounds = _tournament_rounds(m)
    for pairs, idle in rounds:
        for i, j in pairs:
            c.append(Gate("CPhase", (i, j), num=(2 * a * 2 ** (i + j)) % p, den=p))
        if idle is not None:
            c.append(Gate("PhaseExp", (idle,), num=(b * 2**idle) % p, den=p))
    if m % 2 == 0:
        for i in range(m):
            c.append(Gate("PhaseExp", (i,), num=(b * 2**i) % p, den=p))
    for i in range(m):
        c.append(Gate("PhaseExp", (i,), num=(a * 2 ** (2 * i)) % p, den=p))
    return c


def _as_label(x, size: int) -> int:
    if isinstance(x, GfElement):
        return x.int_label
    return int(x)


def build_mub_circuit_prime_power(p: int, n_qudits: int, a, b) -> Circuit:
    """Preparation circuit on n_qudits p-level systems for the prime-power MUB
    state with labels (a, b) in GF(p^n); a = p^n (or the sentinel) selects the
    computational branch.

    Layout: level shifts prepare |t_b>, a Fourier gate per qudit produces the
    phases w^tr(bx), then precomputed trace couplings inject w^tr(a x^2) with
    one two-qudit phase per pair and one quadratic level-phase per qudit.
    """
    if not is_prime(p) or p == 2:
        raise ValueError(f"p = {p} must be an odd prime")
    ctx = GfContext(p, n_qudits)
    d = ctx.order
    a_lab, b_lab = _as_label(a, d), _as_label(b, d)
    if not 0 <= a_lab <= d:
        raise ValueError(f"basis label {a_lab} outside 0..{d}")
    if not 0 <= b_lab < d:
        raise ValueError(f"state label {b_lab} outside 0..{d - 1}")
    c = Circuit(n=n_qudits, d=p)
    if a_lab == d:
        for i, coeff in enumerate(ctx.element_from_int(b_lab).coeffs):
            if coeff:
                c.append(Gate("Xd", (i,), num=coeff))
        return c
    t = ctx.trace_vector
    t_a = (t @ ctx.mul_matrix(ctx.element_from_int(a_lab))) % p
    t_b = (t @ ctx.mul_matrix(ctx.element_from_int(b_lab))) % p
    for i, coeff in enumerate(t_b):
        if coeff:
            c.append(Gate("Xd", (i,), num=int(coeff)))
    for i in range(n_qudits):
        c.append(Gate("Fp", (i,)))
    ta_of = lambda i, j: int(np.dot(t_a, ctx.monomial_vector(i + j)) % p)
    for i in range(n_qudits):
        for j in range(i + 1, n_qudits):
            c.append(Gate("CPhase", (i, j), num=(2 * ta_of(i, j)) % p, den=p))
    for i in range(n_qudits):
        coeff = ta_of(i, i)
        c.append(Gate("PhaseVec", (i,), den=p, phases=tuple((coeff * u * u) % p for u in range(p))))
    return c


@dataclass(frozen=True)
class AmplitudeSplit:
    """One state's decomposition against a good-subspace projector."""

    theta: float
    good_projector: np.ndarray = field(repr=False)


def amplitude_split(state: np.ndarray, good_projector: np.ndarray, tol: float = 1e-12) -> AmplitudeSplit:
    p_good = float(np.real(np.vdot(state, good_projector @ state)))
    if p_good <= tol:
        raise ValueError("good component vanishes: amplification is useless")
    if p_good >= 1 - tol:
        raise ValueError("good component saturates: amplification is not necessary")
    return AmplitudeSplit(theta=math.asin(math.sqrt(p_good)), good_projector=good_projector)


def amplitude_amplify(prep: Circuit, good_projector: np.ndarray, rounds: int) -> np.ndarray:
    """Apply `rounds` amplification operators to prep|0>.

    Each round reflects about the bad axis (flip the sign of the good
    component) and then about prep|0> itself; after k rounds the good
    amplitude is sin((2k+1) theta) with sin(theta) = sqrt(p_good).
    """
    dim = prep.d**prep.n
    e0 = np.zeros(dim, dtype=complex)
    e0[0] = 1
    psi = simulate(prep, e0)
    amplitude_split(psi, good_projector)  # validates 0 < p_good < 1
    inv = prep.inverse()
    state = psi
    for _ in range(rounds):
        state = state - 2 * (good_projector @ state)  # fixes bad, negates good
        w = simulate(inv, state)
        w = 2 * w[0] * e0 - w  # fixes |0>, negates its complement
        state = simulate(prep, w)
    return state


def embedding_prime(n_qubits: int) -> int:
    """Smallest odd prime >= 2^n_qubits (it always lies below 2^(n_qubits+1))."""
    p = 2**n_qubits
    if p < 3:
        p = 3
    while not is_prime(p):
        p += 1
    return p


def projected_mub_prepare(n_qubits: int, a: int, b: int, ancilla_tol: float = 1e-6) -> np.ndarray:
    """Prepare the renormalized projection onto 2^n_qubits levels of a
    prime-dimension MUB state, via one exact amplitude-amplification round.

    Register: n_qubits data qubits, one embedding qubit (the MUB state lives
    on the first p of 2^(n_qubits+1) levels), one rotated ancilla.  The
    ancilla rotation scales the good amplitude to exactly cos(pi/3) = 1/2, so
    a single round lands the register on ancillas |00> up to rounding; a
    residual above `ancilla_tol` raises.

    The initial good amplitude is measured from the prepared state itself.
    For every non-computational (a, b) it equals sqrt(1/2): the efficient
    preparation leaves a flat superposition over the whole embedding register,
    and the levels at or above p carry the same per-level weight as the rest.
    The kept amplitudes are proportional to the closed-form state's, so the
    renormalized output is its exact projection either way.
    """
    p = embedding_prime(n_qubits)
    d = 2**n_qubits
    if not 0 <= a <= p:
        raise ValueError(f"basis label a = {a} outside 0..{p}")
    if not 0 <= b < p:
        raise ValueError(f"state label b = {b} outside 0..{p - 1}")
    prep = build_mub_circuit_prime(p, n_qubits, a, b)
    reg_dim = 2 ** (n_qubits + 1)
    e0 = np.zeros(reg_dim, dtype=complex)
    e0[0] = 1
    psi = simulate(prep, e0)  # on the n_qubits+1 register
    if a == p:
        if b >= d:
            raise ValueError(f"computational state {b} projects to zero on {n_qubits} qubits")
        return psi[:d].copy()

    cos_theta = float(np.linalg.norm(psi[:d]))
    alpha = math.cos(math.pi / 3) / cos_theta
    if alpha > 1:
        raise ValueError("projection weight below 1/4: single-round amplification impossible")
    rot = np.array([[alpha, -math.sqrt(1 - alpha * alpha)], [math.sqrt(1 - alpha * alpha), alpha]])

    inv = prep.inverse()
    n_all = n_qubits + 2

    def apply_a(v: np.ndarray) -> np.ndarray:
        rows = v.reshape(2, reg_dim)
        rows = np.stack([simulate(prep, rows[0]), simulate(prep, rows[1])])
        return apply_local(rows.reshape(-1), rot.astype(complex), (n_all - 1,), n_all, 2)

    def apply_a_dag(v: np.ndarray) -> np.ndarray:
        v = apply_local(v, rot.T.astype(complex), (n_all - 1,), n_all, 2)
        rows = v.reshape(2, reg_dim)
        return np.stack([simulate(inv, rows[0]), simulate(inv, rows[1])]).reshape(-1)

    full0 = np.zeros(2 * reg_dim, dtype=complex)
    full0[0] = 1
    state = apply_a(full0)
    # good subspace: both ancillas |0>, i.e. index < 2^n_qubits
    state[:d] *= -1
    w = apply_a_dag(state)
    w = 2 * w[0] * full0 - w
    state = apply_a(w)

    good = state[:d]
    residual = math.sqrt(max(0.0, 1 - float(np.linalg.norm(good)) ** 2))
    if residual > ancilla_tol:
        raise RuntimeError(f"ancillas failed to return to |00>: residual {residual:.2e}")
    return good / np.linalg.norm(good)


def parallel_prefix_parity(n: int, controls, target: int) -> Circuit:
    """CNOT-only circuit XORing the parity of `controls` onto `target`,
    restoring every other qubit: a binary fan-in tree, one root CNOT, and the
    mirrored tree to uncompute.  Depth 2*ceil(log2 r) + 1 with 2r - 1 gates
    for r controls."""
    controls = list(controls)
    if target in controls:
        raise ValueError("target must not be one of the controls")
    if len(set(controls)) != len(controls):
        raise ValueError("duplicate control")
    c = Circuit(n=n, d=2)
    levels = []
    cur = controls
    while len(cur) > 1:
        nxt, lv = [], []
        for i in range(0, len(cur) - 1, 2):
            lv.append((cur[i + 1], cur[i]))
            nxt.append(cur[i])
        if len(cur) % 2 == 1:
            nxt.append(cur[-1])
        levels.append(lv)
        cur = nxt
    for lv in levels:
        for src, dst in lv:
            c.append(Gate("CNOT", (dst,), (src,)))
    if cur:
        c.append(Gate("CNOT", (target,), (cur[0],)))
    for lv in reversed(levels):
        for src, dst in lv:
            c.append(Gate("CNOT", (dst,), (src,)))
    return c


def classical_parity_map(circuit: Circuit) -> np.ndarray:
    """The F_2-linear map of a CNOT-only circuit: returns M with
    bits_out = M @ bits_in mod 2 (row i gives output bit i)."""
    if any(g.kind != "CNOT" for g in circuit.gates):
        raise ValueError("classical map defined only for CNOT-only circuits")
    m = np.eye(circuit.n, dtype=np.int64)
    for g in circuit.gates:
        m[g.targets[0]] = (m[g.targets[0]] + m[g.controls[0]]) % 2
    return m


class CircuitParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _fmt_indices(ix: tuple[int, ...]) -> str:
    return ",".join(str(i) for i in ix)


def emit_circuit(circuit: Circuit) -> str:
    """Text form: header `CIRCUIT n=<n> d=<d>`, then one `GATE ...` line per gate."""
    lines = [f"CIRCUIT n={circuit.n} d={circuit.d}"]
    for g in circuit.gates:
        if g.kind == "PhaseVec":
            param = f"{','.join(str(x) for x in g.phases)}/{g.den}"
        else:
            param = f"{g.num}/{g.den}"
        lines.append(
            f"GATE {g.kind} targets={_fmt_indices(g.targets)} "
            f"controls={_fmt_indices(g.controls)} param={param}"
        )
    return "\n".join(lines) + "\n"


def _parse_indices(text: str, line_no: int) -> tuple[int, ...]:
    if not text:
        return ()
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise CircuitParseError(line_no, f"bad index list {text!r}") from None


def parse_circuit(text: str) -> Circuit:
    lines = [ln for ln in text.splitlines()]
    if not lines or not lines[0].startswith("CIRCUIT "):
        raise CircuitParseError(1, "missing CIRCUIT header")
    head = dict(tok.split("=", 1) for tok in lines[0].split()[1:] if "=" in tok)
    try:
        circuit = Circuit(n=int(head["n"]), d=int(head["d"]))
    except (KeyError, ValueError):
        raise CircuitParseError(1, f"bad CIRCUIT header {lines[0]!r}") from None
    for line_no, ln in enumerate(lines[1:], start=2):
        if not ln.strip():
            continue
        parts = ln.split()
        if parts[0] != "GATE" or len(parts) != 5:
            raise CircuitParseError(line_no, f"expected `GATE <kind> targets=.. controls=.. param=..`, got {ln!r}")
        kind = parts[1]
        fields = {}
        for tok in parts[2:]:
            if "=" not in tok:
                raise CircuitParseError(line_no, f"bad field {tok!r}")
            key, val = tok.split("=", 1)
            fields[key] = val
        if set(fields) != {"targets", "controls", "param"}:
            raise CircuitParseError(line_no, f"fields must be targets/controls/param, got {sorted(fields)}")
        targets = _parse_indices(fields["targets"], line_no)
        controls = _parse_indices(fields["controls"], line_no)
        param = fields["param"]
        if "/" not in param:
            raise CircuitParseError(line_no, f"param {param!r} is not <num>/<den>")
        num_part, den_part = param.rsplit("/", 1)
        try:
            den = int(den_part)
            if kind == "PhaseVec":
                phases = tuple(int(t) for t in num_part.split(","))
                gate = Gate(kind, targets, controls, den=den, phases=phases)
            else:
                gate = Gate(kind, targets, controls, num=int(num_part), den=den)
        except ValueError:
            raise CircuitParseError(line_no, f"bad param {param!r}") from None
        try:
            circuit.append(gate)
        except ValueError as exc:
            raise CircuitParseError(line_no, str(exc)) from None
    return circuit
