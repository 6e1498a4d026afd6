"""Complete sets of d+1 mutually-unbiased bases and their 2-design identities.

Three constructions are provided: odd prime dimension (quadratic Gauss-sum
phases), odd prime power dimension (field-trace phases over GF(p^k)) and
qubit dimension 2^n (Galois-ring phases over GR(4^n)).  Basis index a runs
over 0..d with a = d reserved for the computational basis.  For the Galois
ring family, a and b enumerate the Teichmuller set in its natural order
(0, 1, X, X^2, ...).

Global phases of individual states follow the defining formulas verbatim;
every verification here is phase-insensitive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .finite_algebra import GfContext, GrContext, I_POWERS, is_prime

__all__ = [
    "MubFamily",
    "VerifyReport",
    "mub_prime",
    "mub_prime_power",
    "mub_galois_ring",
    "family_for_dimension",
    "verify_unbiased",
    "state_design_sum",
    "haar_moment",
    "haar_moment_mc",
    "t_design_angle_check",
    "export_family",
    "load_family",
]

PRIME_CAP = 127
PRIME_POWER_CAP = 128
QUBIT_CAP = 7


@dataclass(frozen=True)
class MubFamily:
    """d+1 orthonormal bases of dimension d; states[a, b] is the b-th state
    of basis a, and basis a = d is computational."""

    d: int
    kind: str  # "prime" | "prime_power" | "galois_ring"
    states: np.ndarray  # shape (d+1, d, d), complex

    def state(self, a: int, b: int) -> np.ndarray:
        return self.states[a, b]

    def all_states(self) -> np.ndarray:
        """All d(d+1) states stacked into a ((d+1)*d, d) array."""
        return self.states.reshape(-1, self.d)


def mub_prime(p: int) -> MubFamily:
    """States (1/sqrt p) sum_x w_p^(a x^2 + b x)|x> for a, b in F_p, plus the
    computational basis.  Requires an odd prime: the quadratic character-sum
    bound underlying unbiasedness fails in characteristic 2."""
    if p == 2 or not is_prime(p):
        raise ValueError(f"p = {p} must be an odd prime (qubit families come from mub_galois_ring)")
    if p > PRIME_CAP:
        raise ValueError(f"p = {p} exceeds the supported cap {PRIME_CAP}")
    x = np.arange(p)
    states = np.empty((p + 1, p, p), dtype=complex)
    omega = np.exp(2j * np.pi / p)
    for a in range(p):
        for b in range(p):
            states[a, b] = omega ** ((a * x * x + b * x) % p) / math.sqrt(p)
    states[p] = np.eye(p)
    return MubFamily(d=p, kind="prime", states=states)


def mub_prime_power(p: int, k: int) -> MubFamily:
    """States (1/sqrt d) sum_x w_p^tr(a x^2 + b x)|x> over GF(p^k), plus the
    computational basis.  Field elements are ordered by their base-p integer
    label, least-significant coefficient first."""
    if p == 2 or not is_prime(p):
        raise ValueError(f"p = {p} must be an odd prime")
    if k < 1 or p**k > PRIME_POWER_CAP:
        raise ValueError(f"p^k = {p**k} outside the supported range (k >= 1, p^k <= {PRIME_POWER_CAP})")
    ctx = GfContext(p, k)
    d = p**k
    els = ctx.elements()
    squares = [e * e for e in els]
    omega = np.exp(2j * np.pi / p)
    states = np.empty((d + 1, d, d), dtype=complex)
    norm = 1 / math.sqrt(d)
    t = ctx.trace_vector
    for a_lab, a in enumerate(els):
        ta = (t @ ctx.mul_matrix(a)) % p
        for b_lab, b in enumerate(els):
            tb = (t @ ctx.mul_matrix(b)) % p
            amps = np.empty(d, dtype=complex)
            for x_lab in range(d):
                e = (ta @ squares[x_lab].coeffs + tb @ els[x_lab].coeffs) % p
                amps[x_lab] = omega**e
            states[a_lab, b_lab] = amps * norm
    states[d] = np.eye(d)
    return MubFamily(d=d, kind="prime_power", states=states)


def mub_galois_ring(n: int) -> MubFamily:
    """States (1/sqrt 2^n) sum_{x in T_n} i^tr((a+2b)x)|x> for a, b in the
    Teichmuller set of GR(4^n), plus the computational basis."""
    if not 1 <= n <= QUBIT_CAP:
        raise ValueError(f"qubit count n = {n} outside 1..{QUBIT_CAP}")
    ctx = GrContext(n)
    d = 2**n
    # tr((a+2b)x) = tr(ax) + 2 tr(bx) with ax, bx back in the Teichmuller set,
    # so all phases come from the trace on T and cyclic index arithmetic
    tr_t = np.array([ctx.trace(t) for t in ctx.teichmuller])
    mul = np.array([[ctx.teich_mul_index(i, j) for j in range(d)] for i in range(d)])
    states = np.empty((d + 1, d, d), dtype=complex)
    norm = 1 / math.sqrt(d)
    i_pow = np.array(I_POWERS)
    for ai in range(d):
        for bi in range(d):
            exps = (tr_t[mul[ai]] + 2 * tr_t[mul[bi]]) % 4
            states[ai, bi] = i_pow[exps] * norm
    states[d] = np.eye(d)
    return MubFamily(d=d, kind="galois_ring", states=states)


def family_for_dimension(d: int) -> MubFamily:
    """Dispatch on d: qubit construction for powers of two, prime construction
    for odd primes, field construction for odd prime powers."""
    if d >= 2 and d & (d - 1) == 0:
        return mub_galois_ring(d.bit_length() - 1)
    if is_prime(d):
        return mub_prime(d)
    for p in range(3, d, 2):
        if not is_prime(p):
            continue
        k = 1
        while p**k < d:
            k += 1
        if p**k == d:
            return mub_prime_power(p, k)
    raise ValueError(f"no MUB construction for dimension {d} (not a prime power)")


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    max_orthonormality_error: float
    max_unbiasedness_error: float
    worst_orthonormality_pair: tuple[tuple[int, int], tuple[int, int]]
    worst_unbiasedness_pair: tuple[tuple[int, int], tuple[int, int]]


def verify_unbiased(family: MubFamily, tol: float = 1e-9) -> VerifyReport:
    """Check every pairwise overlap: delta within a basis, modulus 1/sqrt(d)
    across bases.  Reports the worst offending (a, b) pairs."""
    d = family.d
    target = 1 / math.sqrt(d)
    max_orth, max_cross = 0.0, 0.0
    worst_orth = worst_cross = ((0, 0), (0, 0))
    for a1 in range(d + 1):
        b1 = family.states[a1]
        for a2 in range(a1, d + 1):
            g = np.abs(b1 @ family.states[a2].conj().T)
            if a1 == a2:
                err = np.abs(g - np.eye(d))
            else:
                err = np.abs(g - target)
            i, j = np.unravel_index(np.argmax(err), err.shape)
            e = float(err[i, j])
            if a1 == a2:
                if e > max_orth:
                    max_orth, worst_orth = e, ((a1, int(i)), (a2, int(j)))
            else:
                if e > max_cross:
                    max_cross, worst_cross = e, ((a1, int(i)), (a2, int(j)))
    return VerifyReport(
        ok=max_orth <= tol and max_cross <= tol,
        max_orthonormality_error=max_orth,
        max_unbiasedness_error=max_cross,
        worst_orthonormality_pair=worst_orth,
        worst_unbiasedness_pair=worst_cross,
    )


def state_design_sum(family: MubFamily, m: np.ndarray, n: np.ndarray) -> complex:
    """sum over all d(d+1) states of <psi|M|psi><psi|N|psi>.

    For a complete MUB family this equals tr(MN) + tr(M) tr(N) for arbitrary
    linear operators.
    """
    d = family.d
    m, n = np.asarray(m, dtype=complex), np.asarray(n, dtype=complex)
    if m.shape != (d, d) or n.shape != (d, d):
        raise ValueError(f"operators must be {d} x {d}")
    s = family.all_states()
    vm = np.einsum("si,ij,sj->s", s.conj(), m, s)
    vn = np.einsum("si,ij,sj->s", s.conj(), n, s)
    return complex(np.sum(vm * vn))


def haar_moment(m: np.ndarray, n: np.ndarray) -> complex:
    """Closed-form Fubini-Study average of <psi|M|psi><psi|N|psi>:
    (tr MN + tr M tr N) / (d (d+1))."""
    m, n = np.asarray(m, dtype=complex), np.asarray(n, dtype=complex)
    if m.shape != n.shape or m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("operators must be square and of equal dimension")
    d = m.shape[0]
    return complex(np.trace(m @ n) + np.trace(m) * np.trace(n)) / (d * (d + 1))


def haar_moment_mc(
    m: np.ndarray, n: np.ndarray, samples: int, rng: np.random.Generator
) -> tuple[complex, float]:
    """Monte-Carlo oracle for the Fubini-Study average: Gaussian vectors
    normalized to the sphere.  Returns (mean, standard error of the mean)."""
    m, n = np.asarray(m, dtype=complex), np.asarray(n, dtype=complex)
    d = m.shape[0]
    g = rng.standard_normal((samples, d)) + 1j * rng.standard_normal((samples, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    vals = np.einsum("si,ij,sj->s", g.conj(), m, g) * np.einsum("si,ij,sj->s", g.conj(), n, g)
    mean = complex(vals.mean())
    stderr = float(np.std(vals) / math.sqrt(samples))
    return mean, stderr


def t_design_angle_check(family: MubFamily, k: int) -> float:
    """(1/|X|^2) sum over state pairs of |<psi|phi>|^(2k); equals
    1/binom(d+k-1, k) when the family is a k-design."""
    if k not in (0, 1, 2):
        raise ValueError("k must be 0, 1, or 2")
    s = family.all_states()
    g2 = np.abs(s @ s.conj().T) ** 2
    return float(np.sum(g2**k) / s.shape[0] ** 2)


def export_family(family: MubFamily, path: str) -> None:
    """Text export: header line, then one line `a b re0 im0 re1 im1 ...` per state."""
    lines = [f"MUB d={family.d} kind={family.kind}"]
    for a in range(family.d + 1):
        for b in range(family.d):
            amps = family.states[a, b]
            nums = " ".join(f"{float(z.real)!r} {float(z.imag)!r}" for z in amps)
            lines.append(f"{a} {b} {nums}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_family(path: str) -> MubFamily:
    with open(path) as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    head = lines[0].split()
    if len(head) != 3 or head[0] != "MUB" or not head[1].startswith("d=") or not head[2].startswith("kind="):
        raise ValueError(f"bad MUB header: {lines[0]!r}")
    d = int(head[1][2:])
    kind = head[2][5:]
    states = np.zeros((d + 1, d, d), dtype=complex)
    if len(lines) != 1 + (d + 1) * d:
        raise ValueError(f"expected {(d + 1) * d} state lines, found {len(lines) - 1}")
    for ln in lines[1:]:
        parts = ln.split()
        a, b = int(parts[0]), int(parts[1])
        nums = [float(t) for t in parts[2:]]
        if len(nums) != 2 * d:
            raise ValueError(f"state line for (a={a}, b={b}) has {len(nums)} numbers, wanted {2 * d}")
        states[a, b] = np.array(nums[0::2]) + 1j * np.array(nums[1::2])
    return MubFamily(d=d, kind=kind, states=states)
