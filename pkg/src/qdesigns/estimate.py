"""Simulated average-fidelity estimation protocols.

All protocols factor the target unitary out of the channel first, so the
motion-reversal pair U U^dagger drops out and only the cumulative noise is
sampled.  Monte-Carlo runs are two-stage: the exact outcome probability of
each prepared state is computed once, then Bernoulli samples are drawn from
it -- statistically identical to per-shot measurement simulation and far
cheaper.  trials = 0 selects the deterministic average over every state.

Trials may be sharded across workers; each shard derives its own seed from
the experiment seed and the merge is order-fixed, so results depend only on
(seed, trials, workers).
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channels import (
    KrausChannel,
    avg_fidelity_exact,
    avg_from_entanglement,
    entanglement_fidelity,
)
from .circuits import Circuit, Gate, embedding_prime, projected_mub_prepare, simulate
from .linalg import hermitian_eig
from .mub import MubFamily, mub_prime
from .twirl import PauliLabel, pauli_matrix

__all__ = [
    "ExperimentConfig",
    "EstimateResult",
    "mub_mc_estimate",
    "projected_estimate",
    "ancilla_entanglement_estimate",
    "pauli_expectation",
    "run_protocol",
]

PROTOCOLS = ("mub_mc", "mub_exact", "projected", "ancilla")


@dataclass(frozen=True)
class ExperimentConfig:
    """One estimation experiment: the channel as implemented, the unitary it
    was meant to realize (identity for a plain channel), and sampling knobs."""

    channel: KrausChannel
    protocol: str = "mub_mc"
    trials: int = 0  # 0 = deterministic average over all states
    seed: int = 0
    target_unitary: np.ndarray | None = None
    workers: int = 1

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if self.trials < 0:
            raise ValueError("trials must be >= 0")
        if not self.channel.trace_preserving:
            raise ValueError("estimation requires a trace-preserving channel")

    def noise_channel(self) -> KrausChannel:
        if self.target_unitary is None:
            return self.channel
        return self.channel.compose_unitary_inverse(self.target_unitary)


@dataclass(frozen=True)
class EstimateResult:
    protocol: str
    d: int
    trials_used: int
    seed: int
    p_hat: float
    std_err: float
    exact: float
    fidelity: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "protocol": self.protocol,
                "d": self.d,
                "trials": self.trials_used,
                "seed": self.seed,
                "p_hat": self.p_hat,
                "std_err": self.std_err,
                "exact": self.exact,
                "fidelity": self.fidelity,
            },
            sort_keys=True,
        )


def _pure_outcome_probs(states: np.ndarray, kraus) -> np.ndarray:
    """<psi|E(|psi><psi|)|psi> = sum_k |<psi|A_k|psi>|^2 for stacked states."""
    vals = np.zeros(states.shape[0])
    for a in kraus:
        vals += np.abs(np.einsum("si,ij,sj->s", states.conj(), a, states)) ** 2
    return vals


def _shard_sizes(total: int, workers: int) -> list[int]:
    workers = max(1, min(workers, total)) if total else 1
    base, extra = divmod(total, workers)
    return [base + (1 if i < extra else 0) for i in range(workers)]


def _bernoulli_shards(
    probs: np.ndarray, weights: np.ndarray | None, trials: int, seed: int, workers: int
) -> tuple[float, float]:
    """Sample `trials` states uniformly, draw weighted Bernoulli outcomes, and
    return (mean, stderr of the mean); sharded deterministically by seed."""
    sizes = _shard_sizes(trials, workers)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))

    def run(args):
        size, ss = args
        rng = np.random.default_rng(ss)
        idx = rng.integers(0, probs.size, size=size)
        hits = (rng.random(size) < probs[idx]).astype(float)
        if weights is not None:
            hits *= weights[idx]
        return hits.sum(), (hits**2).sum()

    if len(sizes) == 1:
        parts = [run((sizes[0], seeds[0]))]
    else:
        with ThreadPoolExecutor(max_workers=len(sizes)) as pool:
            parts = list(pool.map(run, zip(sizes, seeds)))
    total = float(sum(p[0] for p in parts))
    total_sq = float(sum(p[1] for p in parts))
    mean = total / trials
    var = max(total_sq / trials - mean**2, 0.0)
    return mean, math.sqrt(var / trials)


def mub_mc_estimate(cfg: ExperimentConfig, family: MubFamily) -> EstimateResult:
    """Motion-reversal estimate over a complete MUB family.

    Each trial prepares a uniformly random family state, runs the noise, and
    measures back in the same basis; the success probability averaged over the
    d(d+1) states is exactly the average gate fidelity.
    """
    noise = cfg.noise_channel()
    d = noise.dim
    if family.d != d:
        raise ValueError(f"family dimension {family.d} != channel dimension {d}")
    states = family.all_states()
    probs = _pure_outcome_probs(states, noise.kraus)
    exact = avg_fidelity_exact(np.eye(d), noise)
    if cfg.trials == 0 or cfg.protocol == "mub_exact":
        p_hat = float(probs.mean())
        return EstimateResult(cfg.protocol, d, 0, cfg.seed, p_hat, 0.0, exact, p_hat)
    p_hat, std_err = _bernoulli_shards(probs, None, cfg.trials, cfg.seed, cfg.workers)
    return EstimateResult(cfg.protocol, d, cfg.trials, cfg.seed, p_hat, std_err, exact, p_hat)


def projected_estimate(cfg: ExperimentConfig) -> EstimateResult:
    """Prime-embedding variant for d = 2^N: states are the renormalized
    projections of the dimension-p MUB states prepared by the amplification
    circuit, outcomes weighted by the squared projection norm (so states that
    project to zero contribute weight zero), and the average rescaled by
    p(p+1)/(d(d+1))."""
    noise = cfg.noise_channel()
    d = noise.dim
    n_qubits = d.bit_length() - 1
    if 2**n_qubits != d:
        raise ValueError(f"projected protocol needs a power-of-two dimension, got {d}")
    p = embedding_prime(n_qubits)
    family = mub_prime(p)
    states, weights = [], []
    for a in range(p + 1):
        for b in range(p):
            w = float(np.linalg.norm(family.states[a, b][:d]) ** 2)
            if w < 1e-12:
                states.append(np.zeros(d, dtype=complex))
                weights.append(0.0)
            else:
                states.append(projected_mub_prepare(n_qubits, a, b))
                weights.append(w)
    states = np.array(states)
    weights = np.array(weights)
    probs = _pure_outcome_probs(states, noise.kraus)
    probs[weights == 0] = 1.0  # zero-projection states count as correct, with weight zero
    rescale = p * (p + 1) / (d * (d + 1))
    exact = avg_fidelity_exact(np.eye(d), noise)
    if cfg.trials == 0:
        p_tilde = float((weights**2 * probs).mean())
        return EstimateResult(cfg.protocol, d, 0, cfg.seed, p_tilde, 0.0, exact, p_tilde * rescale)
    p_tilde, err = _bernoulli_shards(probs, weights**2, cfg.trials, cfg.seed, cfg.workers)
    return EstimateResult(
        cfg.protocol, d, cfg.trials, cfg.seed, p_tilde, err, exact, p_tilde * rescale
    )


def _bell_prep(n: int) -> Circuit:
    """2n-qubit circuit |0> -> maximally entangled state: ancillas are the n
    high qubits, the channel register the n low qubits."""
    c = Circuit(2 * n, 2)
    for q in range(n):
        c.append(Gate("H", (n + q,)))
        c.append(Gate("CNOT", (q,), (n + q,)))
    return c


def ancilla_entanglement_estimate(cfg: ExperimentConfig) -> EstimateResult:
    """Entanglement-fidelity protocol: Bell pairs with n ancillas, noise on
    the data half, inverse preparation, probability of all-zeros = F_e; the
    fidelity field carries the converted F_avg = (d F_e + 1)/(d + 1)."""
    noise = cfg.noise_channel()
    d = noise.dim
    n = d.bit_length() - 1
    if 2**n != d or n > 5:
        raise ValueError(f"ancilla protocol needs d = 2^n with n <= 5, got {d}")
    prep = _bell_prep(n)
    inv = prep.inverse()
    dim = d * d
    phi = simulate(prep, np.eye(dim, dtype=complex)[0])
    p_zero = 0.0
    for a in noise.kraus:
        branch = (phi.reshape(d, d) @ a.T).reshape(-1)  # (I (x) A_k) |phi>
        p_zero += abs(simulate(inv, branch)[0]) ** 2
    exact = entanglement_fidelity(noise)
    f_avg = avg_from_entanglement(d, p_zero)
    if cfg.trials == 0:
        return EstimateResult(cfg.protocol, d, 0, cfg.seed, float(p_zero), 0.0, exact, f_avg)
    p_hat, err = _bernoulli_shards(
        np.array([p_zero]), None, cfg.trials, cfg.seed, cfg.workers
    )
    return EstimateResult(
        cfg.protocol, d, cfg.trials, cfg.seed, p_hat, err, exact, avg_from_entanglement(d, p_hat)
    )


def run_protocol(cfg: ExperimentConfig, family: MubFamily | None = None) -> EstimateResult:
    if cfg.protocol in ("mub_mc", "mub_exact"):
        if family is None:
            from .mub import family_for_dimension

            family = family_for_dimension(cfg.channel.dim)
        return mub_mc_estimate(cfg, family)
    if cfg.protocol == "projected":
        return projected_estimate(cfg)
    return ancilla_entanglement_estimate(cfg)


def pauli_expectation(
    rho: np.ndarray, label: PauliLabel, shots: int, rng: np.random.Generator
) -> tuple[float, float]:
    """Estimate tr(P rho) for the Hermitian representative of a qubit Pauli
    label by sampling +-1 outcomes from its spectral projectors."""
    if label.d != 2:
        raise ValueError("expectation sampling implemented for qubit labels")
    if shots < 1:
        raise ValueError("need at least one shot")
    n_y = sum(1 for a, b in zip(label.xa, label.xb) if a and b)
    herm = pauli_matrix(PauliLabel(2, label.n, label.xa, label.xb)) * (1j**n_y)
    w, v = hermitian_eig(herm)
    plus = v[:, w > 0]
    p_plus = float(np.real(np.einsum("ik,ij,jk->", plus.conj(), rho, plus)))
    p_plus = min(max(p_plus, 0.0), 1.0)
    outcomes = np.where(rng.random(shots) < p_plus, 1.0, -1.0)
    mean = float(outcomes.mean())
    stderr = math.sqrt(max(1 - mean**2, 0.0) / shots)
    return mean, stderr
