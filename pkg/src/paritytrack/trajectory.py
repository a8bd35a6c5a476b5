"""Hidden-Markov flip trajectories and noisy continuous parity signals.

Time is discretized into steps of ``dt``.  Column ``j`` of a trajectory holds
the true bits during step ``j``; the signal sample ``j`` is the parity readout
averaged over that step, ``r = -2 x + xi`` with ``x`` the XOR of neighbouring
bits and ``xi ~ N(1, tau/dt)``.

Flip times follow the exponential wait-time recipe: each qubit draws waits
``floor(n)`` with ``n`` exponential of mean ``1/(mu dt)`` steps.  The k-th flip
of a qubit takes effect at the start of step ``1 + sum of the first k waits``,
so column 0 is always the initial state 000.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .code import _PACKED_TO_INDEX, PARITIES, index_from_bits

__all__ = [
    "SimConfig",
    "BitTrajectory",
    "SignalPair",
    "block_rng",
    "sample_flip_steps",
    "sample_flip_steps_batch",
    "bits_from_flips",
    "generate_trajectory",
    "generate_batch",
    "synthesize_signals",
    "synthesize_batch",
    "dump_csv",
]

_XOR12 = np.array([0, 1, 1, 0, 0, 1, 1, 0], dtype=np.int8)  # parity bit of Z1Z2 per encoding
_XOR23 = np.array([0, 0, 1, 1, 1, 1, 0, 0], dtype=np.int8)


@dataclass(frozen=True)
class SimConfig:
    """Simulation parameters; ``dt`` defaults to tau/10."""

    mu: float
    tau: float = 1.0
    dt: float | None = None
    n_steps: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.dt is None:
            object.__setattr__(self, "dt", self.tau / 10.0)
        if not self.mu >= 0:
            raise ValueError(f"flip rate must be non-negative, got {self.mu}")
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if not 0 < self.dt <= self.tau:
            raise ValueError(f"dt must be in (0, tau], got {self.dt}")
        if not self.mu * self.dt < 0.1:
            raise ValueError(f"mu*dt={self.mu * self.dt:g} is too large for per-step flips")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ValueError(f"n_steps must be a positive integer, got {self.n_steps}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def mutau(self) -> float:
        return self.mu * self.tau

    @property
    def times(self) -> np.ndarray:
        """End time of each step, in units of tau."""
        return (np.arange(self.n_steps) + 1) * (self.dt / self.tau)


@dataclass
class BitTrajectory:
    bits: np.ndarray  # (3, N) uint8
    config: SimConfig

    @property
    def codes(self) -> np.ndarray:
        """Encoding index at every step."""
        return index_from_bits(self.bits.T).astype(np.int8)

    @property
    def n_steps(self) -> int:
        return self.bits.shape[1]


@dataclass
class SignalPair:
    r12: np.ndarray
    r23: np.ndarray
    config: SimConfig | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.r12.shape != self.r23.shape:
            raise ValueError("signal channels must have equal length")

    def __len__(self):
        return len(self.r12)

    def as_array(self) -> np.ndarray:
        return np.stack([self.r12, self.r23])


def block_rng(seed: int, block: int) -> np.random.Generator:
    """Independent generator for one block of trials.

    Streams are keyed on (seed, block index) only, so results do not depend on
    how blocks are scheduled across workers.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(int(block),))))


def _n_draws(mu, dt, n_steps):
    lam = mu * dt * n_steps
    return max(4, int(lam + 6.0 * math.sqrt(lam) + 4))


def sample_flip_steps_batch(mu, dt, n_steps, n_trials, rng) -> np.ndarray:
    """Flip steps for a batch of trials, shape (n_trials, 3, K).

    Entries ``>= n_steps`` mark flips beyond the horizon and are ignored.
    """
    if mu == 0:
        return np.full((n_trials, 3, 0), n_steps, dtype=np.int64)
    mean_wait = 1.0 / (mu * dt)
    k = _n_draws(mu, dt, n_steps)
    waits = np.floor(rng.exponential(mean_wait, size=(n_trials, 3, k))).astype(np.int64)
    steps = 1 + np.cumsum(waits, axis=-1)
    while True:
        short = steps[..., -1] < n_steps
        if not short.any():
            break
        extra = np.floor(rng.exponential(mean_wait, size=(n_trials, 3, k))).astype(np.int64)
        extra = steps[..., -1:] + np.cumsum(extra, axis=-1)
        # rows already past the horizon keep their padding beyond n_steps
        extra[~short] = n_steps
        steps = np.concatenate([steps, extra], axis=-1)
    return steps


def sample_flip_steps(mu, dt, n_steps, rng) -> list[np.ndarray]:
    """Sorted flip steps of each of the three qubits for one trial."""
    steps = sample_flip_steps_batch(mu, dt, n_steps, 1, rng)[0]
    return [s[s < n_steps] for s in steps]


def bits_from_flips(flip_steps: np.ndarray, n_steps: int) -> np.ndarray:
    """Toggle bits at the given steps; returns uint8 bits of shape (..., 3, n_steps)."""
    lead = flip_steps.shape[:-1]
    toggles = np.zeros(lead + (n_steps + 1,), dtype=np.uint8)
    idx = np.minimum(flip_steps, n_steps)
    flat = toggles.reshape(-1, n_steps + 1)
    rows = np.repeat(np.arange(flat.shape[0]), flip_steps.shape[-1])
    np.add.at(flat, (rows, idx.reshape(-1)), 1)
    flat &= 1
    return np.bitwise_xor.accumulate(toggles, axis=-1)[..., :n_steps]


def generate_batch(config: SimConfig, n_trials: int, rng) -> np.ndarray:
    """True encodings for ``n_trials`` trajectories, int8 array (n_trials, N)."""
    flips = sample_flip_steps_batch(config.mu, config.dt, config.n_steps, n_trials, rng)
    bits = bits_from_flips(flips, config.n_steps)
    packed = (bits[:, 0] << 2) | (bits[:, 1] << 1) | bits[:, 2]
    return _PACKED_TO_INDEX[packed]


def generate_trajectory(config: SimConfig, rng=None) -> BitTrajectory:
    """Sample one true bit trajectory starting from 000."""
    if rng is None:
        rng = block_rng(config.seed, 0)
    flips = sample_flip_steps_batch(config.mu, config.dt, config.n_steps, 1, rng)[0]
    return BitTrajectory(bits_from_flips(flips, config.n_steps), config)


def synthesize_batch(codes: np.ndarray, config: SimConfig, rng) -> np.ndarray:
    """Noisy parity signals for a batch of encoding paths, shape (n_trials, 2, N)."""
    sigma = math.sqrt(config.tau / config.dt)
    out = rng.standard_normal(size=(codes.shape[0], 2, codes.shape[1]))
    out *= sigma
    out += 1.0
    out[:, 0] -= 2.0 * _XOR12[codes]
    out[:, 1] -= 2.0 * _XOR23[codes]
    return out


def synthesize_signals(traj: BitTrajectory, rng=None) -> SignalPair:
    """Noisy readouts r12, r23 for one trajectory."""
    cfg = traj.config
    if rng is None:
        rng = block_rng(cfg.seed, 1)
    sig = synthesize_batch(traj.codes[None, :], cfg, rng)[0]
    return SignalPair(sig[0], sig[1], cfg)


def dump_csv(path, traj: BitTrajectory, signals: SignalPair):
    """Write step, t, b1, b2, b3, r12, r23 rows for debugging."""
    cfg = traj.config
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "t", "b1", "b2", "b3", "r12", "r23"])
        for j in range(traj.n_steps):
            b = traj.bits[:, j]
            w.writerow([j, repr(float(j * cfg.dt)), int(b[0]), int(b[1]), int(b[2]),
                        repr(float(signals.r12[j])), repr(float(signals.r23[j]))])


# parity sign check: noiseless part of r_ij equals the encoding's parity eigenvalue
assert np.array_equal(1 - 2 * _XOR12, PARITIES[:, 0]) and np.array_equal(1 - 2 * _XOR23, PARITIES[:, 1])
