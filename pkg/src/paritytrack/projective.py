"""Reference simulator with perfect projective syndrome reads at a fixed cycle.

Each qubit flips as a Poisson process.  At the end of every cycle the exact
parities of the true state are read and decoded, so only two or more flips
inside one cycle can fool the decoder.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytics import GATE_TIME
from .code import NEIGHBORS, PARITIES, decode_syndrome
from .ensemble import N_GROUPS, FidelityCurve
from .trajectory import block_rng

__all__ = ["ProjectiveConfig", "ProjectiveResult", "run_idealized", "DECODE_TABLE"]

# DECODE_TABLE[estimate, true] = estimate after reading the true parities
DECODE_TABLE = np.array(
    [[decode_syndrome(e, tuple(int(s) for s in PARITIES[k])).index for k in range(8)] for e in range(8)],
    dtype=np.int8,
)


@dataclass(frozen=True)
class ProjectiveConfig:
    mu: float
    tau: float = 1.0
    cycle: float = GATE_TIME
    n_cycles: int = 250
    seed: int = 0

    def __post_init__(self):
        if not self.mu >= 0:
            raise ValueError("flip rate must be non-negative")
        if not self.cycle > 0 or not self.tau > 0:
            raise ValueError("cycle and tau must be positive")
        if self.n_cycles < 1:
            raise ValueError("n_cycles must be positive")


@dataclass
class ProjectiveResult:
    """Fidelity after each read plus flip-count instrumentation of decoder failures."""

    curve: FidelityCurve
    failure_events: int
    failures_with_fewer_than_two_flips: int
    single_flip_cycles: int
    single_flip_uncorrected: int


def _apply_flips(codes, toggles):
    # toggles: (B, 3) parities of flip counts per qubit
    out = codes.copy()
    for b in range(3):
        m = toggles[:, b].astype(bool)
        out[m] = NEIGHBORS[out[m], b]
    return out


def run_idealized(config: ProjectiveConfig, n_trials: int, *, workers: int = 1, block_size: int = 4096) -> ProjectiveResult:
    """Simulate perfect syndrome reads every ``config.cycle``.

    The fidelity bit at each read compares the decoded estimate with the true
    encoding just after the read.  A failure event is a read at which the
    estimate goes from right to wrong or back; each one is checked against the
    number of flips in the cycle that preceded it.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be positive")
    lam = config.mu * config.cycle
    K = config.n_cycles
    n_blocks = -(-n_trials // block_size)

    def block(bi):
        size = min(block_size, n_trials - bi * block_size)
        rng = block_rng(config.seed, bi)
        counts = rng.poisson(lam, size=(K, size, 3)) if lam > 0 else np.zeros((K, size, 3), dtype=np.int64)
        true = np.zeros(size, dtype=np.int8)
        est = np.zeros(size, dtype=np.int8)
        ok_prev = np.ones(size, dtype=bool)
        succ = np.zeros(K, dtype=np.int64)
        events = bad = singles = singles_bad = 0
        for k in range(K):
            c = counts[k]
            true = _apply_flips(true, c & 1)
            est = DECODE_TABLE[est, true]
            ok = est == true
            succ[k] = ok.sum()
            total = c.sum(axis=1)
            changed = ok != ok_prev
            events += int(changed.sum())
            bad += int((changed & (total < 2)).sum())
            lone = total == 1
            singles += int(lone.sum())
            singles_bad += int((lone & ok_prev & ~ok).sum())
            ok_prev = ok
        return succ, size, events, bad, singles, singles_bad

    if workers == 1:
        parts = [block(b) for b in range(n_blocks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(block, range(n_blocks)))
    counts = np.array([p[0] for p in parts], dtype=np.int64)
    sizes = np.array([p[1] for p in parts], dtype=np.int64)
    G = min(N_GROUPS, n_blocks)
    gid = np.arange(n_blocks) % G
    gsucc = np.zeros((G, K + 1), dtype=np.int64)
    gtrials = np.bincount(gid, weights=sizes, minlength=G).astype(np.int64)
    np.add.at(gsucc[:, 1:], gid, counts)
    gsucc[:, 0] = gtrials
    times = np.arange(K + 1) * (config.cycle / config.tau)
    succ = np.concatenate([[n_trials], counts.sum(axis=0)])
    curve = FidelityCurve(times, succ, n_trials, gsucc, gtrials, "projective")
    return ProjectiveResult(
        curve,
        sum(p[2] for p in parts),
        sum(p[3] for p in parts),
        sum(p[4] for p in parts),
        sum(p[5] for p in parts),
    )


# a perfect read of a lone flip always restores the estimate
assert all(
    DECODE_TABLE[e, NEIGHBORS[e, b]] == NEIGHBORS[e, b] for e in range(8) for b in range(3)
), "decoder table inconsistent"
