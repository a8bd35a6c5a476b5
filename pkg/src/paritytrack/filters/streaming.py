"""Single-trial streaming filters.

These are the readable reference implementations.  Each state object consumes
one signal sample pair at a time and exposes the current encoding estimate.
The batch kernels in ``_kernels`` reproduce them step for step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..code import NEIGHBORS, PARITIES, markov_matrix

__all__ = [
    "RENORM_HIGH",
    "RENORM_LOW",
    "RENORM_EVERY",
    "LinearBayesState",
    "WonhamState",
    "BoxcarState",
    "HalfBoxState",
    "Verdict",
    "box_length",
]

RENORM_HIGH = 1e100
RENORM_LOW = 1e-100
RENORM_EVERY = 10_000

_S12 = PARITIES[:, 0].astype(float)
_S23 = PARITIES[:, 1].astype(float)


def _check_sample(r12, r23):
    if not (math.isfinite(r12) and math.isfinite(r23)):
        raise ValueError(f"non-finite signal sample ({r12}, {r23})")


def _seqsum(x) -> float:
    # left-to-right sum, matching the compiled kernels bit for bit
    tot = 0.0
    for v in x:
        tot += v
    return tot


def _argmax_low(x) -> int:
    # np.argmax already returns the first maximal index
    return int(np.argmax(x))


def box_length(dt_box: float, dt: float, *, half: bool = False) -> int:
    """Number of steps per box (or per half box), rounded down."""
    denom = 2.0 * dt if half else dt
    n = int(math.floor(dt_box / denom + 1e-9))
    if n < 1:
        raise ValueError(f"box duration {dt_box} shorter than {'two steps' if half else 'one step'} of {dt}")
    return n


@dataclass
class LinearBayesState:
    """Unnormalized Bayesian filter with max-gauge regularization."""

    mu_est: float
    tau: float = 1.0
    dt: float = 0.1
    sigma: np.ndarray = field(default_factory=lambda: np.eye(8)[0].copy())
    steps_since_renorm: int = 0

    def __post_init__(self):
        self.sigma = np.asarray(self.sigma, dtype=float).copy()
        if self.sigma.shape != (8,) or np.any(self.sigma < 0) or not np.any(self.sigma > 0):
            raise ValueError("sigma must be 8 non-negative weights, not all zero")

    def step(self, r12: float, r23: float) -> int:
        _check_sample(r12, r23)
        c = self.dt / self.tau
        m = c * (abs(r12) + abs(r23))
        s = self.sigma
        w = np.empty(8)
        for k in range(8):
            w[k] = math.exp(c * (r12 * _S12[k] + r23 * _S23[k]) - m) * s[k]
        md = self.mu_est * self.dt
        new = np.empty(8)
        for k in range(8):
            n = NEIGHBORS[k]
            new[k] = w[k] + md * (w[n[0]] + w[n[1]] + w[n[2]])
        self.steps_since_renorm += 1
        top = new.max()
        if top > RENORM_HIGH or top < RENORM_LOW or self.steps_since_renorm >= RENORM_EVERY:
            new = new / top
            self.steps_since_renorm = 0
        self.sigma = new
        return self.estimate

    @property
    def estimate(self) -> int:
        return _argmax_low(self.sigma)

    @property
    def probabilities(self) -> np.ndarray:
        return self.sigma / self.sigma.sum()


@dataclass
class WonhamState:
    """Normalized Bayesian filter on the probability simplex.

    ``mode`` selects the drift discretization:

    * ``"linear"`` applies the off-diagonal generator then renormalizes, the
      normalized twin of :class:`LinearBayesState` (default).
    * ``"full"`` applies a forward Euler step with the full generator.
    * ``"sde"`` integrates the nonlinear filtering equation directly with
      forward Euler, clipping to the simplex.
    """

    mu_est: float
    tau: float = 1.0
    dt: float = 0.1
    p: np.ndarray = field(default_factory=lambda: np.eye(8)[0].copy())
    mode: str = "linear"

    def __post_init__(self):
        if self.mode not in ("linear", "full", "sde"):
            raise ValueError(f"unknown Wonham mode {self.mode!r}")
        self.p = np.asarray(self.p, dtype=float).copy()
        if self.p.shape != (8,) or np.any(self.p < 0) or abs(self.p.sum() - 1.0) > 1e-9:
            raise ValueError("p must be a probability vector of length 8")
        self._m = markov_matrix(self.mu_est) if self.mu_est > 0 else np.zeros((8, 8))

    def step(self, r12: float, r23: float) -> int:
        _check_sample(r12, r23)
        c = self.dt / self.tau
        p = self.p
        if self.mode == "sde":
            h = r12 * _S12 + r23 * _S23
            p = p + self.dt * (self._m @ p) + c * p * (h - p @ h)
            p = np.clip(p, 0.0, None)
            self.p = p / p.sum()
            return self.estimate
        m = c * (abs(r12) + abs(r23))
        w = np.empty(8)
        for k in range(8):
            w[k] = math.exp(c * (r12 * _S12[k] + r23 * _S23[k]) - m) * p[k]
        w /= _seqsum(w)
        md = self.mu_est * self.dt
        new = np.empty(8)
        diag = 1.0 - 3.0 * md if self.mode == "full" else 1.0
        for k in range(8):
            n = NEIGHBORS[k]
            new[k] = diag * w[k] + md * (w[n[0]] + w[n[1]] + w[n[2]])
        self.p = new / _seqsum(new)
        return self.estimate

    @property
    def estimate(self) -> int:
        return _argmax_low(self.p)


@dataclass(frozen=True)
class Verdict:
    """Outcome of one completed box: estimate before and after, and the bit flipped (0 for none)."""

    before: int
    after: int
    bit: int
    rewritten: bool = False


def _flip_from_means(est: int, m12: float, m23: float, a: float) -> int:
    # parity-corrected means; bit 2 wins when both fall below a
    c12 = m12 * PARITIES[est, 0]
    c23 = m23 * PARITIES[est, 1]
    if c12 < a and c23 < a:
        return 2
    if c12 < 0:
        return 1
    if c23 < 0:
        return 3
    return 0


@dataclass
class BoxcarState:
    """Boxcar average-and-threshold filter.

    With ``threshold_a > 0`` this is the double-threshold variant.
    """

    box_len_steps: int
    threshold_a: float = 0.0
    estimate: int = 0
    acc12: float = 0.0
    acc23: float = 0.0
    step_in_box: int = 0

    def __post_init__(self):
        if self.box_len_steps < 1:
            raise ValueError("box_len_steps must be at least 1")
        if not 0.0 <= self.threshold_a < 1.0:
            raise ValueError(f"threshold a must lie in [0, 1), got {self.threshold_a}")

    def step(self, r12: float, r23: float) -> Verdict | None:
        self.acc12 += r12
        self.acc23 += r23
        self.step_in_box += 1
        if self.step_in_box < self.box_len_steps:
            return None
        n = self.box_len_steps
        bit = _flip_from_means(self.estimate, self.acc12 / n, self.acc23 / n, self.threshold_a)
        before = self.estimate
        if bit:
            self.estimate = int(NEIGHBORS[before, bit - 1])
        self.acc12 = self.acc23 = 0.0
        self.step_in_box = 0
        return Verdict(before, self.estimate, bit)


@dataclass
class HalfBoxState:
    """Boxcar filter that re-checks a bit-1/bit-3 verdict pair on a half-shifted window.

    Keeps the last three half-box averages per channel.  When the previous box
    inferred a bit-1 (bit-3) flip and the current box infers bit 3 (bit 1), the
    window made of the previous box's second half and the current box's first
    half is tested against the estimate held before the first verdict.  If both
    parities disagree with it, the pair is relabelled as a single bit-2 flip in
    the previous box and no flip in the current one.
    """

    half_len_steps: int
    estimate: int = 0
    halves12: list = field(default_factory=list)
    halves23: list = field(default_factory=list)
    acc12: float = 0.0
    acc23: float = 0.0
    step_in_half: int = 0
    half_index: int = 0
    prev: Verdict | None = None

    def __post_init__(self):
        if self.half_len_steps < 1:
            raise ValueError("half_len_steps must be at least 1")

    @property
    def box_len_steps(self) -> int:
        return 2 * self.half_len_steps

    def step(self, r12: float, r23: float) -> Verdict | None:
        self.acc12 += r12
        self.acc23 += r23
        self.step_in_half += 1
        if self.step_in_half < self.half_len_steps:
            return None
        n = self.half_len_steps
        self.halves12 = (self.halves12 + [self.acc12 / n])[-3:]
        self.halves23 = (self.halves23 + [self.acc23 / n])[-3:]
        self.acc12 = self.acc23 = 0.0
        self.step_in_half = 0
        self.half_index += 1
        if self.half_index % 2:
            return None
        m12 = 0.5 * (self.halves12[-2] + self.halves12[-1])
        m23 = 0.5 * (self.halves23[-2] + self.halves23[-1])
        before = self.estimate
        bit = _flip_from_means(before, m12, m23, 0.0)
        after = int(NEIGHBORS[before, bit - 1]) if bit else before
        verdict = Verdict(before, after, bit)
        prev = self.prev
        if prev is not None and {prev.bit, bit} == {1, 3} and len(self.halves12) == 3:
            pre = prev.before
            w12 = 0.5 * (self.halves12[0] + self.halves12[1])
            w23 = 0.5 * (self.halves23[0] + self.halves23[1])
            if w12 * PARITIES[pre, 0] < 0 and w23 * PARITIES[pre, 1] < 0:
                after = int(NEIGHBORS[pre, 1])
                verdict = Verdict(after, after, 0, rewritten=True)
        self.estimate = after
        self.prev = verdict
        return verdict
