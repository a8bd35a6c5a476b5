"""Filter specifications and the drivers that run them over signals."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from ..analytics import canonical_filter
from . import _kernels
from .streaming import BoxcarState, HalfBoxState, LinearBayesState, WonhamState, box_length

__all__ = ["FilterSpec", "FilterRun", "run_filter", "run_batch", "BOX_FILTERS", "CONTINUOUS_FILTERS"]

BOX_FILTERS = ("boxcar", "halfbox", "double")
CONTINUOUS_FILTERS = ("bayes", "wonham")


@dataclass(frozen=True)
class FilterSpec:
    """Which filter to run and with what parameters.

    ``dt_box`` is in units of tau.  ``mu_est`` is the flip rate assumed by the
    continuous filters; ``None`` means use the simulated rate.
    """

    name: str
    dt_box: float | None = None
    a: float = 0.0
    mu_est: float | None = None
    wonham_mode: str = "linear"

    def __post_init__(self):
        name = canonical_filter(self.name)
        if name == "projective-ideal":
            raise ValueError("the projective reference is not a signal filter")
        object.__setattr__(self, "name", name)
        if name in BOX_FILTERS:
            if self.dt_box is None or not self.dt_box > 0:
                raise ValueError(f"{name} filter needs a positive dt_box, got {self.dt_box}")
        if name == "double" and not 0.0 <= self.a < 1.0:
            raise ValueError(f"threshold a must lie in [0, 1), got {self.a}")
        if name != "double" and self.a != 0.0:
            raise ValueError("threshold a only applies to the double filter")

    @property
    def is_box(self) -> bool:
        return self.name in BOX_FILTERS

    def steps_per_box(self, dt: float, tau: float = 1.0) -> int:
        """Box length in steps after rounding down, warning when Δt moves by more than 1%."""
        if not self.is_box:
            raise ValueError(f"{self.name} has no box")
        target = self.dt_box * tau
        if self.name == "halfbox":
            n = 2 * box_length(target, dt, half=True)
        else:
            n = box_length(target, dt)
        if abs(n * dt - target) > 0.01 * target:
            warnings.warn(f"box length rounded from {target:g} to {n * dt:g}", RuntimeWarning, stacklevel=2)
        return n

    def with_mu(self, mu: float) -> "FilterSpec":
        return self if self.mu_est is not None else replace(self, mu_est=mu)


@dataclass
class FilterRun:
    """Per-step encoding estimates for one trial."""

    estimates: np.ndarray
    spec: FilterSpec
    verdict_steps: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    n_rewrites: int = 0

    @property
    def final(self) -> int:
        return int(self.estimates[-1])


def _check_horizon(spec, n_steps, dt, tau):
    if spec.is_box and not spec.dt_box * tau <= n_steps * dt * (1 + 1e-12):
        raise ValueError(f"dt_box={spec.dt_box} exceeds the trial length {n_steps * dt / tau:g}")


def run_filter(spec: FilterSpec, signals, *, mu: float, tau: float = 1.0, dt: float = 0.1) -> FilterRun:
    """Stream one trial's signals through the pure-Python filter state."""
    sig = np.asarray(signals.as_array() if hasattr(signals, "as_array") else signals, dtype=float)
    if sig.ndim != 2 or sig.shape[0] != 2:
        raise ValueError("signals must have shape (2, N)")
    n = sig.shape[1]
    _check_horizon(spec, n, dt, tau)
    mu_est = mu if spec.mu_est is None else spec.mu_est
    est = np.empty(n, dtype=np.int8)
    verdicts = []
    rewrites = 0
    if spec.name == "bayes":
        st = LinearBayesState(mu_est, tau, dt)
        for j in range(n):
            est[j] = st.step(sig[0, j], sig[1, j])
    elif spec.name == "wonham":
        st = WonhamState(mu_est, tau, dt, mode=spec.wonham_mode)
        for j in range(n):
            est[j] = st.step(sig[0, j], sig[1, j])
    else:
        L = spec.steps_per_box(dt, tau)
        st = HalfBoxState(L // 2) if spec.name == "halfbox" else BoxcarState(L, spec.a)
        for j in range(n):
            v = st.step(sig[0, j], sig[1, j])
            if v is not None:
                if v.rewritten:
                    est[verdicts[-1]:j] = v.after
                    rewrites += 1
                verdicts.append(j)
            est[j] = st.estimate
    return FilterRun(est, spec, np.asarray(verdicts, dtype=np.int64), rewrites)


def run_batch(spec: FilterSpec, sig: np.ndarray, *, mu: float, tau: float = 1.0, dt: float = 0.1):
    """Compiled filter over a batch of signals (B, 2, N); returns int8 estimates (B, N)."""
    sig = np.ascontiguousarray(sig, dtype=np.float64)
    if sig.ndim != 3 or sig.shape[1] != 2:
        raise ValueError("signals must have shape (n_trials, 2, N)")
    if not np.all(np.isfinite(sig)):
        raise ValueError("signals contain non-finite samples")
    _check_horizon(spec, sig.shape[2], dt, tau)
    mu_est = mu if spec.mu_est is None else spec.mu_est
    if spec.name == "bayes":
        return _kernels.bayes_batch(sig, mu_est, tau, dt)
    if spec.name == "wonham":
        if spec.wonham_mode == "sde":
            return np.stack([run_filter(spec, s, mu=mu, tau=tau, dt=dt).estimates for s in sig])
        return _kernels.wonham_batch(sig, mu_est, tau, dt, spec.wonham_mode)[0]
    L = spec.steps_per_box(dt, tau)
    if spec.name == "halfbox":
        return _kernels.halfbox_batch(sig, L // 2)[0]
    return _kernels.boxcar_batch(sig, L, spec.a)

