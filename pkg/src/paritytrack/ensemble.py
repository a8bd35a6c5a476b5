"""Trial ensembles, average fidelity curves and linear decay fits.

Trials are processed in fixed-size blocks.  Block ``b`` draws everything from
its own generator keyed on (seed, b), and each block contributes integer
success counts, so the result does not depend on the number of workers or the
order in which blocks finish.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .filters import FilterSpec, run_batch
from .filters._kernels import wonham_batch
from .trajectory import SimConfig, block_rng, generate_batch, synthesize_batch

__all__ = [
    "FidelityCurve",
    "LinearFit",
    "FitError",
    "run_ensemble",
    "fit_linear",
    "average_posterior",
    "default_horizon",
    "default_block_size",
    "record_steps",
    "response_time",
    "NO_TRACKING",
    "available_workers",
]

NO_TRACKING = "none"
RECORD_EVERY = 10
N_GROUPS = 16


class FitError(ValueError):
    pass


@dataclass
class FidelityCurve:
    """Average binary fidelity at recorded times (in units of tau)."""

    times: np.ndarray
    successes: np.ndarray
    n_trials: int
    group_successes: np.ndarray | None = field(default=None, repr=False)
    group_trials: np.ndarray | None = field(default=None, repr=False)
    label: str = ""

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.successes = np.asarray(self.successes, dtype=np.int64)
        if self.times.shape != self.successes.shape:
            raise ValueError("times and successes must align")
        if self.n_trials < 1:
            raise ValueError("a curve needs at least one trial")

    @property
    def f_mean(self) -> np.ndarray:
        return self.successes / self.n_trials

    @property
    def stderr(self) -> np.ndarray:
        f = self.f_mean
        return np.sqrt(f * (1.0 - f) / self.n_trials)

    def subset(self, keep: np.ndarray) -> "FidelityCurve":
        gs = None if self.group_successes is None else self.group_successes[:, keep]
        return FidelityCurve(self.times[keep], self.successes[keep], self.n_trials, gs, self.group_trials, self.label)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t_over_tau", "f_mean", "stderr", "n_trials"])
            for t, f, s in zip(self.times, self.f_mean, self.stderr):
                w.writerow([repr(float(t)), repr(float(f)), repr(float(s)), self.n_trials])

    @classmethod
    def from_csv(cls, path) -> "FidelityCurve":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        n = int(rows[0]["n_trials"])
        t = np.array([float(r["t_over_tau"]) for r in rows])
        s = np.rint(np.array([float(r["f_mean"]) for r in rows]) * n).astype(np.int64)
        return cls(t, s, n)


def default_block_size(n_steps: int) -> int:
    """Trials per block: a power of two keeping one block's signals near 32 MB."""
    b = 2 ** int(math.floor(math.log2(max(1, 2**21 // n_steps)))) if n_steps <= 2**21 else 1
    return int(min(512, max(16, b)))


def record_steps(spec, n_steps: int, dt: float, tau: float = 1.0, every: int = RECORD_EVERY) -> np.ndarray:
    """Steps whose estimates are scored: box boundaries or every ``every`` steps."""
    if isinstance(spec, FilterSpec) and spec.is_box:
        L = spec.steps_per_box(dt, tau)
        return np.arange(L - 1, n_steps, L, dtype=np.int64)
    return np.arange(every - 1, n_steps, every, dtype=np.int64)


def run_ensemble(
    spec,
    config: SimConfig,
    n_trials: int,
    *,
    workers: int = 1,
    block_size: int | None = None,
    record_every: int = RECORD_EVERY,
    n_groups: int = N_GROUPS,
) -> FidelityCurve:
    """Simulate ``n_trials`` trajectories, filter them and average the fidelity.

    Parameters
    ----------
    spec : FilterSpec or "none"
        Filter to run; "none" keeps the initial encoding as the estimate.
    config : SimConfig
        Flip rate, step size, horizon and master seed.
    n_trials : int
    workers : int
        Threads used for blocks; does not change the result.
    block_size : int, optional
        Trials per block, part of the random stream definition.  Defaults to
        ``default_block_size(config.n_steps)``.
    """
    if int(n_trials) != n_trials or n_trials < 1:
        raise ValueError(f"n_trials must be a positive integer, got {n_trials}")
    if workers < 1:
        raise ValueError("workers must be at least 1")
    n_trials = int(n_trials)
    if spec != NO_TRACKING and not isinstance(spec, FilterSpec):
        raise TypeError("spec must be a FilterSpec or 'none'")
    B = block_size or default_block_size(config.n_steps)
    rec = record_steps(spec, config.n_steps, config.dt, config.tau, record_every)
    n_blocks = -(-n_trials // B)

    def block(b):
        size = min(B, n_trials - b * B)
        rng = block_rng(config.seed, b)
        codes = generate_batch(config, size, rng)
        if spec == NO_TRACKING:
            est = np.zeros_like(codes)
        else:
            sig = synthesize_batch(codes, config, rng)
            est = run_batch(spec, sig, mu=config.mu, tau=config.tau, dt=config.dt)
        return (est[:, rec] == codes[:, rec]).sum(axis=0, dtype=np.int64)

    if workers == 1:
        counts = [block(b) for b in range(n_blocks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            counts = list(ex.map(block, range(n_blocks)))
    counts = np.asarray(counts, dtype=np.int64).reshape(n_blocks, len(rec))
    sizes = np.minimum(B, n_trials - np.arange(n_blocks) * B)
    G = min(n_groups, n_blocks)
    gid = np.arange(n_blocks) % G
    gsucc = np.zeros((G, len(rec) + 1), dtype=np.int64)
    gtrials = np.bincount(gid, weights=sizes, minlength=G).astype(np.int64)
    np.add.at(gsucc[:, 1:], gid, counts)
    gsucc[:, 0] = gtrials
    times = np.concatenate([[0.0], (rec + 1) * (config.dt / config.tau)])
    succ = np.concatenate([[n_trials], counts.sum(axis=0)])
    label = spec if spec == NO_TRACKING else spec.name
    return FidelityCurve(times, succ, n_trials, gsucc, gtrials, label)


@dataclass(frozen=True)
class LinearFit:
    """Fitted F(t) = 1 - delta_f_in - gamma (t - anchor)."""

    delta_f_in: float
    gamma: float
    fit_window: tuple
    residual_rms: float
    anchor: float = 0.0
    delta_f_in_stderr: float = math.nan
    gamma_stderr: float = math.nan
    n_points: int = 0

    def predict(self, t):
        return 1.0 - self.delta_f_in - self.gamma * (np.asarray(t, dtype=float) - self.anchor)


def response_time(mutau: float, tau: float = 1.0) -> float:
    return 0.5 * tau * math.log(1.0 / mutau)


def _window(curve, filter_name, dt_box, mutau, window):
    if window is not None:
        return tuple(window)
    t_end = float(curve.times[-1])
    if filter_name in ("boxcar", "halfbox", "double"):
        if dt_box is None:
            raise FitError("box filters need dt_box to place the fit window")
        return (2.0 * dt_box, t_end - dt_box)
    if filter_name in ("bayes", "wonham"):
        if mutau is None:
            raise FitError("the Bayesian fit window needs mu*tau")
        return (5.0 * response_time(mutau), t_end)
    return (float(curve.times[1]) if len(curve.times) > 1 else 0.0, t_end)


def _wls(t, succ, n):
    f = succ / n
    var = np.maximum(f * (1.0 - f), 1.0 / n) / n
    slope, icpt = np.polyfit(t, 1.0 - f, 1, w=1.0 / np.sqrt(var))
    return icpt, slope, f


def fit_linear(curve: FidelityCurve, filter_name: str = "", *, mutau=None, dt_box=None, window=None) -> LinearFit:
    """Weighted least-squares fit of 1 - F(t) against t.

    The window is ``[2 dt_box, T_end - dt_box]`` for box filters, with the drop
    read at ``dt_box / 2``, and ``[5 t_r, T_end]`` for the Bayesian filter with
    ``t_r = (tau/2) ln(1/mu tau)``, with the drop read at t = 0.  Standard errors
    come from a delete-one-group jackknife over the trial groups.
    """
    lo, hi = _window(curve, filter_name, dt_box, mutau, window)
    keep = (curve.times >= lo - 1e-9) & (curve.times <= hi + 1e-9)
    if keep.sum() < 3:
        raise FitError(f"fit window [{lo:g}, {hi:g}] holds {int(keep.sum())} points, need 3")
    anchor = 0.5 * dt_box if filter_name in ("boxcar", "halfbox", "double") else 0.0
    t = curve.times[keep]
    icpt, slope, f = _wls(t, curve.successes[keep], curve.n_trials)
    resid = (1.0 - f) - (icpt + slope * t)
    drop = icpt + slope * anchor

    d_err = g_err = math.nan
    gs = curve.group_successes
    if gs is not None and gs.shape[0] >= 2:
        G = gs.shape[0]
        est = []
        for g in range(G):
            n_g = curve.n_trials - curve.group_trials[g]
            if n_g < 1:
                continue
            s_g = (curve.successes - gs[g])[keep]
            i_g, sl_g, _ = _wls(t, s_g, n_g)
            est.append((i_g + sl_g * anchor, sl_g))
        if len(est) >= 2:
            e = np.array(est)
            k = len(e)
            var = (k - 1) / k * ((e - e.mean(axis=0)) ** 2).sum(axis=0)
            d_err, g_err = (float(v) for v in np.sqrt(var))
    return LinearFit(
        float(drop), float(slope), (float(lo), float(hi)), float(np.sqrt(np.mean(resid**2))), float(anchor), d_err, g_err, int(keep.sum())
    )


def average_posterior(config: SimConfig, n_trials: int, steps, *, mode="linear", workers=1, block_size=None):
    """Noise-averaged Wonham probabilities at the given steps.

    Returns (mean, stderr), each of shape (len(steps), 8).
    """
    steps = np.asarray(steps, dtype=np.int64)
    B = block_size or default_block_size(config.n_steps)
    n_blocks = -(-n_trials // B)

    def block(b):
        size = min(B, n_trials - b * B)
        rng = block_rng(config.seed, b)
        codes = generate_batch(config, size, rng)
        sig = synthesize_batch(codes, config, rng)
        _, rec = wonham_batch(sig, config.mu, config.tau, config.dt, mode, steps)
        return rec.sum(axis=0), (rec**2).sum(axis=0)

    if workers == 1:
        parts = [block(b) for b in range(n_blocks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(block, range(n_blocks)))
    s1 = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    mean = s1 / n_trials
    var = np.maximum(s2 / n_trials - mean**2, 0.0)
    return mean, np.sqrt(var / n_trials)


def default_horizon(mutau: float, dt: float, tau: float = 1.0) -> int:
    """Ten times the longest optimal box among the box filters, in steps."""
    from .optimizer import optimize

    longest = max(optimize(f, mutau).dt_over_tau for f in ("boxcar", "halfbox", "double"))
    return int(math.floor(10.0 * longest * tau / dt))


def available_workers() -> int:
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:
        return max(1, os.cpu_count() or 1)
