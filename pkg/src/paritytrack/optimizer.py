"""Parameter optimization of the box filters and ancilla strategies.

The objective is the time for the linear-model fidelity to fall by 10%,
``t_max = (0.1 - drop) / gamma``, evaluated on the full closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .analytics import AncillaTheory, FilterTheory, ancilla_theory, canonical_filter, theory

__all__ = [
    "INFEASIBLE",
    "OptimizationResult",
    "AncillaOptimum",
    "t_max_objective",
    "optimize",
    "optimize_grid_2d",
    "crude_optimum",
    "optimize_ancilla",
    "DT_RANGE",
    "A_RANGE",
]

INFEASIBLE = -math.inf
DT_RANGE = (1.0, 1e5)
A_RANGE = (0.0, 0.99)
_GRID = 200
_XTOL = 1e-4


@dataclass(frozen=True)
class OptimizationResult:
    filter: str
    mutau: float
    dt_over_tau: float | None
    a: float
    t_max: float
    theory: FilterTheory
    feasible: bool
    rounds: int = 0

    def as_row(self) -> dict:
        return {
            "mutau": self.mutau,
            "dt_over_tau": self.dt_over_tau,
            "a": self.a,
            "t_max": self.t_max,
            "delta_f_in": self.theory.delta_f_in,
            "gamma_tau": self.theory.gamma_tau,
            "feasible": self.feasible,
        }


def _t_max(th) -> float:
    if th.gamma_tau <= 0:
        return INFEASIBLE
    return (0.1 - th.delta_f_in) / th.gamma_tau


def t_max_objective(filter, mutau, dt_over_tau=None, a=0.0) -> float:
    """Time (in tau) for the linear fidelity model to lose 10%.

    Negative when the initial drop already exceeds 0.1; ``INFEASIBLE`` when
    the logical error rate vanishes.
    """
    return _t_max(theory(filter, mutau, dt_over_tau, a))


def _golden_1d(f, grid):
    """Grid scan then golden-section refinement of ``f`` (to maximize) on a 1-D grid."""
    vals = np.array([f(x) for x in grid])
    i = int(np.argmax(vals))
    if i == 0 or i == len(grid) - 1:
        return float(grid[i]), float(vals[i])
    res = minimize_scalar(
        lambda x: -f(x),
        bracket=(grid[i - 1], grid[i], grid[i + 1]),
        method="golden",
        options={"xtol": _XTOL},
    )
    if -res.fun >= vals[i]:
        return float(res.x), float(-res.fun)
    return float(grid[i]), float(vals[i])


def _dt_grid(lo=DT_RANGE[0], hi=DT_RANGE[1], n=_GRID):
    return np.geomspace(lo, hi, n)


def _opt_dt(name, mutau, a):
    # golden section on log(dt) so the tolerance is relative
    f = lambda u: t_max_objective(name, mutau, math.exp(u), a)  # noqa: E731
    u, t = _golden_1d(f, np.log(_dt_grid()))
    return math.exp(u), t


def _opt_a(name, mutau, x):
    f = lambda a: t_max_objective(name, mutau, x, min(max(a, A_RANGE[0]), A_RANGE[1]))  # noqa: E731
    a, t = _golden_1d(f, np.linspace(*A_RANGE, 100))
    return min(max(a, A_RANGE[0]), A_RANGE[1]), t


def optimize(filter, mutau, *, a=None, max_rounds=50, tol=1e-3) -> OptimizationResult:
    """Maximize ``t_max`` over the box length (and threshold for the double filter).

    Parameters
    ----------
    filter : str
        Filter name; the Bayesian filter has no free parameters.
    mutau : float
    a : float, optional
        Fix the double-filter threshold instead of optimizing it.
    max_rounds, tol
        Coordinate-descent controls for the two-parameter case.
    """
    name = canonical_filter(filter)
    if name in ("bayes", "wonham"):
        th = theory(name, mutau)
        t = _t_max(th)
        return OptimizationResult(name, mutau, None, 0.0, t, th, t > 0)
    if name in ("boxcar", "halfbox"):
        x, t = _opt_dt(name, mutau, 0.0)
        th = theory(name, mutau, x)
        return OptimizationResult(name, mutau, x, 0.0, t, th, t > 0)
    if name != "double":
        raise ValueError(f"cannot optimize filter {name!r}")
    if a is not None:
        x, t = _opt_dt(name, mutau, a)
        return OptimizationResult(name, mutau, x, a, t, theory(name, mutau, x, a), t > 0)

    start = crude_optimum(name, mutau)
    x, a_cur = start["dt_over_tau"], start["a"]
    rounds = 0
    for rounds in range(1, max_rounds + 1):
        x_new, _ = _opt_dt(name, mutau, a_cur)
        a_new, t = _opt_a(name, mutau, x_new)
        done = abs(math.log(x_new / x)) < tol and abs(a_new - a_cur) < tol
        x, a_cur = x_new, a_new
        if done:
            break
    th = theory(name, mutau, x, a_cur)
    t = _t_max(th)
    return OptimizationResult(name, mutau, x, a_cur, t, th, t > 0, rounds)


def optimize_grid_2d(mutau, n=60, *, dt_range=None):
    """Brute-force (dt, a) grid for the double filter; returns (dt, a, t_max) of the best cell."""
    lo, hi = dt_range or (3.0, 3e3)
    xs = np.geomspace(lo, hi, n)
    as_ = np.linspace(*A_RANGE, n)
    best = (None, None, -math.inf)
    for x in xs:
        for a in as_:
            t = t_max_objective("double", mutau, x, a)
            if t > best[2]:
                best = (float(x), float(a), t)
    return best


def crude_optimum(filter, mutau) -> dict:
    """Closed-form approximations of the optimal parameters."""
    name = canonical_filter(filter)
    if name == "boxcar":
        return {"dt_over_tau": 0.207 * mutau ** (-2 / 3) - 1.3 * mutau ** (-1 / 3) + 6.0, "a": 0.0}
    if name == "halfbox":
        return {"dt_over_tau": 2.0 * math.log(1.0 / (15.0 * mutau)), "a": 0.0}
    if name == "double":
        a = 0.525 * (1.0 - 2.5 * mutau ** (1 / 3))
        q = (1.0 - a) ** 2
        inner = math.log(q / (6.0 * mutau * math.sqrt(math.pi)))
        x = 2.0 / q * math.log(q / (6.0 * mutau * math.sqrt(math.pi * inner)))
        return {"dt_over_tau": x, "a": a}
    raise ValueError(f"no crude optimum for filter {name!r}")


@dataclass(frozen=True)
class AncillaOptimum:
    strategy: str
    mutau: float
    dt_over_tau: float | None
    cycle_over_tau: float
    t_max: float
    theory: AncillaTheory


def optimize_ancilla(strategy, mutau, *, max_rounds=50, tol=1e-3) -> AncillaOptimum:
    """Optimize readout time and cycle period of an ancilla strategy by coordinate descent."""
    if strategy == "idealistic":
        th = ancilla_theory(strategy, mutau)
        return AncillaOptimum(strategy, mutau, None, th.cycle_over_tau, _t_max(th), th)
    crude = ancilla_theory(strategy, mutau)
    x, extra = crude.dt_over_tau, crude.cycle_over_tau - crude.dt_over_tau - crude.gate_over_tau
    extra = max(extra, 1e-3)

    def f(xv, ev):
        return _t_max(ancilla_theory(strategy, mutau, xv, xv + crude.gate_over_tau + ev))

    for _ in range(max_rounds):
        u, _ = _golden_1d(lambda u: f(math.exp(u), extra), np.log(np.geomspace(1.0, 1e3, _GRID)))
        x_new = math.exp(u)
        v, _ = _golden_1d(lambda v: f(x_new, math.exp(v)), np.log(np.geomspace(1e-3, 1e5, _GRID)))
        e_new = math.exp(v)
        done = abs(math.log(x_new / x)) < tol and abs(math.log(e_new / extra)) < tol
        x, extra = x_new, e_new
        if done:
            break
    th = ancilla_theory(strategy, mutau, x, x + crude.gate_over_tau + extra)
    return AncillaOptimum(strategy, mutau, x, th.cycle_over_tau, _t_max(th), th)
