"""Closed-form fidelity-decay formulas for the tracking filters.

All quantities are dimensionless: rates enter as ``mutau`` (flip rate times
measurement time) and durations as multiples of the measurement time ``tau``.
Every formula returns the initial fidelity drop ``delta_f_in`` and the logical
error rate in units of 1/tau, ``gamma_tau``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import integrate, special

__all__ = [
    "FILTERS",
    "canonical_filter",
    "p_below",
    "p_mis",
    "p_mis_asymptotic",
    "OverlapIntegral",
    "bit2_overlap_integral",
    "bit2_overlap_approx",
    "p2",
    "p2_asymptotic",
    "boxcar_family_drop",
    "FilterTheory",
    "theory",
    "simplified_scaling",
    "AncillaTheory",
    "GATE_TIME",
    "ancilla_theory",
]

FILTERS = ("bayes", "boxcar", "halfbox", "double")

_ALIASES = {
    "bayes": "bayes",
    "bayesian": "bayes",
    "linear": "bayes",
    "wonham": "wonham",
    "boxcar": "boxcar",
    "box": "boxcar",
    "halfbox": "halfbox",
    "half-boxcar": "halfbox",
    "half_boxcar": "halfbox",
    "double": "double",
    "double-threshold": "double",
    "double_threshold": "double",
    "projective-ideal": "projective-ideal",
    "projective": "projective-ideal",
}

# gate time of two sequential CNOTs, in units of tau
GATE_TIME = 4.0

_QUAD_TOL = 1e-10


def canonical_filter(name: str) -> str:
    try:
        return _ALIASES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown filter {name!r}; choose from {sorted(set(_ALIASES.values()))}")


def _check_mutau(mutau: float, lo: float = 0.0, hi: float = 0.1):
    if not lo < mutau < hi:
        warnings.warn(
            f"mu*tau={mutau:g} is outside the validated range ({lo:g}, {hi:g})",
            RuntimeWarning,
            stacklevel=3,
        )


def p_below(a, r_mean, dt_box, tau=1.0):
    """Probability that a box-averaged signal with mean ``r_mean`` falls below ``a``."""
    return 0.5 * special.erfc((np.asarray(r_mean) - a) * np.sqrt(dt_box / (2.0 * tau)))


def p_mis(a, dt_box, tau=1.0):
    """Probability of reading an even (+1) parity box below the threshold ``a``."""
    if np.any(np.asarray(dt_box) <= 0):
        raise ValueError("box duration must be positive")
    return p_below(a, 1.0, dt_box, tau)


def p_mis_asymptotic(dt_box, tau=1.0):
    """Large-box form exp(-x/2) / sqrt(2 pi x) of ``p_mis(0, ...)``, x = dt_box/tau."""
    x = np.asarray(dt_box) / tau
    return np.exp(-x / 2.0) / np.sqrt(2.0 * np.pi * x)


class OverlapIntegral(NamedTuple):
    quadrature: float
    approximation: float


def bit2_overlap_approx(a, dt_box, tau=1.0):
    """Exponential approximation of the split-detection integral for a bit-2 flip."""
    x = dt_box / tau
    return math.sqrt(1.0 / (math.pi * x)) * math.exp(-0.9 * a * math.sqrt(x) - 0.15 * a * a * x)


def bit2_overlap_integral(a, dt_box, tau=1.0) -> OverlapIntegral:
    """Integral over r_m in [-1, 1] of P(r < 0 | r_m) P(r > a | r_m).

    Returns the adaptive quadrature together with the closed approximation
    (which is exactly sqrt(tau / (pi dt_box)) at ``a = 0``).
    """
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {a}")
    s = math.sqrt(dt_box / (2.0 * tau))

    def integrand(r):
        return 0.25 * special.erfc(r * s) * special.erfc((a - r) * s)

    value, _ = integrate.quad(integrand, -1.0, 1.0, epsabs=_QUAD_TOL, epsrel=1e-12, limit=200)
    return OverlapIntegral(value, bit2_overlap_approx(a, dt_box, tau))


def p2(a, dt_box, tau=1.0) -> float:
    """Integrated probability of not detecting a bit-2 flip in the final box."""
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {a}")
    s = math.sqrt(dt_box / (2.0 * tau))

    def integrand(r):
        above_a = 0.5 * special.erfc((a - r) * s)
        above_0 = 0.5 * special.erfc(-r * s)
        return 2.0 * above_a * above_0 - above_a * above_a

    value, _ = integrate.quad(integrand, -1.0, 1.0, epsabs=_QUAD_TOL, epsrel=1e-12, limit=200)
    return value


def p2_asymptotic(dt_box, tau=1.0) -> float:
    """Slowly converging large-box form of ``p2`` at zero threshold."""
    x = dt_box / tau
    return 1.0 - 1.0 / math.sqrt(math.pi * x) + math.exp(-x) / (x * math.sqrt(math.pi))


def boxcar_family_drop(mutau, dt_box, a=0.0, tau=1.0) -> float:
    """Final-box fidelity drop [2 + P2] mu dt_box / 2 + 2 P_mis before any simplification."""
    x = dt_box / tau
    return (2.0 + p2(a, x)) * mutau * x / 2.0 + 2.0 * float(p_mis(0.0, x))


@dataclass(frozen=True)
class FilterTheory:
    filter: str
    mutau: float
    delta_f_in: float
    gamma_tau: float
    dt_over_tau: float | None = None
    a: float | None = None
    terms: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.gamma_tau >= 0:
            raise ValueError(f"negative logical error rate {self.gamma_tau}")

    def fidelity(self, t_over_tau):
        """Linear-regime average fidelity 1 - drop - gamma t."""
        return 1.0 - self.delta_f_in - self.gamma_tau * np.asarray(t_over_tau)


def _bayes(mutau, prefactor):
    if prefactor == "derived":
        c = 5.0 / 4.0
    elif prefactor == "noise_corrected":
        c = 3.0 / 2.0
    else:
        raise ValueError(f"prefactor must be 'derived' or 'noise_corrected', got {prefactor!r}")
    drop = mutau * (c * math.log(1.0 / mutau) + 0.25 * math.log(2.0))
    g12 = mutau**2 * 3.0 * math.log(2.0 / mutau)
    g13 = mutau**2 * math.log(math.log(5.0 / mutau) / 4.0)
    return drop, g12 + g13, {"two_flips_adjacent": g12, "bits_1_3": g13}


def _box_common(mutau, x, a):
    pm = float(p_mis(0.0, x))
    pma = float(p_mis(a, x))
    return pm, pma


def _boxcar(mutau, x):
    pm, _ = _box_common(mutau, x, 0.0)
    terms = {
        "bit2_mid_box": mutau * math.sqrt(1.0 / (math.pi * x)),
        "two_flips": 3.0 * mutau**2 * x,
        "flip_and_mis": 8.0 * mutau * pm,
        "two_mis": 2.0 * pm**2 / x,
    }
    return 1.5 * mutau * x, sum(terms.values()), terms


def _halfbox(mutau, x):
    pm, _ = _box_common(mutau, x, 0.0)
    terms = {
        "two_flips": 3.5 * mutau**2 * x,
        "flip_and_mis": 3.0 * mutau * pm,
        "flip_and_mis_mid": (1.0 / math.sqrt(2.0) + 1.5) * math.sqrt(1.0 / (math.pi * x)) * mutau * pm,
        "two_mis": 2.0 * pm**2 / x,
    }
    drop = (
        1.5 * mutau * x
        - 0.5 * mutau * math.sqrt(x / math.pi)
        + math.sqrt(2.0) * math.exp(-x / 2.0) / math.sqrt(math.pi * x)
    )
    return drop, sum(terms.values()), terms


def _double(mutau, x, a):
    pm, pma = _box_common(mutau, x, a)
    terms = {
        "two_flips": 3.0 * mutau**2 * x,
        "zero_mis_and_flip": 4.0 * mutau * pm,
        "a_mis_and_flip": 2.0 * mutau * pma,
        "two_mis": 2.0 * pm * pma / x,
        "bit2_mid_box": 2.0 * mutau * bit2_overlap_approx(a, x),
    }
    return 1.5 * mutau * x, sum(terms.values()), terms


def theory(filter, mutau, dt_over_tau=None, a=0.0, *, bayes_prefactor="noise_corrected") -> FilterTheory:
    """Evaluate the initial drop and logical error rate of a filter.

    Parameters
    ----------
    filter : str
        'bayes' (or 'wonham'), 'boxcar', 'halfbox' or 'double'.
    mutau : float
        Flip rate times measurement time.
    dt_over_tau : float, optional
        Box length in units of tau, required for the box filters.
    a : float
        Second threshold of the double-threshold filter.
    bayes_prefactor : {'noise_corrected', 'derived'}
        Logarithmic prefactor of the Bayesian drop, 3/2 or 5/4.
    """
    name = canonical_filter(filter)
    _check_mutau(mutau)
    if name in ("bayes", "wonham"):
        drop, gamma, terms = _bayes(mutau, bayes_prefactor)
        return FilterTheory(name, mutau, drop, gamma, terms=terms)
    if dt_over_tau is None or not dt_over_tau > 0:
        raise ValueError(f"{name} needs a positive box length, got {dt_over_tau}")
    x = float(dt_over_tau)
    if name == "boxcar":
        drop, gamma, terms = _boxcar(mutau, x)
        a = 0.0
    elif name == "halfbox":
        drop, gamma, terms = _halfbox(mutau, x)
        a = 0.0
    elif name == "double":
        if not 0.0 <= a < 1.0:
            raise ValueError(f"threshold must be in [0, 1), got {a}")
        drop, gamma, terms = _double(mutau, x, a)
    else:
        raise ValueError(f"no closed form for filter {name!r}")
    return FilterTheory(name, mutau, drop, gamma, x, a, terms)


def simplified_scaling(filter, mutau) -> FilterTheory:
    """Dominant scaling of the optimized filters, as fitted over mu*tau in [1e-6, 1e-3]."""
    name = canonical_filter(filter)
    _check_mutau(mutau, 1e-6 * (1 - 1e-9), 1e-3 * (1 + 1e-9))
    if name in ("bayes", "wonham"):
        log = math.log(1.0 / mutau)
        return FilterTheory(name, mutau, 1.5 * mutau * log, 3.0 * mutau**2 * log)
    if name == "boxcar":
        return FilterTheory(
            name,
            mutau,
            0.31 * mutau ** (1.0 / 3.0),
            1.86 * mutau ** (4.0 / 3.0),
            0.207 * mutau ** (-2.0 / 3.0),
            0.0,
        )
    if name == "halfbox":
        log = math.log(1.0 / (15.0 * mutau))
        return FilterTheory(name, mutau, 3.0 * mutau * log, 8.4 * mutau**2 * log, 2.0 * log, 0.0)
    if name == "double":
        log = math.log(1.0 / (150.0 * mutau))
        return FilterTheory(name, mutau, 12.0 * mutau * log, 33.0 * mutau**2 * log, 8.0 * log, 0.5)
    raise ValueError(f"no scaling law for filter {name!r}")


@dataclass(frozen=True)
class AncillaTheory:
    strategy: str
    mutau: float
    delta_f_in: float
    gamma_tau: float
    dt_over_tau: float | None = None
    cycle_over_tau: float | None = None
    gate_over_tau: float = GATE_TIME
    terms: dict = field(default_factory=dict, compare=False)


def _pessimistic_terms(mutau, x, cycle, gate):
    pm = float(p_mis(0.0, x))
    return {
        "flip_during_cnot": 1.25 * mutau * gate / cycle,
        "two_data_flips": 3.0 * mutau**2 * cycle,
        "data_and_ancilla_flip": 8.0 * mutau**2 * (x + gate),
        "two_ancilla_flips": 1.5 * mutau**2 * x * x / cycle,
        "mis_and_flip": 12.0 * pm * mutau + 5.0 * pm * mutau * x / cycle,
        "two_mis": 6.0 * pm**2 / cycle,
    }


def ancilla_theory(strategy, mutau, dt_over_tau=None, cycle_over_tau=None) -> AncillaTheory:
    """Drop and logical error rate of gate-based syndrome extraction.

    With ``dt_over_tau`` (ancilla readout time) and ``cycle_over_tau`` (cycle
    period) given, the full expressions are evaluated; otherwise the crude
    optimized scaling formulas are returned.  The two-CNOT gate time is fixed
    at 4 tau.
    """
    gate = GATE_TIME
    _check_mutau(mutau)
    if strategy == "idealistic":
        gamma = 3.0 * mutau**2 * gate
        return AncillaTheory(strategy, mutau, mutau * gate, gamma, None, gate)

    if strategy not in ("pessimistic", "optimistic"):
        raise ValueError(f"unknown strategy {strategy!r}")

    if dt_over_tau is None and cycle_over_tau is None:
        if strategy == "pessimistic":
            x = 2.0 * math.log(1.0 / (15.0 * mutau))
            cycle = math.sqrt(5.0 / (3.0 * mutau))
            gamma = 8.0 * mutau**1.5 * (1.0 + 8.0 * math.sqrt(mutau))
            drop = 8.0 * mutau * math.log(1.0 / (15.0 * mutau))
        else:
            log = math.log(1.0 / (100.0 * mutau))
            x = 2.0 * log
            cycle = gate + x
            gamma = 3.0 * mutau**2 * (4.0 + 2.0 * log)
            drop = 12.0 * mutau * log
        return AncillaTheory(strategy, mutau, drop, gamma, x, cycle)

    if dt_over_tau is None or cycle_over_tau is None:
        raise ValueError("give both the readout time and the cycle time, or neither")
    x, cycle = float(dt_over_tau), float(cycle_over_tau)
    if not x > 0 or cycle < x + gate:
        raise ValueError(f"cycle time {cycle} must be at least readout {x} + gate time {gate}")
    drop = 4.0 * mutau * x + 2.0 * float(p_mis(0.0, x))
    if strategy == "pessimistic":
        terms = _pessimistic_terms(mutau, x, cycle, gate)
    else:
        terms = {"two_data_flips": 3.0 * mutau**2 * cycle}
    return AncillaTheory(strategy, mutau, drop, sum(terms.values()), x, cycle, gate, terms)
