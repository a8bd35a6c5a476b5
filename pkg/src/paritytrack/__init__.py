"""Tracking bit-flip errors of the three-qubit code from continuous parity signals."""

__version__ = "0.1.0"

from .analytics import ancilla_theory, simplified_scaling, theory
from .code import ENCODINGS, Encoding, decode_syndrome, encoding, flip_bit, no_tracking_fidelity, propagate
from .ensemble import FidelityCurve, LinearFit, fit_linear, run_ensemble
from .estimators import FidelityDecayRegressor, TrackingFilter
from .filters import FilterSpec, run_batch, run_filter
from .optimizer import optimize
from .projective import ProjectiveConfig, run_idealized
from .trajectory import SimConfig, generate_trajectory, synthesize_signals

__all__ = [
    "__version__",
    "ENCODINGS",
    "Encoding",
    "FidelityCurve",
    "FidelityDecayRegressor",
    "FilterSpec",
    "LinearFit",
    "ProjectiveConfig",
    "SimConfig",
    "TrackingFilter",
    "ancilla_theory",
    "decode_syndrome",
    "encoding",
    "fit_linear",
    "flip_bit",
    "generate_trajectory",
    "no_tracking_fidelity",
    "optimize",
    "propagate",
    "run_batch",
    "run_ensemble",
    "run_filter",
    "run_idealized",
    "simplified_scaling",
    "synthesize_signals",
    "theory",
]
