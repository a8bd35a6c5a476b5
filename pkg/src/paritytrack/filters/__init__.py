"""Syndrome-tracking filters: continuous Bayesian and boxcar families."""

from .base import BOX_FILTERS, CONTINUOUS_FILTERS, FilterRun, FilterSpec, run_batch, run_filter
from .streaming import BoxcarState, HalfBoxState, LinearBayesState, Verdict, WonhamState, box_length

__all__ = [
    "BOX_FILTERS",
    "CONTINUOUS_FILTERS",
    "FilterRun",
    "FilterSpec",
    "run_batch",
    "run_filter",
    "BoxcarState",
    "HalfBoxState",
    "LinearBayesState",
    "Verdict",
    "WonhamState",
    "box_length",
]
