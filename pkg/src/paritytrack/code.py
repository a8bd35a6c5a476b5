"""Three-qubit bit-flip code: encodings, parity syndromes and the flip master equation.

Encodings are numbered k = 0..7 by the Pauli-X pattern that maps the reference
encoding onto them::

    0 III  1 XII  2 IXI  3 IIX  4 XXI  5 XIX  6 IXX  7 XXX

Bits are numbered 1, 2, 3 from left to right.  Complementary encodings
(0/7, 1/6, 2/5, 3/4) share both parities and cannot be told apart by the
syndrome pair (Z1Z2, Z2Z3).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

__all__ = [
    "Encoding",
    "SyndromePair",
    "ENCODINGS",
    "LABELS",
    "BITS",
    "PARITIES",
    "NEIGHBORS",
    "COMPLEMENT",
    "encoding",
    "index_from_bits",
    "flip_bit",
    "decode_syndrome",
    "markov_matrix",
    "propagate",
    "propagate_product",
    "no_tracking_fidelity",
]

LABELS = ("III", "XII", "IXI", "IIX", "XXI", "XIX", "IXX", "XXX")

# bit patterns (b1, b2, b3) for k = 0..7
BITS = np.array(
    [
        [0, 0, 0],
        [1, 0, 0],
        [0, 1, 0],
        [0, 0, 1],
        [1, 1, 0],
        [1, 0, 1],
        [0, 1, 1],
        [1, 1, 1],
    ],
    dtype=np.int8,
)

# (s12, s23) parity eigenvalues for k = 0..7
PARITIES = np.array(
    [[1, 1], [-1, 1], [-1, -1], [1, -1], [1, -1], [-1, -1], [-1, 1], [1, 1]],
    dtype=np.int8,
)

# lookup from packed bits b1*4 + b2*2 + b3 to encoding index
_PACKED_TO_INDEX = np.empty(8, dtype=np.int8)
for _k, (_b1, _b2, _b3) in enumerate(BITS):
    _PACKED_TO_INDEX[4 * _b1 + 2 * _b2 + _b3] = _k

# NEIGHBORS[k, b-1] = encoding reached from k by flipping bit b
NEIGHBORS = np.empty((8, 3), dtype=np.int8)
for _k in range(8):
    for _b in range(3):
        _bits = BITS[_k].copy()
        _bits[_b] ^= 1
        NEIGHBORS[_k, _b] = _PACKED_TO_INDEX[4 * _bits[0] + 2 * _bits[1] + _bits[2]]

COMPLEMENT = np.array([7, 6, 5, 4, 3, 2, 1, 0], dtype=np.int8)


def index_from_bits(bits) -> np.ndarray | int:
    """Map bit triples (last axis of length 3) to encoding indices."""
    b = np.asarray(bits, dtype=np.int64)
    packed = 4 * b[..., 0] + 2 * b[..., 1] + b[..., 2]
    out = _PACKED_TO_INDEX[packed]
    return int(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SyndromePair:
    """Observed parity pair (Z1Z2, Z2Z3), each +1 or -1."""

    s12: int
    s23: int

    def __post_init__(self):
        if self.s12 not in (1, -1) or self.s23 not in (1, -1):
            raise ValueError(f"parities must be +1 or -1, got ({self.s12}, {self.s23})")


@dataclass(frozen=True)
class Encoding:
    """One of the eight logical encodings, stored with its bits and parities."""

    index: int
    bits: tuple[int, int, int]
    parities: tuple[int, int]

    def __post_init__(self):
        if not 0 <= self.index < 8:
            raise ValueError(f"encoding index must be in 0..7, got {self.index}")
        if tuple(BITS[self.index]) != tuple(self.bits):
            raise ValueError(f"bits {self.bits} do not match encoding {self.index}")
        if tuple(PARITIES[self.index]) != tuple(self.parities):
            raise ValueError(f"parities {self.parities} do not match encoding {self.index}")

    @property
    def label(self) -> str:
        return LABELS[self.index]

    @property
    def syndrome(self) -> SyndromePair:
        return SyndromePair(*self.parities)

    def __repr__(self) -> str:
        return f"Encoding({self.index}, {self.label})"


ENCODINGS = tuple(
    Encoding(k, tuple(int(b) for b in BITS[k]), tuple(int(s) for s in PARITIES[k]))
    for k in range(8)
)


def encoding(key) -> Encoding:
    """Look up an encoding by index, label ('XII') or bit string ('100')."""
    if isinstance(key, Encoding):
        return key
    if isinstance(key, (int, np.integer)):
        if not 0 <= key < 8:
            raise ValueError(f"encoding index must be in 0..7, got {key}")
        return ENCODINGS[int(key)]
    if isinstance(key, str):
        if key in LABELS:
            return ENCODINGS[LABELS.index(key)]
        if len(key) == 3 and set(key) <= {"0", "1"}:
            return ENCODINGS[index_from_bits([int(c) for c in key])]
    raise ValueError(f"unknown encoding {key!r}")


def flip_bit(e, bit: int) -> Encoding:
    """Return the encoding reached from ``e`` by flipping ``bit`` (1, 2 or 3)."""
    if bit not in (1, 2, 3):
        raise ValueError(f"bit must be 1, 2 or 3, got {bit}")
    e = encoding(e)
    return ENCODINGS[NEIGHBORS[e.index, bit - 1]]


def decode_syndrome(estimate, observed: SyndromePair) -> Encoding:
    """Update an encoding estimate from an observed syndrome pair.

    A changed Z1Z2 alone means bit 1 flipped, a changed Z2Z3 alone means bit 3,
    and both changed means bit 2.
    """
    estimate = encoding(estimate)
    if not isinstance(observed, SyndromePair):
        observed = SyndromePair(*observed)
    d12 = observed.s12 != estimate.parities[0]
    d23 = observed.s23 != estimate.parities[1]
    if d12 and d23:
        return flip_bit(estimate, 2)
    if d12:
        return flip_bit(estimate, 1)
    if d23:
        return flip_bit(estimate, 3)
    return estimate


def markov_matrix(mu: float) -> np.ndarray:
    """Generator of the untracked flip dynamics, columns summing to zero."""
    if not mu > 0:
        raise ValueError(f"flip rate must be positive, got {mu}")
    m = np.zeros((8, 8))
    for k in range(8):
        m[NEIGHBORS[k], k] = mu
        m[k, k] = -3.0 * mu
    return m


def _check_time(t):
    if np.any(np.asarray(t) < 0):
        raise ValueError(f"time must be non-negative, got {t}")


def propagate(p0, mu: float, t: float) -> np.ndarray:
    """Solve the master equation dP/dt = M P from ``p0`` for a duration ``t``."""
    _check_time(t)
    p0 = np.asarray(p0, dtype=float)
    return expm(t * markov_matrix(mu)) @ p0


def propagate_product(p0, mu: float, t: float) -> np.ndarray:
    """Closed-form propagation using independent per-bit flip probabilities.

    Each bit has flipped with probability q = (1 - exp(-2 mu t)) / 2, so the
    transition probability from l to k is q**w (1-q)**(3-w) with w the Hamming
    distance between their bit patterns.
    """
    _check_time(t)
    q = 0.5 * (1.0 - np.exp(-2.0 * mu * t))
    w = (BITS[:, None, :] != BITS[None, :, :]).sum(axis=-1)
    kernel = q**w * (1.0 - q) ** (3 - w)
    return kernel @ np.asarray(p0, dtype=float)


def no_tracking_fidelity(mu: float, t):
    """Probability of still being in the initial encoding without any tracking."""
    _check_time(t)
    return ((1.0 + np.exp(-2.0 * mu * np.asarray(t, dtype=float))) / 2.0) ** 3
