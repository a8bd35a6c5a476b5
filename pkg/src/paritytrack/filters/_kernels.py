"""Compiled batch versions of the streaming filters.

All kernels take signals of shape (B, 2, N) and write per-step estimates of
shape (B, N) as int8.  Arithmetic follows the streaming classes operation by
operation so both paths give identical estimates.
"""

import math

import numpy as np
from numba import njit

from ..code import NEIGHBORS, PARITIES
from .streaming import RENORM_EVERY, RENORM_HIGH, RENORM_LOW

_S12 = PARITIES[:, 0].astype(np.float64)
_S23 = PARITIES[:, 1].astype(np.float64)
_NB = NEIGHBORS.astype(np.int64)
_P = PARITIES.astype(np.int64)


@njit(cache=True, nogil=True)
def _argmax8(x):
    best = 0
    for k in range(1, 8):
        if x[k] > x[best]:
            best = k
    return best


@njit(cache=True, nogil=True)
def _bayes(sig, c, md, s12, s23, nb, est, hi, lo, every):
    B, _, N = sig.shape
    w = np.empty(8)
    s = np.empty(8)
    for b in range(B):
        for k in range(8):
            s[k] = 0.0
        s[0] = 1.0
        since = 0
        for j in range(N):
            r12 = sig[b, 0, j]
            r23 = sig[b, 1, j]
            m = c * (abs(r12) + abs(r23))
            for k in range(8):
                w[k] = math.exp(c * (r12 * s12[k] + r23 * s23[k]) - m) * s[k]
            top = -1.0
            for k in range(8):
                s[k] = w[k] + md * (w[nb[k, 0]] + w[nb[k, 1]] + w[nb[k, 2]])
                if s[k] > top:
                    top = s[k]
            since += 1
            if top > hi or top < lo or since >= every:
                for k in range(8):
                    s[k] = s[k] / top
                since = 0
            est[b, j] = _argmax8(s)


@njit(cache=True, nogil=True)
def _wonham(sig, c, md, diag, s12, s23, nb, est, rec_steps, rec):
    B, _, N = sig.shape
    w = np.empty(8)
    p = np.empty(8)
    nrec = rec_steps.shape[0]
    for b in range(B):
        for k in range(8):
            p[k] = 0.0
        p[0] = 1.0
        ir = 0
        for j in range(N):
            r12 = sig[b, 0, j]
            r23 = sig[b, 1, j]
            m = c * (abs(r12) + abs(r23))
            tot = 0.0
            for k in range(8):
                w[k] = math.exp(c * (r12 * s12[k] + r23 * s23[k]) - m) * p[k]
                tot += w[k]
            for k in range(8):
                w[k] = w[k] / tot
            tot = 0.0
            for k in range(8):
                p[k] = diag * w[k] + md * (w[nb[k, 0]] + w[nb[k, 1]] + w[nb[k, 2]])
                tot += p[k]
            for k in range(8):
                p[k] = p[k] / tot
            est[b, j] = _argmax8(p)
            while ir < nrec and rec_steps[ir] == j:
                for k in range(8):
                    rec[b, ir, k] = p[k]
                ir += 1


@njit(cache=True, nogil=True)
def _verdict_bit(est, m12, m23, a, par):
    c12 = m12 * par[est, 0]
    c23 = m23 * par[est, 1]
    if c12 < a and c23 < a:
        return 2
    if c12 < 0:
        return 1
    if c23 < 0:
        return 3
    return 0


@njit(cache=True, nogil=True)
def _boxcar(sig, L, a, par, nb, est):
    B, _, N = sig.shape
    for b in range(B):
        e = 0
        acc12 = 0.0
        acc23 = 0.0
        i = 0
        for j in range(N):
            acc12 += sig[b, 0, j]
            acc23 += sig[b, 1, j]
            i += 1
            if i == L:
                bit = _verdict_bit(e, acc12 / L, acc23 / L, a, par)
                if bit:
                    e = nb[e, bit - 1]
                acc12 = 0.0
                acc23 = 0.0
                i = 0
            est[b, j] = e


@njit(cache=True, nogil=True)
def _halfbox(sig, H, par, nb, est, n_rewrites):
    B, _, N = sig.shape
    h12 = np.zeros(3)
    h23 = np.zeros(3)
    L = 2 * H
    for b in range(B):
        e = 0
        acc12 = 0.0
        acc23 = 0.0
        i = 0
        nh = 0
        prev_bit = 0
        prev_before = 0
        prev_end = -1  # step at which the previous verdict was emitted
        for j in range(N):
            acc12 += sig[b, 0, j]
            acc23 += sig[b, 1, j]
            i += 1
            if i == H:
                h12[0] = h12[1]
                h12[1] = h12[2]
                h12[2] = acc12 / H
                h23[0] = h23[1]
                h23[1] = h23[2]
                h23[2] = acc23 / H
                acc12 = 0.0
                acc23 = 0.0
                i = 0
                nh += 1
                if nh % 2 == 0:
                    m12 = 0.5 * (h12[1] + h12[2])
                    m23 = 0.5 * (h23[1] + h23[2])
                    before = e
                    bit = _verdict_bit(before, m12, m23, 0.0, par)
                    after = nb[before, bit - 1] if bit else before
                    cur_bit = bit
                    cur_before = before
                    if nh >= 4 and ((prev_bit == 1 and bit == 3) or (prev_bit == 3 and bit == 1)):
                        pre = prev_before
                        w12 = 0.5 * (h12[0] + h12[1])
                        w23 = 0.5 * (h23[0] + h23[1])
                        if w12 * par[pre, 0] < 0 and w23 * par[pre, 1] < 0:
                            after = nb[pre, 1]
                            for jj in range(prev_end, j):
                                est[b, jj] = after
                            cur_bit = 0
                            cur_before = after
                            n_rewrites[b] += 1
                    e = after
                    prev_bit = cur_bit
                    prev_before = cur_before
                    prev_end = j
            est[b, j] = e


def bayes_batch(sig, mu_est, tau, dt):
    est = np.empty(sig.shape[::2], dtype=np.int8)
    _bayes(sig, dt / tau, mu_est * dt, _S12, _S23, _NB, est, RENORM_HIGH, RENORM_LOW, RENORM_EVERY)
    return est


def wonham_batch(sig, mu_est, tau, dt, mode="linear", record_steps=None):
    """Returns estimates and, if ``record_steps`` is given, p at those steps (B, R, 8)."""
    if mode not in ("linear", "full"):
        raise ValueError(f"compiled Wonham supports modes 'linear' and 'full', got {mode!r}")
    md = mu_est * dt
    diag = 1.0 - 3.0 * md if mode == "full" else 1.0
    rs = np.sort(np.asarray(record_steps if record_steps is not None else [], dtype=np.int64))
    est = np.empty(sig.shape[::2], dtype=np.int8)
    rec = np.zeros((sig.shape[0], len(rs), 8))
    _wonham(sig, dt / tau, md, diag, _S12, _S23, _NB, est, rs, rec)
    return est, rec


def boxcar_batch(sig, box_len, a=0.0):
    est = np.empty(sig.shape[::2], dtype=np.int8)
    _boxcar(sig, int(box_len), float(a), _P, _NB, est)
    return est


def halfbox_batch(sig, half_len):
    """Returns estimates and the number of rewrites per trial."""
    est = np.empty(sig.shape[::2], dtype=np.int8)
    nrw = np.zeros(sig.shape[0], dtype=np.int64)
    _halfbox(sig, int(half_len), _P, _NB, est, nrw)
    return est, nrw
