"""Discrete multiwavelet transform with periodic extension.

One analysis level maps vectors ``s^{j-1}_k`` to

    s^j_l = sum_q H_q s^{j-1}_{2l+q},    d^j_l = sum_q G_q s^{j-1}_{2l+q}

(indices mod the sequence length), and synthesis adds back
``H_q^T s^j_l + G_q^T d^j_l`` at position ``2l+q``. With this phase a unit
impulse at vector position 0 returns the columns of ``H_0`` and ``G_0``.

Balanced mode runs a prefilter ``M`` over the vectorized input before the
first level and the postfilter ``N`` after the last synthesis level.
Non-balanced mode uses plain vectorization ``(s[2k], s[2k+1])``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .polymat import LaurentMatrix, lm_mul

MODES = ("balanced", "nonbalanced")


def _check_mode(mode):
    if mode == "non-balanced":
        mode = "nonbalanced"
    if mode not in MODES:
        raise ValueError(f"mode must be 'balanced' or 'nonbalanced', got {mode!r}")
    return mode


# -- vectorization -------------------------------------------------------------

def vectorize(signal, r=2):
    """Partition a scalar sequence into consecutive ``r``-vectors."""
    s = np.asarray(signal)
    if s.ndim != 1:
        raise ValueError("vectorize expects a 1D signal")
    if len(s) % r:
        raise ValueError(f"signal length {len(s)} is not divisible by {r}")
    return s.reshape(-1, r)


def devectorize(vectors):
    return np.asarray(vectors).reshape(-1)


# -- pre/postfilters -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PrePostPair:
    M: LaurentMatrix
    N: LaurentMatrix
    delay: int = 0

    def __post_init__(self):
        prod = lm_mul(self.N, self.M)
        if prod.lo != prod.hi:
            raise ValueError("N(z) M(z) must be a pure delay times the identity")
        if np.max(np.abs(prod[prod.lo] - np.eye(self.M.r))) > 1e-12:
            raise ValueError("N(z) M(z) is not the identity up to a delay")
        object.__setattr__(self, "delay", prod.lo)


def haar_prepost():
    h = 1 / math.sqrt(2)
    A = np.array([[[h, h], [h, -h]]])
    return PrePostPair(LaurentMatrix(A, 0), LaurentMatrix(A, 0))


def apply_filter(F, x):
    """Periodic matrix filtering ``y_k = sum_j F_j x_{k+j}`` along axis -2.

    ``F(z) = sum_j F_j z**j`` is taken with positive powers as advances, so
    that applying ``N`` after ``M`` realizes ``N(z) M(z)`` and a product with
    delay ``c`` shifts by ``c`` positions.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[-2]
    y = np.zeros_like(x)
    for j, Fj in F.terms().items():
        if not np.any(Fj):
            continue
        idx = (np.arange(n) + j) % n
        y += x[..., idx, :] @ Fj.T
    return y


def _prefilter(prepost, v):
    return apply_filter(prepost.M, v)


def _postfilter(prepost, v):
    y = apply_filter(prepost.N, v)
    if prepost.delay:
        y = np.roll(y, prepost.delay, axis=-2)
    return y


# -- single level --------------------------------------------------------------

def analysis_level(sys, v):
    """One analysis level on vectors ``v`` of shape ``(..., n, r)``."""
    n = v.shape[-2]
    if n % 2:
        raise ValueError(f"sequence of {n} vectors cannot be decimated")
    half = np.arange(n // 2)
    s = np.zeros(v.shape[:-2] + (n // 2, sys.r))
    d = np.zeros_like(s)
    for q in range(sys.m + 1):
        blk = v[..., (2 * half + q) % n, :]
        s += blk @ sys.H[q].T
        d += blk @ sys.G[q].T
    return s, d


def synthesis_level(sys, s, d):
    n = 2 * s.shape[-2]
    half = np.arange(n // 2)
    v = np.zeros(s.shape[:-2] + (n, sys.r))
    for q in range(sys.m + 1):
        # positions 2l+q are distinct for fixed q, so plain fancy-index add is safe
        idx = (2 * half + q) % n
        v[..., idx, :] += s @ sys.H[q] + d @ sys.G[q]
    return v


# -- 1D pyramid ----------------------------------------------------------------

@dataclass(eq=False)
class WaveletPyramid:
    """``s`` holds ``s^J``; ``d[j-1]`` holds ``d^j`` as ``(n_j, r)`` arrays."""

    J: int
    s: np.ndarray
    d: list
    mode: str
    length0: int

    def energy(self):
        return float(np.sum(self.s**2) + sum(np.sum(dj**2) for dj in self.d))

    def copy(self):
        return WaveletPyramid(self.J, self.s.copy(), [dj.copy() for dj in self.d], self.mode, self.length0)


def _check_length(n, r, J, what="signal length"):
    if J < 1:
        raise ValueError("J must be >= 1")
    q = r * 2**J
    if n % q:
        raise ValueError(f"{what} {n} is not divisible by r*2**J = {q}")


def dmwt_forward_1d(signal, sys, J, mode="balanced", prepost=None):
    """Forward transform of a scalar signal through ``J`` levels."""
    mode = _check_mode(mode)
    x = np.asarray(signal, dtype=float)
    if x.ndim != 1:
        raise ValueError("expected a 1D signal")
    _check_length(len(x), sys.r, J)
    if mode == "balanced" and prepost is None:
        raise ValueError("balanced mode requires a prefilter/postfilter pair")
    v = vectorize(x, sys.r)
    if mode == "balanced":
        v = _prefilter(prepost, v)
    details = []
    for _ in range(J):
        v, dj = analysis_level(sys, v)
        details.append(dj)
    return WaveletPyramid(J=J, s=v, d=details, mode=mode, length0=len(x))


def dmwt_inverse_1d(pyr, sys, prepost=None):
    if len(pyr.d) != pyr.J:
        raise ValueError(f"pyramid has {len(pyr.d)} detail levels, expected {pyr.J}")
    n = pyr.length0 // sys.r
    for j, dj in enumerate(pyr.d, start=1):
        if dj.shape != (n >> j, sys.r):
            raise ValueError(f"level {j} details have shape {dj.shape}, expected {(n >> j, sys.r)}")
    if pyr.s.shape != (n >> pyr.J, sys.r):
        raise ValueError(f"approximation has shape {pyr.s.shape}, expected {(n >> pyr.J, sys.r)}")
    if pyr.mode == "balanced" and prepost is None:
        raise ValueError("balanced mode requires a prefilter/postfilter pair")
    v = pyr.s
    for dj in reversed(pyr.d):
        v = synthesis_level(sys, v, dj)
    if pyr.mode == "balanced":
        v = _postfilter(prepost, v)
    return devectorize(v)


# -- 2D ------------------------------------------------------------------------

def _scalar_level(sys, x, axis):
    """Scalar-to-scalar level along ``axis``: first half lowpass, second half highpass."""
    x = np.moveaxis(x, axis, -1)
    v = x.reshape(x.shape[:-1] + (-1, sys.r))
    s, d = analysis_level(sys, v)
    out = np.concatenate([s.reshape(x.shape[:-1] + (-1,)), d.reshape(x.shape[:-1] + (-1,))], axis=-1)
    return np.moveaxis(out, -1, axis)


def _scalar_level_inv(sys, y, axis):
    y = np.moveaxis(y, axis, -1)
    h = y.shape[-1] // 2
    s = y[..., :h].reshape(y.shape[:-1] + (-1, sys.r))
    d = y[..., h:].reshape(y.shape[:-1] + (-1, sys.r))
    v = synthesis_level(sys, s, d)
    return np.moveaxis(v.reshape(y.shape), -1, axis)


def _filter_axis(fn, prepost, x, axis, r):
    x = np.moveaxis(x, axis, -1)
    v = x.reshape(x.shape[:-1] + (-1, r))
    out = fn(prepost, v).reshape(x.shape)
    return np.moveaxis(out, -1, axis)


@dataclass(eq=False)
class WaveletPyramid2D:
    """``approx`` is the coarsest LL band; ``details[j-1] = (LH, HL, HH)`` at level ``j``.

    Band names give the row filter first: ``LH`` is lowpass along rows and
    highpass along columns.
    """

    J: int
    approx: np.ndarray
    details: list
    mode: str
    shape0: tuple

    def energy(self):
        return float(np.sum(self.approx**2) + sum(np.sum(b**2) for lev in self.details for b in lev))

    def copy(self):
        return WaveletPyramid2D(self.J, self.approx.copy(),
                                [tuple(b.copy() for b in lev) for lev in self.details],
                                self.mode, self.shape0)


def dmwt_forward_2d(image, sys, J, mode="balanced", prepost=None):
    """Separable 2D transform: per level, all rows then all columns of the LL band."""
    mode = _check_mode(mode)
    x = np.asarray(image, dtype=float)
    if x.ndim != 2:
        raise ValueError("expected a 2D image")
    _check_length(x.shape[0], sys.r, J, "image height")
    _check_length(x.shape[1], sys.r, J, "image width")
    if mode == "balanced":
        if prepost is None:
            raise ValueError("balanced mode requires a prefilter/postfilter pair")
        x = _filter_axis(_prefilter, prepost, x, 1, sys.r)
        x = _filter_axis(_prefilter, prepost, x, 0, sys.r)
    details = []
    for _ in range(J):
        x = _scalar_level(sys, x, 1)
        x = _scalar_level(sys, x, 0)
        h, w = x.shape[0] // 2, x.shape[1] // 2
        details.append((x[h:, :w].copy(), x[:h, w:].copy(), x[h:, w:].copy()))
        x = x[:h, :w].copy()
    return WaveletPyramid2D(J=J, approx=x, details=details, mode=mode, shape0=tuple(np.shape(image)))


def dmwt_inverse_2d(pyr, sys, prepost=None):
    H, W = pyr.shape0
    if len(pyr.details) != pyr.J or pyr.approx.shape != (H >> pyr.J, W >> pyr.J):
        raise ValueError("pyramid shape is inconsistent with its original image shape")
    if pyr.mode == "balanced" and prepost is None:
        raise ValueError("balanced mode requires a prefilter/postfilter pair")
    x = pyr.approx
    for j in range(pyr.J, 0, -1):
        LH, HL, HH = pyr.details[j - 1]
        h, w = H >> j, W >> j
        if not (LH.shape == HL.shape == HH.shape == (h, w)):
            raise ValueError(f"level {j} detail bands must have shape {(h, w)}")
        y = np.block([[x, HL], [LH, HH]])
        y = _scalar_level_inv(sys, y, 0)
        x = _scalar_level_inv(sys, y, 1)
    if pyr.mode == "balanced":
        x = _filter_axis(_postfilter, prepost, x, 0, sys.r)
        x = _filter_axis(_postfilter, prepost, x, 1, sys.r)
    return x
