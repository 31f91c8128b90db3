"""Coding gain, MSE/PSNR and sup-norm error."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg


@dataclass(frozen=True)
class CGModel:
    """AR(1) source with correlation ``rho`` seen through ``block``-sample blocks."""

    rho: float = 0.95
    block: int = 4

    def __post_init__(self):
        if not abs(self.rho) < 1:
            raise ValueError("|rho| must be < 1")
        if self.block < 1:
            raise ValueError("block must be positive")

    def autocorrelation(self):
        return scipy.linalg.toeplitz(self.rho ** np.arange(self.block))


def channel_variances(W, model=CGModel()):
    """Diagonal of ``W R W^T``."""
    W = np.asarray(W, dtype=float)
    R = model.autocorrelation()
    if W.shape != R.shape:
        raise ValueError(f"analysis matrix {W.shape} does not match block size {model.block}")
    return np.einsum("ij,jk,ik->i", W, R, W)


def coding_gain_matrix(W, model=CGModel(), normalize=False):
    """``10 log10(AM/GM)`` of the channel variances, in dB.

    With ``normalize=True`` each row of ``W`` is scaled to unit norm first,
    which only matters for non-orthogonal banks.
    """
    W = np.asarray(W, dtype=float)
    if normalize:
        W = W / np.linalg.norm(W, axis=1, keepdims=True)
    var = channel_variances(W, model)
    if np.any(var <= 0):
        raise ValueError("channel variances must be positive")
    am = np.mean(var)
    gm = math.exp(np.mean(np.log(var)))
    return 10 * math.log10(am / gm)


def coding_gain(sys, model=CGModel(), normalize=False):
    """Coding gain of the one-level polyphase block ``[[H0, H1], [G0, G1]]``."""
    if sys.r != 2 or sys.m != 1:
        raise ValueError("coding_gain supports r = 2, m = 1 systems")
    if model.block != 4:
        raise ValueError("block size must be 4 for an r = 2, m = 1 system")
    return coding_gain_matrix(sys.analysis_matrix(), model, normalize)


def _same_shape(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a, b


def mse(a, b):
    a, b = _same_shape(a, b)
    return float(np.mean((a - b) ** 2))


def psnr(a, b, peak=255.0):
    """PSNR in dB; ``inf`` for identical inputs."""
    e = mse(a, b)
    if e == 0:
        return math.inf
    return 10 * math.log10(peak**2 / e)


def sup_error(s, s_hat):
    s, s_hat = _same_shape(s, s_hat)
    if s.size == 0:
        return 0.0
    return float(np.max(np.abs(s - s_hat)))
