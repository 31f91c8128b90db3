"""Vector shrinkage of multiwavelet detail coefficients.

Each detail ``r``-vector ``d`` is measured by the whitened statistic
``w = sqrt(d^T Y^{-1} d)``, which is in units of the noise standard
deviation. A threshold ``lam`` given in intensity units is therefore
compared against ``w`` as ``lam / sigma``; for ``Y = sigma**2 I`` this is
the same as comparing ``|d|`` with ``lam``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .transform import (
    WaveletPyramid,
    WaveletPyramid2D,
    dmwt_forward_1d,
    dmwt_forward_2d,
    dmwt_inverse_2d,
)

MAD_SCALE = 0.6745
MC_SAMPLES = 10**4


class ShrinkRule(enum.Enum):
    HARD = "hard"
    SOFT = "soft"

    @classmethod
    def parse(cls, rule):
        if isinstance(rule, cls):
            return rule
        try:
            return cls(str(rule).lower())
        except ValueError:
            raise ValueError(f"rule must be 'hard' or 'soft', got {rule!r}") from None


@dataclass(frozen=True, eq=False)
class NoiseModel:
    """Noise level and per-level detail covariances.

    ``Y[j-1]`` is the detail-vector covariance at level ``j`` in intensity
    units; ``None`` means ``sigma**2 I`` at every level.
    """

    sigma: float
    known: bool = True
    Y: Optional[Sequence[np.ndarray]] = None

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be > 0")
        if self.Y is not None:
            for j, Yj in enumerate(self.Y, start=1):
                Yj = np.asarray(Yj, dtype=float)
                if np.max(np.abs(Yj - Yj.T)) > 1e-12 * max(1.0, np.max(np.abs(Yj))):
                    raise ValueError(f"Y at level {j} is not symmetric")
                if np.min(np.linalg.eigvalsh(Yj)) <= 0:
                    raise ValueError(f"Y at level {j} is not positive definite")

    def covariance(self, level, r=2):
        if self.Y is None:
            return self.sigma**2 * np.eye(r)
        return np.asarray(self.Y[level - 1], dtype=float)


def universal_threshold(sigma, N):
    """``sigma * sqrt(2 ln N)``."""
    if not sigma > 0:
        raise ValueError("sigma must be > 0")
    if N < 2:
        raise ValueError("N must be >= 2")
    return sigma * math.sqrt(2 * math.log(N))


def whiten_stat(d, Y):
    """``sqrt(d^T Y^{-1} d)`` over the last axis of ``d``."""
    d = np.asarray(d, dtype=float)
    Y = np.asarray(Y, dtype=float)
    try:
        L = np.linalg.cholesky(Y)
    except np.linalg.LinAlgError:
        raise ValueError("Y must be symmetric positive definite") from None
    z = np.linalg.solve(L, d.reshape(-1, d.shape[-1]).T)
    return np.sqrt(np.sum(z**2, axis=0)).reshape(d.shape[:-1])


def shrink_vectors(D, Y, t, rule):
    """Shrink vectors ``D[..., :]`` against a threshold ``t`` on the whitened statistic."""
    rule = ShrinkRule.parse(rule)
    w = whiten_stat(D, Y)
    keep = w >= t
    if rule is ShrinkRule.HARD:
        factor = keep.astype(float)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            factor = np.where(keep & (w > 0), (w - t) / w, 0.0)
    return D * factor[..., None]


def _band_vectors(band, r):
    # 2D detail vectors are consecutive r-tuples along rows
    return band.reshape(band.shape[0], -1, r)


def vector_shrink(pyr, model, lam, rule):
    """Threshold every detail vector; the coarse approximation is left alone.

    ``lam`` is in intensity units (see the module docstring).
    """
    rule = ShrinkRule.parse(rule)
    t = lam / model.sigma
    out = pyr.copy()
    if isinstance(pyr, WaveletPyramid):
        r = pyr.s.shape[1]
        out.d = [shrink_vectors(dj, model.covariance(j, r), t, rule) for j, dj in enumerate(pyr.d, start=1)]
        return out
    r = 2 if model.Y is None else np.asarray(model.Y[0]).shape[0]
    new = []
    for j, bands in enumerate(pyr.details, start=1):
        Yj = model.covariance(j, r)
        new.append(tuple(shrink_vectors(_band_vectors(b, r), Yj, t, rule).reshape(b.shape) for b in bands))
    out.details = new
    return out


def _level1_details(pyr):
    if isinstance(pyr, WaveletPyramid):
        parts = [pyr.d[0]] if pyr.d else []
    else:
        parts = list(pyr.details[0]) if pyr.details else []
    vals = np.concatenate([np.ravel(p) for p in parts]) if parts else np.empty(0)
    if vals.size == 0:
        raise ValueError("pyramid has no level-1 details")
    return vals


def estimate_sigma_mad(pyr):
    """``median(|level-1 details|) / 0.6745``."""
    return float(np.median(np.abs(_level1_details(pyr))) / MAD_SCALE)


def estimate_detail_covariance(sys, shape, J, mode="balanced", prepost=None,
                               samples=MC_SAMPLES, seed=0):
    """Monte Carlo detail covariance for unit white noise, one matrix per level.

    Uses enough independent noise fields (each with its own spawned seed) to
    collect at least ``samples`` detail vectors at the coarsest level. 2D
    fields are drawn on a tile of at most 64x64 pixels; with periodic
    extension the detail covariance is shift-invariant, so the tile gives
    the same statistics as the full image.
    """
    r = sys.r
    if isinstance(shape, int) or len(shape) == 1:
        n = int(shape if isinstance(shape, int) else shape[0])
        tile = (n,)
    else:
        unit = r * 2**J
        tile = tuple(min(s, max(unit, 64 // unit * unit)) for s in shape)
    if len(tile) == 1:
        per_draw = tile[0] // (r * 2**J)
    else:
        per_draw = 3 * (tile[0] >> J) * (tile[1] >> J) // r
    draws = max(1, math.ceil(samples / per_draw))
    acc = [np.zeros((r, r)) for _ in range(J)]
    counts = [0] * J
    for child in np.random.SeedSequence(seed).spawn(draws):
        noise = np.random.default_rng(child).standard_normal(tile)
        if len(tile) == 1:
            pyr = dmwt_forward_1d(noise, sys, J, mode, prepost)
            per_level = pyr.d
        else:
            pyr = dmwt_forward_2d(noise, sys, J, mode, prepost)
            per_level = [np.concatenate([_band_vectors(b, r).reshape(-1, r) for b in lev]) for lev in pyr.details]
        for j, V in enumerate(per_level):
            acc[j] += V.T @ V
            counts[j] += len(V)
    return [0.5 * (A + A.T) / c for A, c in zip(acc, counts)]


def denoise_image(img, sys, J, rule, model, mode="balanced", prepost=None, lam=None, seed=0):
    """Prefilter, forward 2D transform, vector shrinkage, inverse, postfilter.

    ``lam`` defaults to the universal threshold with ``N`` the pixel count.
    If ``model.known`` is False, sigma is re-estimated from the level-1
    details. Without explicit covariances, non-balanced mode and
    non-orthogonal systems use a Monte Carlo covariance estimate.
    The result is not clamped; clamping happens when writing the image.
    """
    x = np.asarray(img, dtype=float)
    pyr = dmwt_forward_2d(x, sys, J, mode, prepost)
    if not model.known:
        model = NoiseModel(sigma=estimate_sigma_mad(pyr), known=True, Y=model.Y)
    if model.Y is None and (mode != "balanced" or not sys.orthogonal):
        unit = estimate_detail_covariance(sys, x.shape, J, mode, prepost, seed=seed)
        model = NoiseModel(sigma=model.sigma, known=True, Y=[model.sigma**2 * Yj for Yj in unit])
    if lam is None:
        lam = universal_threshold(model.sigma, x.size)
    return dmwt_inverse_2d(vector_shrink(pyr, model, lam, rule), sys, prepost)
