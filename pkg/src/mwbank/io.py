"""PGM images, CSV signals, seeded Gaussian noise and piecewise test signals."""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np


class PGMError(ValueError):
    pass


# -- PGM -----------------------------------------------------------------------

_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _header_tokens(data, count):
    pos = 0
    out = []
    for _ in range(count):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise PGMError("malformed PGM header")
        out.append(m.group(1))
        pos = m.end()
    # exactly one whitespace byte separates header and raster
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise PGMError("malformed PGM header: missing separator before raster")
    return out, pos + 1


def read_pgm(path):
    """Read a binary 8-bit PGM; returns a ``(height, width)`` uint8 array."""
    data = Path(path).read_bytes()
    if data[:2] != b"P5":
        raise PGMError(f"{path}: not a binary PGM (magic {data[:2]!r})")
    toks, start = _header_tokens(data[2:], 3)
    start += 2
    try:
        w, h, maxval = (int(t) for t in toks)
    except ValueError:
        raise PGMError(f"{path}: non-numeric PGM header field") from None
    if w <= 0 or h <= 0:
        raise PGMError(f"{path}: invalid dimensions {w}x{h}")
    if maxval != 255:
        raise PGMError(f"{path}: unsupported maxval {maxval} (only 8-bit PGM is supported)")
    raster = data[start:start + w * h]
    if len(raster) < w * h:
        raise PGMError(f"{path}: truncated raster ({len(raster)} of {w * h} bytes)")
    return np.frombuffer(raster, dtype=np.uint8).reshape(h, w).copy()


def to_uint8(img):
    """Clamp to [0, 255] and round half up."""
    a = np.asarray(img, dtype=float)
    return np.floor(np.clip(a, 0, 255) + 0.5).astype(np.uint8)


def write_pgm(img, path):
    a = to_uint8(img)
    if a.ndim != 2:
        raise ValueError("PGM images must be 2D")
    h, w = a.shape
    Path(path).write_bytes(f"P5\n{w} {h}\n255\n".encode() + a.tobytes())


# -- CSV -----------------------------------------------------------------------

def read_csv(path):
    """One number per line; blank lines are skipped."""
    vals = []
    for no, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            vals.append(float(line))
        except ValueError:
            raise ValueError(f"{path}: line {no}: not a number: {line!r}") from None
    return np.array(vals)


def write_csv(values, path):
    vals = np.asarray(values, dtype=float).reshape(-1)
    Path(path).write_text("".join(f"{v:.17g}\n" for v in vals))


# -- noise and test signals ----------------------------------------------------

def gen_awgn(n, sigma, seed=0):
    """``n`` samples of N(0, sigma**2) from PCG64 via numpy's ziggurat sampler."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    rng = np.random.Generator(np.random.PCG64(seed))
    shape = n if isinstance(n, tuple) else (int(n),)
    return sigma * rng.standard_normal(shape)


def _piecewise(t, edges, pieces):
    out = np.empty_like(t)
    idx = np.searchsorted(edges, t, side="right") - 1
    for i, f in enumerate(pieces):
        sel = idx == i
        out[sel] = f(t[sel])
    return out


# Breakpoints and pieces are defined on t in [0, 1), so a signal of length 2n
# downsampled by two equals the length-n signal.

_REGULAR_EDGES = np.array([0.0, 0.12, 0.26, 0.40, 0.56, 0.70, 0.86])
_REGULAR_PIECES = (
    lambda t: 0.2 * np.exp(6 * (t - 0.12)),
    lambda t: -0.5 + 2.0 * (t - 0.12),
    lambda t: 0.1 + 0.8 * np.exp(-(((t - 0.33) / 0.03) ** 2)),
    lambda t: -0.3 + 0.25 * np.sin(2 * np.pi * (t - 0.40) / 0.16),
    lambda t: 0.6 - 4.0 * (t - 0.56),
    lambda t: -0.2 - 0.7 * np.exp(-(((t - 0.78) / 0.04) ** 2)),
    lambda t: 0.4 * np.exp(-5 * (t - 0.86)),
)

_POLY_EDGES = np.array([0.0, 0.1, 0.25, 0.4, 0.55, 0.7, 0.85])
_POLY_COEFS = ((0.1, 2.0), (-0.6, 0.0), (0.7, -3.0), (-0.2, 4.0), (0.9, 0.0), (0.3, -2.5), (-0.4, 1.5))


def gen_test_signal(kind, n):
    """Deterministic piecewise test signals with unit-order amplitude.

    ``piece_regular`` mixes exponential, Gaussian, sinusoidal and linear
    pieces separated by six jumps. ``piece_polynomial`` is piecewise linear,
    ``a + b (t - t_i)`` on each segment, with jumps at every breakpoint.
    """
    n = int(n)
    if n < 16 or n & (n - 1):
        raise ValueError(f"n must be a power of two >= 16, got {n}")
    t = np.arange(n) / n
    if kind == "piece_regular":
        return _piecewise(t, _REGULAR_EDGES, _REGULAR_PIECES)
    if kind == "piece_polynomial":
        pieces = [(lambda t, a=a, b=b, t0=t0: a + b * (t - t0))
                  for t0, (a, b) in zip(_POLY_EDGES, _POLY_COEFS)]
        return _piecewise(t, _POLY_EDGES, pieces)
    raise ValueError(f"unknown test signal {kind!r}")


def gen_test_image(kind="blobs", n=256):
    """Synthetic ``n x n`` grayscale images in [0, 255].

    ``blobs`` is a smooth gradient with Gaussian bumps; ``shapes`` adds flat
    discs and rectangles with sharp edges on a smooth background.
    """
    n = int(n)
    if n < 16:
        raise ValueError("n must be >= 16")
    y, x = np.mgrid[0:n, 0:n] / n
    img = 60 + 80 * x + 40 * np.sin(2 * np.pi * y)
    for cx, cy, rad, amp in ((0.3, 0.3, 0.08, 70), (0.7, 0.4, 0.12, -50), (0.45, 0.75, 0.1, 60)):
        img += amp * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2 * rad**2))
    if kind == "shapes":
        img[(x - 0.65) ** 2 + (y - 0.7) ** 2 < 0.15**2] = 220
        img[(x > 0.1) & (x < 0.35) & (y > 0.55) & (y < 0.9)] = 30
        img[(x > 0.55) & (x < 0.9) & (y > 0.1) & (y < 0.25)] = 180
    elif kind != "blobs":
        raise ValueError(f"unknown test image {kind!r}")
    return np.clip(img, 0, 255)
