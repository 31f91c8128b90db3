"""Matrix-valued Laurent polynomials with real coefficients.

A :class:`LaurentMatrix` stores ``A(z) = sum_k A_k z**k`` for ``k`` in
``[lo, hi]`` as a dense ``(hi - lo + 1, r, r)`` array. Filter symbols such as
``H(z) = H_0 + H_1 z**-1`` therefore put ``H_1`` at degree ``-1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-10


def _trim(coeffs, lo):
    """Drop exactly-zero leading/trailing coefficient blocks."""
    nonzero = np.flatnonzero(np.any(coeffs.reshape(len(coeffs), -1) != 0, axis=1))
    if len(nonzero) == 0:
        return coeffs[:1] * 0, 0
    first, last = nonzero[0], nonzero[-1]
    return coeffs[first:last + 1], lo + first


@dataclass(frozen=True, eq=False)
class LaurentMatrix:
    """Square matrix Laurent polynomial.

    Parameters
    ----------
    coeffs : array_like, shape (n, r, r)
        Coefficient matrices for degrees ``lo, lo + 1, ..., lo + n - 1``.
    lo : int
        Lowest degree.
    """

    coeffs: np.ndarray
    lo: int = 0

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim == 2:
            c = c[None]
        if c.ndim != 3 or c.shape[1] != c.shape[2] or c.shape[1] < 1 or c.shape[0] < 1:
            raise ValueError(f"coefficients must have shape (n, r, r), got {c.shape}")
        c, lo = _trim(c, int(self.lo))
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "lo", lo)

    @classmethod
    def from_dict(cls, terms, r=None):
        """Build from ``{degree: matrix}``."""
        if not terms:
            if r is None:
                raise ValueError("empty polynomial needs r")
            return cls.zeros(r)
        lo, hi = min(terms), max(terms)
        mats = {k: np.atleast_2d(np.asarray(v, dtype=float)) for k, v in terms.items()}
        r = next(iter(mats.values())).shape[0]
        c = np.zeros((hi - lo + 1, r, r))
        for k, v in mats.items():
            c[k - lo] = v
        return cls(c, lo)

    @classmethod
    def identity(cls, r, shift=0):
        return cls(np.eye(r)[None], shift)

    @classmethod
    def zeros(cls, r):
        return cls(np.zeros((1, r, r)), 0)

    @property
    def r(self):
        return self.coeffs.shape[1]

    @property
    def hi(self):
        return self.lo + len(self.coeffs) - 1

    def __getitem__(self, k):
        """Coefficient of ``z**k`` (zero outside the stored range)."""
        if self.lo <= k <= self.hi:
            return self.coeffs[k - self.lo]
        return np.zeros((self.r, self.r))

    def terms(self):
        return {self.lo + i: c for i, c in enumerate(self.coeffs)}

    def __call__(self, z):
        """Evaluate at a complex point ``z``."""
        z = complex(z)
        out = np.zeros((self.r, self.r), dtype=complex)
        for k, c in self.terms().items():
            out += c * z**k
        return out

    def __add__(self, other):
        return lm_add(self, other)

    def __sub__(self, other):
        return lm_add(self, lm_scale(other, -1.0))

    def __matmul__(self, other):
        return lm_mul(self, other)

    def __repr__(self):
        return f"LaurentMatrix(r={self.r}, lo={self.lo}, hi={self.hi})"


@dataclass(frozen=True, eq=False)
class LaurentScalar:
    """Scalar Laurent polynomial ``sum_k c_k z**k`` for ``k`` in ``[lo, hi]``."""

    coeffs: np.ndarray
    lo: int = 0

    def __post_init__(self):
        c = np.atleast_1d(np.array(self.coeffs, dtype=float))
        if c.ndim != 1:
            raise ValueError("scalar coefficients must be one-dimensional")
        m, lo = _trim(c[:, None, None], int(self.lo))
        c = m[:, 0, 0].copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "lo", lo)

    @property
    def hi(self):
        return self.lo + len(self.coeffs) - 1

    def __getitem__(self, k):
        if self.lo <= k <= self.hi:
            return float(self.coeffs[k - self.lo])
        return 0.0

    def __mul__(self, other):
        return LaurentScalar(np.convolve(self.coeffs, other.coeffs), self.lo + other.lo)

    def __add__(self, other):
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        c = np.zeros(hi - lo + 1)
        c[self.lo - lo:self.hi - lo + 1] += self.coeffs
        c[other.lo - lo:other.hi - lo + 1] += other.coeffs
        return LaurentScalar(c, lo)

    def __neg__(self):
        return LaurentScalar(-self.coeffs, self.lo)

    def __sub__(self, other):
        return self + (-other)

    def __repr__(self):
        return f"LaurentScalar(lo={self.lo}, coeffs={list(self.coeffs)})"


def lm_add(A, B):
    if A.r != B.r:
        raise ValueError(f"channel count mismatch: {A.r} vs {B.r}")
    lo = min(A.lo, B.lo)
    hi = max(A.hi, B.hi)
    c = np.zeros((hi - lo + 1, A.r, A.r))
    c[A.lo - lo:A.hi - lo + 1] += A.coeffs
    c[B.lo - lo:B.hi - lo + 1] += B.coeffs
    return LaurentMatrix(c, lo)


def lm_scale(A, s):
    return LaurentMatrix(A.coeffs * s, A.lo)


def lm_mul(A, B):
    """Product ``A(z) B(z)``; coefficient ``k`` is ``sum_j A_j B_{k-j}``."""
    if A.r != B.r:
        raise ValueError(f"channel count mismatch: {A.r} vs {B.r}")
    na, nb = len(A.coeffs), len(B.coeffs)
    c = np.zeros((na + nb - 1, A.r, A.r))
    for i in range(na):
        c[i:i + nb] += np.einsum("ij,kjl->kil", A.coeffs[i], B.coeffs)
    return LaurentMatrix(c, A.lo + B.lo)


def lm_paraconj(A):
    """Para-conjugate ``A(z)* = sum_k A_k^T z**-k``."""
    c = np.transpose(A.coeffs[::-1], (0, 2, 1))
    return LaurentMatrix(c, -A.hi)


def lm_alternate(A):
    """``A(-z)``: negate odd-degree coefficients."""
    signs = np.array([(-1) ** ((A.lo + i) % 2) for i in range(len(A.coeffs))], dtype=float)
    return LaurentMatrix(A.coeffs * signs[:, None, None], A.lo)


def max_coeff_diff(A, B):
    """Largest absolute coefficient difference over all degrees."""
    D = lm_add(A, lm_scale(B, -1.0))
    return float(np.max(np.abs(D.coeffs)))


def _entry(A, i, j):
    return LaurentScalar(A.coeffs[:, i, j], A.lo)


def lm_det(A):
    """Determinant as a :class:`LaurentScalar` (cofactor expansion, ``r <= 3``)."""
    r = A.r
    if r > 3:
        raise ValueError("determinant implemented for r <= 3 only")
    e = [[_entry(A, i, j) for j in range(r)] for i in range(r)]
    if r == 1:
        return e[0][0]
    if r == 2:
        return e[0][0] * e[1][1] - e[0][1] * e[1][0]
    total = LaurentScalar([0.0])
    for j in range(3):
        rows = [1, 2]
        cols = [c for c in range(3) if c != j]
        minor = e[rows[0]][cols[0]] * e[rows[1]][cols[1]] - e[rows[0]][cols[1]] * e[rows[1]][cols[0]]
        term = e[0][j] * minor
        total = total + term if j % 2 == 0 else total - term
    return total


def is_halfband(P, tol=DEFAULT_TOL):
    """True when ``P_0 = I`` and every other even-degree coefficient vanishes."""
    if np.max(np.abs(P[0] - np.eye(P.r))) > tol:
        return False
    for k in range(P.lo, P.hi + 1):
        if k != 0 and k % 2 == 0 and np.max(np.abs(P[k])) > tol:
            return False
    return True


def is_parahermitian(P, tol=DEFAULT_TOL):
    return max_coeff_diff(P, lm_paraconj(P)) <= tol


def min_eig_on_circle(P, grid_size=1024, tol=DEFAULT_TOL):
    """Smallest eigenvalue of ``P(e^{iw})`` over ``grid_size`` equispaced ``w``.

    Raises
    ------
    ValueError
        If ``P`` is not para-Hermitian within ``tol``.
    """
    if not is_parahermitian(P, tol):
        raise ValueError("min_eig_on_circle needs a para-Hermitian polynomial")
    w = 2 * np.pi * np.arange(grid_size) / grid_size
    degrees = np.arange(P.lo, P.hi + 1)
    phase = np.exp(1j * np.outer(w, degrees))
    vals = np.einsum("gk,kij->gij", phase, P.coeffs)
    vals = 0.5 * (vals + np.conj(np.transpose(vals, (0, 2, 1))))
    return float(np.min(np.linalg.eigvalsh(vals)))
