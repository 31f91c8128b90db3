"""Matrix spectral factorization of one-lag half-band product filters.

Bauer's method in the Youla-Kazanjian form: the Cholesky factor of the
truncated block-tridiagonal Toeplitz matrix built from ``P_{-1}, P_0, P_1``
converges (in its last block row) to the causal spectral factor. Its
diagonal block obeys the fixed-point recursion

    X_0 = P_0,    X_{k+1} = P_0 - P_1^T X_k^{-1} P_1,

and ``H_0 = chol(X)``, ``H_1 = P_1^T H_0^{-T}`` once ``X`` has converged.

The recursion is the default path. :func:`bauer_truncated_cholesky` runs the
banded Cholesky itself and serves as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ._accel import jit
from ._dd import dd_add, dd_div, dd_mul, dd_sub
from .polymat import (
    LaurentMatrix,
    is_halfband,
    lm_mul,
    lm_paraconj,
    max_coeff_diff,
    min_eig_on_circle,
)

CONVERGED, MAX_ITER, STALLED, SINGULAR = 0, 1, 2, 3
_STATUS_NAMES = {CONVERGED: "converged", MAX_ITER: "max_iter", STALLED: "stalled", SINGULAR: "singular"}

COND_LIMIT = 1e14
STALL_REL = 1e-16


class InadmissibleFilterError(ValueError):
    """The product filter cannot be factored (not PSD on the circle, singular iterate)."""


@dataclass(frozen=True)
class BauerState:
    X: np.ndarray
    iter: int
    residual: float
    status: int = CONVERGED
    history: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False)

    @property
    def converged(self):
        return self.status == CONVERGED

    @property
    def status_name(self):
        return _STATUS_NAMES[self.status]


@jit
def _bauer_kernel_2x2(p0, p1, tol, max_iter, window, cond_limit, hist):
    """Fixed-point recursion for r = 2 in double-double arithmetic.

    X is kept symmetric by storing only x00, x01, x11. Returns the iterate
    X_k whose residual first drops to ``tol`` (or X_max_iter), its index,
    the residual and a status code.
    """
    a00 = (p1[0, 0], 0.0)
    a01 = (p1[0, 1], 0.0)
    a10 = (p1[1, 0], 0.0)
    a11 = (p1[1, 1], 0.0)
    q00 = (p0[0, 0], 0.0)
    q01 = (0.5 * (p0[0, 1] + p0[1, 0]), 0.0)
    q11 = (p0[1, 1], 0.0)
    x00, x01, x11 = q00, q01, q11
    s00, s01, s11 = x00[0], x01[0], x11[0]
    nhist = hist.shape[0]
    res = np.inf
    for k in range(max_iter + 1):
        # singularity screen on the leading parts
        tr = x00[0] + x11[0]
        dif = x00[0] - x11[0]
        rad = np.sqrt(dif * dif + 4.0 * x01[0] * x01[0])
        lmax = 0.5 * (tr + rad)
        lmin = 0.5 * (tr - rad)
        if lmin <= 0.0 or lmax > cond_limit * lmin:
            return x00, x01, x11, k, res, 3
        det = dd_sub(dd_mul(x00, x11), dd_mul(x01, x01))
        nb = (-x01[0], -x01[1])
        # M = adj(X) P1 ; N = P1^T M
        m00 = dd_add(dd_mul(x11, a00), dd_mul(nb, a10))
        m01 = dd_add(dd_mul(x11, a01), dd_mul(nb, a11))
        m10 = dd_add(dd_mul(nb, a00), dd_mul(x00, a10))
        m11 = dd_add(dd_mul(nb, a01), dd_mul(x00, a11))
        n00 = dd_add(dd_mul(a00, m00), dd_mul(a10, m10))
        n01 = dd_add(dd_mul(a00, m01), dd_mul(a10, m11))
        n11 = dd_add(dd_mul(a01, m01), dd_mul(a11, m11))
        y00 = dd_sub(q00, dd_div(n00, det))
        y01 = dd_sub(q01, dd_div(n01, det))
        y11 = dd_sub(q11, dd_div(n11, det))
        r0 = abs(dd_sub(y00, x00)[0])
        r1 = abs(dd_sub(y01, x01)[0])
        r2 = abs(dd_sub(y11, x11)[0])
        res = max(r0, max(r1, r2))
        if k < nhist:
            hist[k] = res
        if res <= tol:
            return x00, x01, x11, k, res, 0
        if k == max_iter:
            return x00, x01, x11, k, res, 1
        x00, x01, x11 = y00, y01, y11
        if window > 0 and (k + 1) % window == 0:
            scale = max(abs(x00[0]), max(abs(x01[0]), abs(x11[0])))
            moved = max(abs(x00[0] - s00), max(abs(x01[0] - s01), abs(x11[0] - s11)))
            if moved <= STALL_REL * scale:
                return x00, x01, x11, k + 1, res, 2
            s00, s01, s11 = x00[0], x01[0], x11[0]
    return x00, x01, x11, max_iter, res, 1


@jit
def _bauer_kernel_general(p0, p1, tol, max_iter, window, cond_limit, hist):
    """Float64 fixed-point recursion for arbitrary r."""
    X = p0.copy()
    snap = X.copy()
    nhist = hist.shape[0]
    res = np.inf
    for k in range(max_iter + 1):
        if np.linalg.cond(X) > cond_limit:
            return X, k, res, 3
        Y = p0 - p1.T @ np.linalg.solve(X, p1)
        Y = 0.5 * (Y + Y.T)
        res = np.max(np.abs(Y - X))
        if k < nhist:
            hist[k] = res
        if res <= tol:
            return X, k, res, 0
        if k == max_iter:
            return X, k, res, 1
        X = Y
        if window > 0 and (k + 1) % window == 0:
            if np.max(np.abs(X - snap)) <= STALL_REL * np.max(np.abs(X)):
                return X, k + 1, res, 2
            snap = X.copy()
    return X, max_iter, res, 1


def _check_one_lag(P, admissibility_tol=1e-8):
    if P.lo < -1 or P.hi > 1:
        raise ValueError(f"only one-lag product filters (degrees -1..1) are supported, got {P.lo}..{P.hi}")
    if not is_halfband(P):
        raise ValueError("product filter is not half-band")
    if min_eig_on_circle(P) < -admissibility_tol:
        raise InadmissibleFilterError("product filter is not positive semidefinite on the unit circle")


def _run(P, tol, max_iter, window, record):
    p0 = np.ascontiguousarray(P[0], dtype=float)
    p1 = np.ascontiguousarray(P[1], dtype=float)
    hist = np.zeros(int(record))
    if P.r == 2:
        h00, h01, h11, k, res, status = _bauer_kernel_2x2(
            p0, p1, float(tol), int(max_iter), int(window), COND_LIMIT, hist)
        X = np.array([[h00[0] + h00[1], h01[0] + h01[1]],
                      [h01[0] + h01[1], h11[0] + h11[1]]])
    else:
        X, k, res, status = _bauer_kernel_general(
            p0, p1, float(tol), int(max_iter), int(window), COND_LIMIT, hist)
    return X, int(k), float(res), int(status), hist[:min(len(hist), int(k) + 1)]


def bauer_fixed_point(P, tol=1e-12, max_iter=10**7, *, stall_window=1000, record=0):
    """Iterate ``X <- P_0 - P_1^T X^{-1} P_1`` from ``X_0 = P_0``.

    Parameters
    ----------
    P : LaurentMatrix
        Half-band product filter with degrees in ``-1..1``.
    tol : float
        Stop at the first iterate with ``max|X - F(X)| <= tol``.
    max_iter : int
        Iteration budget. Convergence is sublinear when ``det P`` vanishes on
        the unit circle, so the budget is large by default.
    stall_window : int
        Abort with status "stalled" if the iterate moves by less than
        ``1e-16`` (relative) over this many steps.
    record : int
        Keep the residuals of the first ``record`` iterations.

    Returns
    -------
    BauerState

    Raises
    ------
    InadmissibleFilterError
        If an iterate becomes numerically singular.
    """
    _check_one_lag(P)
    X, k, res, status, hist = _run(P, tol, max_iter, stall_window, record)
    if status == SINGULAR:
        raise InadmissibleFilterError(f"iterate {k} is numerically singular (condition > {COND_LIMIT:g})")
    return BauerState(X=X, iter=k, residual=res, status=status, history=hist)


def bauer_iterate(P, n):
    """Exactly ``n`` steps of the recursion: returns ``X_n``."""
    _check_one_lag(P)
    X, k, _, status, _ = _run(P, -1.0, n, 0, 0)
    if status == SINGULAR:
        raise InadmissibleFilterError(f"iterate {k} is numerically singular")
    return X


def _block_tridiagonal_banded(P, n):
    """Lower banded storage of the ``(n+1)``-block truncation of ``P``."""
    r = P.r
    N = (n + 1) * r
    u = 2 * r - 1
    P0, P1 = P[0], P[1]
    ab = np.zeros((u + 1, N))
    j = np.arange(N)
    for d in range(u + 1):
        jj = j[:N - d]
        ii = jj + d
        bi, bj = ii // r, jj // r
        ai, aj = ii % r, jj % r
        vals = np.where(bi == bj, P0[ai, aj], 0.0)
        vals = np.where(bi == bj + 1, P1[aj, ai], vals)
        ab[d, :N - d] = vals
    return ab


def bauer_truncated_cholesky(P, n):
    """Last block row ``(H_1^(n), H_0^(n))`` of the Cholesky factor of ``P_n``.

    ``P_n`` is the block-tridiagonal matrix with ``n + 1`` diagonal blocks
    ``P_0``, superdiagonal ``P_1`` and subdiagonal ``P_1^T``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    _check_one_lag(P)
    r = P.r
    ab = _block_tridiagonal_banded(P, n)
    try:
        lb = scipy.linalg.cholesky_banded(ab, lower=True)
    except np.linalg.LinAlgError as exc:
        raise InadmissibleFilterError("truncated block Toeplitz matrix is not positive definite") from exc
    N = (n + 1) * r

    def entry(i, j):
        d = i - j
        return lb[d, j] if 0 <= d < lb.shape[0] else 0.0

    rows = range(N - r, N)
    H1 = np.array([[entry(i, j) for j in range(N - 2 * r, N - r)] for i in rows])
    H0 = np.array([[entry(i, j) for j in range(N - r, N)] for i in rows])
    return H1, H0


def extract_factors(X, P):
    """``H_0 = chol(X)`` (lower, positive diagonal) and ``H_1 = P_1^T H_0^{-T}``."""
    X = np.asarray(X, dtype=float)
    try:
        H0 = np.linalg.cholesky(0.5 * (X + X.T))
    except np.linalg.LinAlgError as exc:
        raise InadmissibleFilterError("X is not positive definite") from exc
    H1 = scipy.linalg.solve_triangular(H0, P[1], lower=True).T
    return H0, H1


def factor_symbol(H0, H1):
    """``H(z) = H_0 + H_1 z**-1`` as a LaurentMatrix."""
    return LaurentMatrix(np.stack([np.asarray(H1, float), np.asarray(H0, float)]), -1)


def verify_factorization(H, P):
    """``max |H(z) H(z)* - P(z)|`` over all coefficients."""
    return max_coeff_diff(lm_mul(H, lm_paraconj(H)), P)


def spectral_factor(P, tol=1e-12, max_iter=10**7):
    """Run the recursion and extract ``(H_0, H_1, state)``."""
    state = bauer_fixed_point(P, tol=tol, max_iter=max_iter)
    H0, H1 = extract_factors(state.X, P)
    return H0, H1, state
