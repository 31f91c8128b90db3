"""Orthogonal completion of a one-lag multiscaling filter with prescribed symmetry.

For ``m = 1`` orthogonality says the block matrix ``[[H0, H1], [G0, G1]]`` is
orthogonal. An initial complement ``[G0^, G1^]`` comes from a full QR
decomposition; the final ``G_k = U G_k^`` uses an orthogonal ``U`` chosen so
that ``G_k = T G_{1-k} S``.
"""

from __future__ import annotations

import itertools

import numpy as np

SYM_TOL = 1e-10


class SymmetryError(ValueError):
    pass


def _signatures(r):
    # leading sign fixed to +1: S and -S give the same relation H1 = S H0 S
    for rest in itertools.product((1.0, -1.0), repeat=r - 1):
        yield np.array((1.0,) + rest)


def detect_symmetry(H0, H1, tol=SYM_TOL):
    """Signature ``s`` with ``H1 = diag(s) H0 diag(s)``, first entry +1."""
    H0 = np.asarray(H0, dtype=float)
    H1 = np.asarray(H1, dtype=float)
    if H0.shape != H1.shape or H0.ndim != 2 or H0.shape[0] != H0.shape[1]:
        raise ValueError("H0, H1 must be square matrices of equal size")
    for s in _signatures(H0.shape[0]):
        if np.max(np.abs(H1 - s[:, None] * H0 * s[None, :])) <= tol:
            return s
    raise SymmetryError("no diagonal +-1 signature relates H0 and H1")


def orthogonal_complement(H0, H1, tol=SYM_TOL):
    """Rows spanning the orthogonal complement of the rows of ``[H0, H1]``."""
    A = np.hstack([np.asarray(H0, float), np.asarray(H1, float)])
    r = A.shape[0]
    if np.max(np.abs(A @ A.T - np.eye(r))) > tol:
        raise ValueError("rows of [H0, H1] are not orthonormal")
    Q, _ = np.linalg.qr(A.T, mode="complete")
    C = Q[:, r:].T
    return C[:, :r], C[:, r:]


def _orient_rows(G0, G1):
    """Make the largest-magnitude entry of each row of G0 positive (G1 if that row of G0 is zero)."""
    G0 = G0.copy()
    G1 = G1.copy()
    for i in range(G0.shape[0]):
        row = G0[i] if np.max(np.abs(G0[i])) > SYM_TOL else G1[i]
        j = int(np.argmax(np.abs(row) - 1e-12 * np.arange(len(row))))
        if row[j] < 0:
            G0[i] *= -1
            G1[i] *= -1
    return G0, G1


def symmetric_completion(H0, H1, G0_hat, G1_hat, T, sym_tol=SYM_TOL):
    """Rotate the complement so the wavelet filter has symmetry signature ``T``.

    The symmetry map ``[u0, u1] -> [u1 S, u0 S]`` leaves the complement
    invariant and acts on it as a symmetric involution ``K``. Solving
    ``U K U^T = T`` amounts to sending the eigenvectors of ``K`` to the
    coordinate axes with matching eigenvalues. ``sym_tol`` bounds the
    allowed deviation from ``H1 = S H0 S``; loosen it for factors obtained
    from a truncated iteration.
    """
    S = detect_symmetry(H0, H1, sym_tol)
    T = np.asarray(T, dtype=float)
    if not (np.array_equal(T, S) or np.array_equal(T, -S)):
        raise SymmetryError(f"T must equal S or -S (S = {S.tolist()}), got {T.tolist()}")
    C = np.hstack([G0_hat, G1_hat])
    r = C.shape[0]
    Cs = np.hstack([G1_hat * S, G0_hat * S])
    K = C @ Cs.T
    K = 0.5 * (K + K.T)
    w, V = np.linalg.eigh(K)
    pos = [i for i in range(r) if w[i] > 0]
    neg = [i for i in range(r) if w[i] <= 0]
    if sorted(np.sign(w).tolist()) != sorted(np.sign(T).tolist()):
        raise SymmetryError("complement has no rotation with the requested symmetry")
    U = np.zeros((r, r))
    for row, t in enumerate(T):
        U[row] = V[:, (pos if t > 0 else neg).pop(0)]
    G0, G1 = U @ G0_hat, U @ G1_hat
    return _orient_rows(G0, G1)


def complete(H0, H1, T=None, sym_tol=SYM_TOL, ortho_tol=SYM_TOL):
    """Complement plus symmetric rotation; ``T`` defaults to ``S``."""
    S = detect_symmetry(H0, H1, sym_tol)
    G0_hat, G1_hat = orthogonal_complement(H0, H1, ortho_tol)
    return symmetric_completion(H0, H1, G0_hat, G1_hat, S if T is None else T, sym_tol)
