"""Multiwavelet systems: validation, reference banks, cascade evaluation, files.

A system holds the matrix refinement coefficients ``H_k``, ``G_k``
(``k = 0..m``) of

    phi(t) = sqrt(2) sum_k H_k phi(2t - k),   psi(t) = sqrt(2) sum_k G_k phi(2t - k).

Non-orthogonal systems are allowed; the ``orthogonal`` flag records whether
the orthonormality conditions hold.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .polymat import LaurentMatrix, lm_mul, lm_paraconj

ORTHO_TOL = 1e-10
SYM_TOL = 1e-10


class FormatError(ValueError):
    """Malformed coefficient file."""


class CascadeDivergence(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class MultiwaveletSystem:
    name: str
    H: np.ndarray  # (m + 1, r, r)
    G: np.ndarray
    S: Optional[np.ndarray] = None
    T: Optional[np.ndarray] = None
    orthogonal: bool = False

    @property
    def r(self):
        return self.H.shape[1]

    @property
    def m(self):
        return self.H.shape[0] - 1

    def symbol(self, which="H"):
        """``H(z) = sum_k H_k z**-k`` (or G) as a LaurentMatrix."""
        C = self.H if which == "H" else self.G
        return LaurentMatrix(C[::-1], -self.m)

    def analysis_matrix(self):
        """Block matrix ``[[H_0 .. H_m], [G_0 .. G_m]]``."""
        return np.vstack([np.hstack(list(self.H)), np.hstack(list(self.G))])

    def __repr__(self):
        return f"MultiwaveletSystem({self.name!r}, r={self.r}, m={self.m}, orthogonal={self.orthogonal})"


def orthogonality_defect(H, G):
    """Largest violation of the orthonormality conditions over all even lags."""
    Hs = LaurentMatrix(np.asarray(H)[::-1], -(len(H) - 1))
    Gs = LaurentMatrix(np.asarray(G)[::-1], -(len(G) - 1))
    r = Hs.r
    worst = 0.0
    for A, B, target in ((Hs, Hs, np.eye(r)), (Gs, Gs, np.eye(r)), (Hs, Gs, np.zeros((r, r)))):
        prod = lm_mul(A, lm_paraconj(B))
        for k in range(min(prod.lo, 0), max(prod.hi, 0) + 1):
            if k % 2:
                continue
            ref = target if k == 0 else 0.0
            worst = max(worst, float(np.max(np.abs(prod[k] - ref))))
    return worst


def _find_signature(pred, r, leading_plus):
    for signs in itertools.product((1.0, -1.0), repeat=r):
        s = np.array(signs)
        if leading_plus and s[0] < 0:
            continue
        if pred(s):
            return s
    return None


def detect_system_symmetry(H, G, tol=SYM_TOL):
    """``(S, T)`` with ``H_k = S H_{m-k} S`` and ``G_k = T G_{m-k} S``; None where absent."""
    m = len(H) - 1
    r = H.shape[1]

    def h_ok(s):
        return all(np.max(np.abs(H[k] - s[:, None] * H[m - k] * s[None, :])) <= tol for k in range(m + 1))

    S = _find_signature(h_ok, r, leading_plus=True)
    if S is None:
        return None, None

    def g_ok(t):
        return all(np.max(np.abs(G[k] - t[:, None] * G[m - k] * S[None, :])) <= tol for k in range(m + 1))

    return S, _find_signature(g_ok, r, leading_plus=False)


def build_system(H, G, name="system"):
    """Validate shapes, then detect orthogonality and symmetry."""
    H = np.array(H, dtype=float)
    G = np.array(G, dtype=float)
    if H.ndim != 3 or H.shape[1] != H.shape[2]:
        raise ValueError(f"H must have shape (m+1, r, r), got {H.shape}")
    if G.shape != H.shape:
        raise ValueError(f"G shape {G.shape} does not match H shape {H.shape}")
    H.setflags(write=False)
    G.setflags(write=False)
    S, T = detect_system_symmetry(H, G)
    ortho = orthogonality_defect(H, G) <= ORTHO_TOL
    return MultiwaveletSystem(name=name, H=H, G=G, S=S, T=T, orthogonal=ortho)


def _sa1_coefficients(root3):
    c = math.sqrt(2) / 4
    H = c * np.array([[[2, 0], [root3, 1]], [[2, 0], [-root3, 1]]], dtype=float)
    G = c * np.array([[[0, 2], [-1, root3]], [[0, -2], [1, root3]]], dtype=float)
    return H, G


def sa1():
    """The supercompact symmetric/antisymmetric orthogonal multiwavelet."""
    return build_system(*_sa1_coefficients(math.sqrt(3)), name="SA1")


def quantized_sa1(b0):
    """SA1 with ``sqrt(3)`` replaced by its ``b0``-bit dyadic approximation."""
    from .lifting import dyadic_approx

    q = dyadic_approx(b0).value
    return build_system(*_sa1_coefficients(q), name=f"SA1-q{b0}")


def haar():
    """Scalar Haar as an r = 1 system."""
    h = 1 / math.sqrt(2)
    return build_system([[[h]], [[h]]], [[[h]], [[-h]]], name="Haar")


@dataclass(frozen=True, eq=False)
class SampledFunctions:
    """``phi``/``psi`` on ``t_i = i 2**-level``, ``i = 0 .. m 2**level``.

    Support is taken half-open, ``[0, m)``: values are right-continuous and
    the sample at ``t = m`` is zero.
    """

    level: int
    phi: np.ndarray
    psi: np.ndarray
    iterations: int

    @property
    def grid(self):
        return np.arange(self.phi.shape[1]) * 2.0**-self.level


def _refine(coeffs, f, step):
    """``sqrt(2) sum_k C_k f(2t - k)`` on the grid with spacing ``2**-L``."""
    n = f.shape[1]
    i = np.arange(n)
    out = np.zeros((coeffs.shape[1], n))
    for k, C in enumerate(coeffs):
        idx = 2 * i - k * step
        ok = (idx >= 0) & (idx < n - 1)
        out[:, ok] += C @ f[:, idx[ok]]
    return math.sqrt(2) * out


def cascade_eval(sys, L=8, tol=1e-13, max_iter=500, blowup=1e6):
    """Cascade iteration from vector box functions on a level-``L`` grid."""
    step = 2**L
    n = sys.m * step + 1
    f = np.zeros((sys.r, n))
    f[:, :step] = 1.0
    for it in range(1, max_iter + 1):
        g = _refine(sys.H, f, step)
        peak = np.max(np.abs(g))
        if not np.isfinite(peak) or peak > blowup:
            raise CascadeDivergence(f"cascade diverged at iteration {it} (sup norm {peak:.3g})")
        delta = np.max(np.abs(g - f))
        f = g
        if delta < tol:
            break
    else:
        raise CascadeDivergence(f"cascade did not settle within {max_iter} iterations")
    return SampledFunctions(level=L, phi=f, psi=_refine(sys.G, f, step), iterations=it)


# -- coefficient files ---------------------------------------------------------

def _fmt_row(row):
    return " ".join(f"{v:.17g}" for v in row)


def save_system(sys, path):
    lines = ["MWSYS 1", f"name {sys.name}", f"r {sys.r} m {sys.m}"]
    for label, mats in (("H", sys.H), ("G", sys.G)):
        for k, M in enumerate(mats):
            lines.append(f"{label} {k}")
            lines.extend(_fmt_row(row) for row in M)
    if sys.S is not None:
        lines.append("S " + " ".join(str(int(v)) for v in sys.S))
    if sys.T is not None:
        lines.append("T " + " ".join(str(int(v)) for v in sys.T))
    Path(path).write_text("\n".join(lines) + "\n")


def _content_lines(text):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _read_block(lines, pos, label, k, r, m):
    if pos >= len(lines):
        raise FormatError(f"unexpected end of file: missing section '{label} {k}'")
    no, line = lines[pos]
    if line.split() != [label, str(k)]:
        raise FormatError(f"line {no}: expected '{label} {k}', got {line!r}")
    rows = []
    for i in range(r):
        pos += 1
        if pos >= len(lines):
            raise FormatError(f"unexpected end of file in section '{label} {k}' (row {i + 1} of {r})")
        no, line = lines[pos]
        try:
            vals = [float(tok) for tok in line.split()]
        except ValueError:
            raise FormatError(f"line {no}: non-numeric entry in section '{label} {k}'") from None
        if len(vals) != r:
            raise FormatError(f"line {no}: expected {r} numbers, got {len(vals)}")
        rows.append(vals)
    return np.array(rows), pos + 1


def load_system(path):
    text = Path(path).read_text()
    lines = list(_content_lines(text))
    if not lines or lines[0][1].split() != ["MWSYS", "1"]:
        no = lines[0][0] if lines else 1
        raise FormatError(f"line {no}: missing 'MWSYS 1' header")
    if len(lines) < 2 or not lines[1][1].startswith("name"):
        raise FormatError("missing section 'name'")
    name = lines[1][1][4:].strip() or "system"
    if len(lines) < 3:
        raise FormatError("missing section 'r <int> m <int>'")
    no, line = lines[2]
    tok = line.split()
    if len(tok) != 4 or tok[0] != "r" or tok[2] != "m":
        raise FormatError(f"line {no}: expected 'r <int> m <int>', got {line!r}")
    try:
        r, m = int(tok[1]), int(tok[3])
    except ValueError:
        raise FormatError(f"line {no}: r and m must be integers") from None
    if r < 1 or m < 0:
        raise FormatError(f"line {no}: need r >= 1 and m >= 0")
    pos = 3
    mats = {"H": [], "G": []}
    for label in ("H", "G"):
        for k in range(m + 1):
            M, pos = _read_block(lines, pos, label, k, r, m)
            mats[label].append(M)
    declared = {}
    for no, line in lines[pos:]:
        tok = line.split()
        if tok[0] not in ("S", "T") or len(tok) != r + 1:
            raise FormatError(f"line {no}: unexpected content {line!r}")
        try:
            signs = np.array([float(int(v)) for v in tok[1:]])
        except ValueError:
            raise FormatError(f"line {no}: signature entries must be +1 or -1") from None
        if not np.all(np.abs(signs) == 1):
            raise FormatError(f"line {no}: signature entries must be +1 or -1")
        declared[tok[0]] = signs
    sys = build_system(np.array(mats["H"]), np.array(mats["G"]), name=name)
    S, T = sys.S, sys.T
    if "S" in declared:
        S = declared["S"]
        if not all(np.allclose(sys.H[k], S[:, None] * sys.H[m - k] * S[None, :], atol=SYM_TOL, rtol=0)
                   for k in range(m + 1)):
            warnings.warn(f"{path}: declared S does not hold; ignoring it")
            S = None
    if "T" in declared:
        T = declared["T"]
        if S is None or not all(
                np.allclose(sys.G[k], T[:, None] * sys.G[m - k] * S[None, :], atol=SYM_TOL, rtol=0)
                for k in range(m + 1)):
            warnings.warn(f"{path}: declared T does not hold; ignoring it")
            T = None
    if not sys.orthogonal:
        warnings.warn(f"{path}: system is not orthogonal")
    return MultiwaveletSystem(name=sys.name, H=sys.H, G=sys.G, S=S, T=T, orthogonal=sys.orthogonal)
