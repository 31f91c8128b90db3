"""Lifting implementation of the SA1 one-level analysis block.

The 4x4 block ``y = (P L U) x`` acts on ``x = (s_{2l}, s_{2l+1})`` (two
consecutive 2-vectors) and yields ``sqrt(2) * (h0.x, h1.x, g0.x, g1.x)``.
``L`` and ``U`` are split into unit-triangular shears plus one scale by 4,
so the transform can be run in floating point, with dyadic coefficients,
or integer-to-integer with a floor in every shear.

Dyadic coefficients ``k 2**-b`` are applied multiplierlessly: ``k`` is
written in canonical signed-digit form and ``x * k`` becomes a sum of
shifted copies of ``x``, followed by one arithmetic right shift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._accel import HAVE_NUMBA, jit
from .polymat import lm_alternate, lm_mul, lm_paraconj, lm_add

SQRT3 = math.sqrt(3.0)


# -- dyadic approximation and CSD ----------------------------------------------

def csd_digits(k):
    """Canonical signed-digit (non-adjacent form) digits of ``k``.

    Returns a list of ``(position, sign)`` with ``k = sum sign * 2**position``,
    lowest position first.
    """
    k = int(k)
    out = []
    pos = 0
    while k != 0:
        if k & 1:
            d = 2 - (k & 3)  # +1 if k = 1 mod 4, -1 if k = 3 mod 4
            out.append((pos, d))
            k -= d
        k >>= 1
        pos += 1
    return out


def csd_adders(k):
    """Adder count of a shift-add multiplier by ``k``: nonzero CSD digits minus one."""
    return max(len(csd_digits(k)) - 1, 0)


def round_sqrt3_mantissa(b0):
    """``round(sqrt(3) * 2**b0)`` computed exactly with integer arithmetic."""
    n = 3 * 4**b0
    k = math.isqrt(n)
    # round up when (k + 1/2)**2 < n
    return k + 1 if (2 * k + 1) ** 2 < 4 * n else k


@dataclass(frozen=True)
class DyadicApprox:
    b0: int
    k: int
    value: float
    error: float
    adders: int


def dyadic_approx(b0):
    """Approximate ``sqrt(3)`` by ``k 2**-b0``."""
    if b0 < 1:
        raise ValueError("b0 must be >= 1")
    k = round_sqrt3_mantissa(b0)
    value = k / 2.0**b0
    return DyadicApprox(b0=b0, k=k, value=value, error=SQRT3 - value, adders=csd_adders(k))


def shift_add_multiply(x, k, b0):
    """``floor(x * k / 2**b0)`` using only shifts and adds over the CSD digits of ``k``."""
    x = int(x)
    acc = 0
    for pos, sign in csd_digits(k):
        if sign > 0:
            acc += x << pos
        else:
            acc -= x << pos
    return acc >> b0


# -- plan ----------------------------------------------------------------------

@dataclass(frozen=True)
class Coef:
    """Lifting coefficient; ``num * 2**-shift`` when dyadic."""

    value: float
    num: Optional[int] = None
    shift: Optional[int] = None


@dataclass(frozen=True)
class Shear:
    target: int
    sources: tuple  # of (index, Coef)


@dataclass(frozen=True)
class Scale:
    target: int
    factor: int  # power of two


@dataclass(frozen=True)
class LiftingPlan:
    perm: tuple  # y[i] = v[perm[i]]
    steps: tuple
    rounding: str = "none"
    encoding: str = "exact"
    b0: Optional[int] = None

    @property
    def dyadic(self):
        return self.encoding == "dyadic"

    def matrix(self):
        """Composed linear map (rounding ignored)."""
        return _apply_float(self, np.eye(4).T, inverse=False, rounding="none").T


def _coefficients(encoding, b0):
    """The six distinct non-unit coefficients used by the SA1 plan."""
    if encoding == "exact":
        return {
            "1": Coef(1.0, 1, 0), "-1": Coef(-1.0, -1, 0),
            "1/2": Coef(0.5, 1, 1), "-1/2": Coef(-0.5, -1, 1),
            "r3": Coef(SQRT3), "-r3": Coef(-SQRT3), "r3/2": Coef(SQRT3 / 2),
        }
    k = round_sqrt3_mantissa(b0)
    return {
        "1": Coef(1.0, 1, 0), "-1": Coef(-1.0, -1, 0),
        "1/2": Coef(0.5, 1, 1), "-1/2": Coef(-0.5, -1, 1),
        "r3": Coef(k / 2.0**b0, k, b0), "-r3": Coef(-k / 2.0**b0, -k, b0),
        "r3/2": Coef(k / 2.0**(b0 + 1), k, b0 + 1),
    }


def sa1_lifting_plan(encoding="exact", rounding="none", b0=None):
    """Shear/scale steps of the SA1 PLU factorization.

    Parameters
    ----------
    encoding : {"exact", "dyadic"}
        ``"dyadic"`` replaces ``sqrt(3)`` by ``round(sqrt(3) 2**b0) 2**-b0``.
    rounding : {"none", "floor"}
        ``"floor"`` floors every shear update (integer-to-integer mode).
    """
    if encoding not in ("exact", "dyadic"):
        raise ValueError(f"unknown encoding {encoding!r}")
    if rounding not in ("none", "floor"):
        raise ValueError(f"unknown rounding {rounding!r}")
    if encoding == "dyadic" and (b0 is None or b0 < 1):
        raise ValueError("dyadic encoding needs b0 >= 1")
    c = _coefficients(encoding, b0)
    steps = (
        # U, rightmost factor first
        Shear(0, ((2, c["1"]),)),
        Shear(1, ((3, c["-1"]),)),
        Shear(2, ((3, c["r3"]),)),
        Scale(3, 4),
        # L = La Lb, Lb first
        Shear(3, ((0, c["r3/2"]), (1, c["1/2"]), (2, c["-r3"]))),
        Shear(2, ((0, c["-1/2"]), (1, c["r3/2"]))),
    )
    return LiftingPlan(perm=(0, 3, 1, 2), steps=steps, rounding=rounding,
                       encoding=encoding, b0=b0 if encoding == "dyadic" else None)


def plu_factors(root3=SQRT3):
    """The permutation, lower and upper factors as explicit 4x4 matrices."""
    s = root3
    P = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0]], dtype=float)
    L = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [-0.5, s / 2, 1, 0], [s / 2, 0.5, -s, 1]])
    U = np.array([[1, 0, 1, 0], [0, 1, 0, -1], [0, 0, 1, s], [0, 0, 0, 4]], dtype=float)
    return P, L, U


# -- float / floor-of-float evaluation -----------------------------------------

def _apply_float(plan, x, inverse, rounding):
    v = np.array(x, dtype=float)
    if inverse:
        out = np.empty_like(v)
        out[..., list(plan.perm)] = v
        v = out
        steps = reversed(plan.steps)
    else:
        steps = plan.steps
    for st in steps:
        if isinstance(st, Scale):
            if inverse:
                v[..., st.target] /= st.factor
            else:
                v[..., st.target] *= st.factor
            continue
        acc = sum(cf.value * v[..., i] for i, cf in st.sources)
        if rounding == "floor":
            acc = np.floor(acc)
        if inverse:
            v[..., st.target] -= acc
        else:
            v[..., st.target] += acc
    if not inverse:
        v = v[..., list(plan.perm)]
    return v


# -- integer engine --------------------------------------------------------------

MAX_SOURCES = 3
MAX_DIGITS = 32


@dataclass(frozen=True, eq=False)
class _CompiledPlan:
    kind: np.ndarray      # 0 shear, 1 scale
    target: np.ndarray
    nsrc: np.ndarray
    src: np.ndarray       # (steps, MAX_SOURCES)
    common: np.ndarray    # common right shift per shear
    ndig: np.ndarray      # (steps, MAX_SOURCES)
    dpos: np.ndarray      # (steps, MAX_SOURCES, MAX_DIGITS) left shifts
    dsgn: np.ndarray      # signs
    perm: np.ndarray


def _compile(plan):
    if not plan.dyadic:
        raise ValueError("integer engine needs dyadic coefficients")
    n = len(plan.steps)
    kind = np.zeros(n, np.int64)
    target = np.zeros(n, np.int64)
    nsrc = np.zeros(n, np.int64)
    src = np.zeros((n, MAX_SOURCES), np.int64)
    common = np.zeros(n, np.int64)
    ndig = np.zeros((n, MAX_SOURCES), np.int64)
    dpos = np.zeros((n, MAX_SOURCES, MAX_DIGITS), np.int64)
    dsgn = np.zeros((n, MAX_SOURCES, MAX_DIGITS), np.int64)
    for s, st in enumerate(plan.steps):
        target[s] = st.target
        if isinstance(st, Scale):
            kind[s] = 1
            common[s] = int(st.factor).bit_length() - 1
            if 1 << common[s] != st.factor:
                raise ValueError("integer scale factors must be powers of two")
            continue
        shifts = [cf.shift for _, cf in st.sources]
        common[s] = max(shifts)
        nsrc[s] = len(st.sources)
        for j, (i, cf) in enumerate(st.sources):
            src[s, j] = i
            digits = csd_digits(cf.num)
            ndig[s, j] = len(digits)
            for d, (pos, sign) in enumerate(digits):
                dpos[s, j, d] = pos + common[s] - cf.shift
                dsgn[s, j, d] = sign
    return _CompiledPlan(kind, target, nsrc, src, common, ndig, dpos, dsgn, np.array(plan.perm, np.int64))


@jit
def _int_kernel(x, kind, target, nsrc, src, common, ndig, dpos, dsgn, perm, inverse):
    n = x.shape[0]
    nsteps = kind.shape[0]
    out = np.empty_like(x)
    v = np.empty(4, np.int64)
    for b in range(n):
        if inverse:
            for i in range(4):
                v[perm[i]] = x[b, i]
        else:
            for i in range(4):
                v[i] = x[b, i]
        for t in range(nsteps):
            s = nsteps - 1 - t if inverse else t
            tg = target[s]
            if kind[s] == 1:
                if inverse:
                    v[tg] = v[tg] >> common[s]
                else:
                    v[tg] = v[tg] << common[s]
                continue
            acc = np.int64(0)
            for j in range(nsrc[s]):
                xv = v[src[s, j]]
                for d in range(ndig[s, j]):
                    if dsgn[s, j, d] > 0:
                        acc += xv << dpos[s, j, d]
                    else:
                        acc -= xv << dpos[s, j, d]
            acc = acc >> common[s]
            if inverse:
                v[tg] -= acc
            else:
                v[tg] += acc
        if inverse:
            for i in range(4):
                out[b, i] = v[i]
        else:
            for i in range(4):
                out[b, i] = v[perm[i]]
    return out


def _int_numpy(x, cp, inverse):
    """Reference integer engine: same arithmetic, vectorized over blocks."""
    v = x.copy()
    if inverse:
        v = np.empty_like(x)
        v[:, cp.perm] = x
    order = range(len(cp.kind) - 1, -1, -1) if inverse else range(len(cp.kind))
    for s in order:
        tg = cp.target[s]
        if cp.kind[s] == 1:
            v[:, tg] = (v[:, tg] >> cp.common[s]) if inverse else (v[:, tg] << cp.common[s])
            continue
        acc = np.zeros(len(v), np.int64)
        for j in range(cp.nsrc[s]):
            xv = v[:, cp.src[s, j]]
            for d in range(cp.ndig[s, j]):
                term = xv << cp.dpos[s, j, d]
                acc = acc + term if cp.dsgn[s, j, d] > 0 else acc - term
        acc >>= cp.common[s]
        v[:, tg] = v[:, tg] - acc if inverse else v[:, tg] + acc
    return v if inverse else v[:, cp.perm]


def _apply_int(plan, x, inverse, engine):
    x = np.asarray(x)
    if not np.issubdtype(x.dtype, np.integer):
        if not np.all(np.equal(np.mod(x, 1), 0)):
            raise ValueError("integer mode needs integer-valued input")
    blocks = np.ascontiguousarray(x.reshape(-1, 4), dtype=np.int64)
    cp = _compile(plan)
    if engine == "auto":
        engine = "kernel" if HAVE_NUMBA else "numpy"
    if engine == "numpy":
        out = _int_numpy(blocks, cp, inverse)
    else:
        out = _int_kernel(blocks, cp.kind, cp.target, cp.nsrc, cp.src, cp.common,
                          cp.ndig, cp.dpos, cp.dsgn, cp.perm, inverse)
    return out.reshape(x.shape)


def _dispatch(plan, x, inverse, engine):
    x = np.asarray(x)
    if x.shape[-1] != 4:
        raise ValueError(f"lifting acts on 4-blocks, got trailing dimension {x.shape[-1]}")
    if plan.rounding == "floor" and plan.dyadic:
        return _apply_int(plan, x, inverse, engine)
    return _apply_float(plan, x, inverse, plan.rounding)


def lift_forward(plan, x, engine="auto"):
    """Apply the plan to one 4-vector or an ``(n, 4)`` array of blocks.

    ``engine`` selects the integer-mode implementation: ``"kernel"`` (the
    per-block loop, compiled when numba is available), ``"numpy"``
    (vectorized over blocks) or ``"auto"`` (kernel with numba, numpy
    otherwise). Both give bit-identical results.
    """
    return _dispatch(plan, x, False, engine)


def lift_inverse(plan, y, engine="auto"):
    """Undo :func:`lift_forward`: reversed steps with negated shears."""
    return _dispatch(plan, y, True, engine)


def lift_signal(plan, signal, inverse=False, engine="auto"):
    """Blockwise lifting of a scalar signal whose length is a multiple of 4."""
    s = np.asarray(signal)
    if s.ndim != 1 or len(s) % 4:
        raise ValueError("signal length must be a multiple of 4")
    out = _dispatch(plan, s.reshape(-1, 4), inverse, engine)
    return out.reshape(-1)


# -- quantization diagnostics --------------------------------------------------

def gram_defect(sys):
    """Constant matrices ``A(z)B(z)* + A(-z)B(-z)*`` for (H,H), (G,G), (H,G)."""
    if sys.r != 2 or sys.m != 1:
        raise ValueError("gram_defect needs r = 2, m = 1")
    Hs, Gs = sys.symbol("H"), sys.symbol("G")

    def defect(A, B):
        D = lm_add(lm_mul(A, lm_paraconj(B)), lm_mul(lm_alternate(A), lm_paraconj(lm_alternate(B))))
        return np.array(D[0])

    return defect(Hs, Hs), defect(Gs, Gs), defect(Hs, Gs)
