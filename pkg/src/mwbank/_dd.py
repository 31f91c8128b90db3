"""Double-double arithmetic on (hi, lo) float pairs.

Error-free transformations after Dekker and Knuth. Used by the spectral
factorization kernel: with determinant zeros on the unit circle the
fixed-point iterate loses accuracy like eps**(1/4), so plain float64 stalls
near 4e-5 from the limit.
"""

from ._accel import jit


@jit(inline=True)
def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


@jit(inline=True)
def _split(a):
    c = 134217729.0 * a  # 2**27 + 1
    h = c - (c - a)
    return h, a - h


@jit(inline=True)
def two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


@jit(inline=True)
def dd_add(x, y):
    s, e = two_sum(x[0], y[0])
    e += x[1] + y[1]
    s2 = s + e
    return (s2, e - (s2 - s))


@jit(inline=True)
def dd_neg(x):
    return (-x[0], -x[1])


@jit(inline=True)
def dd_sub(x, y):
    return dd_add(x, (-y[0], -y[1]))


@jit(inline=True)
def dd_mul(x, y):
    p, e = two_prod(x[0], y[0])
    e += x[0] * y[1] + x[1] * y[0]
    s = p + e
    return (s, e - (s - p))


@jit(inline=True)
def dd_div(x, y):
    q1 = x[0] / y[0]
    r = dd_sub(x, dd_mul((q1, 0.0), y))
    q2 = r[0] / y[0]
    r = dd_sub(r, dd_mul((q2, 0.0), y))
    q3 = r[0] / y[0]
    s, e = two_sum(q1, q2)
    return dd_add((s, e), (q3, 0.0))
