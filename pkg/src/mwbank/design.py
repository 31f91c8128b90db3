"""Half-band product filter with a fourth-order determinant zero at z = -1.

For ``r = 2`` and one lag, ``P(z) = P_1^T z**-1 + I + P_1 z`` with
``P_1 = [[a, b], [c, d]]``. Matching ``det P(z)`` to
``((1 + z**-1)/2)**4 z**2`` gives

    ad - bc = 1/16,   a + d = 4/16,   1 - b**2 - c**2 + 2ad = 6/16,

which, with ``c = -b``, has four real solutions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .polymat import LaurentMatrix, LaurentScalar

# Target determinant coefficients, degrees -2..2.
TARGET_DET = LaurentScalar(np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0, -2)

# (a takes the larger root?, sign of b)
_BRANCHES = (
    (True, -1.0),   # a = 1/2,  b = -sqrt(3)/4  (the standard choice)
    (True, +1.0),   # a = 1/2,  b = +sqrt(3)/4
    (False, +1.0),  # a = -1/4, b = +sqrt(3)/4
    (False, -1.0),  # a = -1/4, b = -sqrt(3)/4
)


@dataclass(frozen=True)
class SimpleDesignParams:
    """``k`` is the order of the determinant zero at -1; ``branch`` in 0..3."""

    k: int = 4
    branch: int = 0

    def __post_init__(self):
        if self.k != 4:
            raise ValueError(f"only k = 4 is supported, got k = {self.k}")
        if self.branch not in range(len(_BRANCHES)):
            raise ValueError(f"branch must be in 0..{len(_BRANCHES) - 1}, got {self.branch}")


def design_equations(P1):
    """Residuals of the three scalar design equations for a 2x2 ``P1``."""
    (a, b), (c, d) = np.asarray(P1, dtype=float)
    return np.array([
        a * d - b * c - 1.0 / 16,
        a + d - 4.0 / 16,
        1.0 - b * b - c * c + 2 * a * d - 6.0 / 16,
    ])


def solve_p1(params=SimpleDesignParams()):
    """Lag-one coefficient ``P_1`` for the selected branch."""
    # c = -b turns the system into: a + d = s, ad + b^2 = p, ad - b^2 = q.
    s = 4.0 / 16
    p = 1.0 / 16
    q = (6.0 / 16 - 1.0) / 2
    ad = (p + q) / 2
    b2 = (p - q) / 2
    disc = s * s - 4 * ad
    if disc < 0 or b2 < 0:  # pragma: no cover - fixed data
        raise ValueError("design equations have no real solution")
    roots = ((s + np.sqrt(disc)) / 2, (s - np.sqrt(disc)) / 2)
    larger_a, sign_b = _BRANCHES[params.branch]
    a, d = roots if larger_a else roots[::-1]
    b = sign_b * np.sqrt(b2)
    return np.array([[a, b], [-b, d]])


def solve_simple_product_filter(params=SimpleDesignParams()):
    """Product filter ``P(z) = P_1^T z**-1 + I + P_1 z`` for the chosen branch."""
    P1 = solve_p1(params)
    return LaurentMatrix(np.stack([P1.T, np.eye(2), P1]), -1)


def sa1_product_filter():
    return solve_simple_product_filter(SimpleDesignParams(4, 0))
