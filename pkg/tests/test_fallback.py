"""The pure numpy fallback gives the same results as the compiled kernels."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from mwbank import _accel
from mwbank.design import sa1_product_filter
from mwbank.lifting import lift_forward, sa1_lifting_plan
from mwbank.msf import bauer_fixed_point, bauer_iterate

SCRIPT = r"""
import json
import numpy as np
from mwbank import _accel
from mwbank.design import sa1_product_filter
from mwbank.lifting import lift_forward, lift_inverse, sa1_lifting_plan
from mwbank.msf import bauer_fixed_point, bauer_iterate

P = sa1_product_filter()
plan = sa1_lifting_plan("dyadic", "floor", b0=5)
x = np.random.default_rng(1).integers(-1000, 1000, size=(500, 4))
y = lift_forward(plan, x, engine="kernel")
st = bauer_fixed_point(P, tol=1e-6, max_iter=5000)
print(json.dumps({
    "backend": _accel.backend(),
    "X": bauer_iterate(P, 300).tolist(),
    "fp_iter": st.iter,
    "y": y.tolist(),
    "roundtrip": bool(np.array_equal(lift_inverse(plan, y, engine="kernel"), x)),
}))
"""


@pytest.fixture(scope="module")
def fallback():
    env = dict(os.environ, MWBANK_DISABLE_NUMBA="1")
    res = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


class TestFallback:
    def test_backend(self, fallback):
        assert fallback["backend"] == "numpy"

    def test_fixed_point_matches(self, fallback):
        P = sa1_product_filter()
        np.testing.assert_array_equal(np.array(fallback["X"]), bauer_iterate(P, 300))
        assert fallback["fp_iter"] == bauer_fixed_point(P, tol=1e-6, max_iter=5000).iter

    def test_lifting_matches(self, fallback):
        x = np.random.default_rng(1).integers(-1000, 1000, size=(500, 4))
        y = lift_forward(sa1_lifting_plan("dyadic", "floor", b0=5), x, engine="kernel")
        np.testing.assert_array_equal(np.array(fallback["y"]), y)
        assert fallback["roundtrip"]

    def test_backend_name(self):
        assert _accel.backend() in ("numba", "numpy")
