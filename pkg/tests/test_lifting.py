import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from mwbank.lifting import (
    Scale,
    Shear,
    csd_adders,
    csd_digits,
    dyadic_approx,
    gram_defect,
    lift_forward,
    lift_inverse,
    lift_signal,
    plu_factors,
    round_sqrt3_mantissa,
    sa1_lifting_plan,
    shift_add_multiply,
)
from mwbank.mwt import quantized_sa1, sa1

R3 = math.sqrt(3)

# (b0, mantissa, listed adders, quantization error); "same" rows repeat the previous value
TABLE = [
    (1, 3, 1, 0.232050807568877),
    (2, 7, 2, -0.017949192431123),
    (3, 14, 2, "same"),
    (4, 28, 2, "same"),
    (5, 55, 2, 0.013300807568877),
    (6, 111, 2, -0.002324192431123),
    (7, 222, 2, "same"),
    (8, 443, 3, 0.001582057568877),
    (9, 887, 3, -0.000371067431123),
    (10, 1774, 3, "same"),
    (11, 3547, 4, 0.000117213818877),
    (12, 7094, 4, "same"),
    (13, 14189, 4, -0.000004856493623),
    (14, 28378, 4, "same"),
]


class TestDyadic:
    @pytest.mark.parametrize("b0, k, adders, err", TABLE)
    def test_table(self, b0, k, adders, err):
        d = dyadic_approx(b0)
        assert d.k == k
        if err == "same":
            prev = dyadic_approx(b0 - 1)
            assert d.value == prev.value and d.error == prev.error
        else:
            assert round(d.error, 15) == pytest.approx(err, abs=5e-16)
        assert abs(d.error) <= 2.0 ** (-b0 - 1)

    @pytest.mark.parametrize("b0, listed", [(2, 2), (13, 4)])
    def test_csd_differs_from_listed_count(self, b0, listed):
        # 7 = 8 - 1 needs one adder, 14189 has six nonzero CSD digits
        assert dyadic_approx(b0).adders != listed

    @pytest.mark.parametrize("b0", range(1, 40))
    def test_mantissa_exact(self, b0):
        from fractions import Fraction

        k = round_sqrt3_mantissa(b0)
        # k is the integer nearest to sqrt(3) 2^b0: (k -+ 1/2)^2 brackets 3 4^b0
        n = 3 * 4**b0
        assert (Fraction(2 * k - 1, 2)) ** 2 < n < (Fraction(2 * k + 1, 2)) ** 2

    def test_b0_validated(self):
        with pytest.raises(ValueError):
            dyadic_approx(0)


class TestCSD:
    @settings(max_examples=300)
    @given(st.integers(-10**9, 10**9))
    def test_naf_properties(self, k):
        digits = csd_digits(k)
        assert sum(s << p for p, s in digits) == k
        pos = [p for p, _ in digits]
        assert all(b - a >= 2 for a, b in zip(pos, pos[1:]))

    def test_known(self):
        assert csd_digits(7) == [(0, -1), (3, 1)]
        assert csd_adders(55) == 2 and csd_adders(1) == 0 and csd_adders(0) == 0

    @settings(max_examples=300)
    @given(st.integers(-2**31, 2**31), st.integers(0, 2**20), st.integers(0, 24))
    def test_shift_add_matches_floor(self, x, k, b0):
        assert shift_add_multiply(x, k, b0) == (x * k) >> b0

    @pytest.mark.parametrize("x, k, b0, out", [(100, 55, 5, 171), (1, 3, 1, 1), (-8, 7, 2, -14)])
    def test_examples(self, x, k, b0, out):
        assert shift_add_multiply(x, k, b0) == out


class TestPlan:
    def test_structure(self):
        p = sa1_lifting_plan()
        for st_ in p.steps:
            if isinstance(st_, Shear):
                assert all(i != st_.target for i, _ in st_.sources)
            else:
                assert isinstance(st_, Scale) and st_.factor == 4
        assert sorted(p.perm) == [0, 1, 2, 3]

    def test_unit_vector(self):
        y = lift_forward(sa1_lifting_plan(), np.array([1.0, 0, 0, 0]))
        np.testing.assert_allclose(y, [1, R3 / 2, 0, -0.5], atol=1e-15)

    def test_matches_plu_product(self):
        P, L, U = plu_factors()
        np.testing.assert_allclose(sa1_lifting_plan().matrix(), P @ L @ U, atol=1e-14, rtol=0)

    def test_sqrt2_times_orthonormal_block(self, system):
        x = np.random.default_rng(0).standard_normal((100, 4))
        y = lift_forward(sa1_lifting_plan(), x)
        np.testing.assert_allclose(y, math.sqrt(2) * x @ system.analysis_matrix().T, atol=1e-12, rtol=0)

    def test_gram(self):
        M = sa1_lifting_plan().matrix()
        assert np.max(np.abs(M.T @ M - 2 * np.eye(4))) <= 1e-12

    def test_inverse_matrix(self):
        M = sa1_lifting_plan().matrix()
        np.testing.assert_allclose(M @ (0.5 * M.T), np.eye(4), atol=1e-12)
        # the literal 1/2 U^-1 L^-1 P^T is half the inverse
        P, L, U = plu_factors()
        lit = 0.5 * np.linalg.inv(U) @ np.linalg.inv(L) @ P.T
        np.testing.assert_allclose(M @ lit, 0.5 * np.eye(4), atol=1e-12)

    def test_dyadic_b0_1_coefficients(self):
        p = sa1_lifting_plan("dyadic", b0=1)
        vals = sorted({abs(cf.value) for s in p.steps if isinstance(s, Shear) for _, cf in s.sources})
        assert vals == [0.5, 0.75, 1.0, 1.5]
        P, L, U = plu_factors(1.5)
        np.testing.assert_allclose(p.matrix(), P @ L @ U, atol=1e-15)

    @pytest.mark.parametrize("b0", [1, 2, 5, 8])
    def test_dyadic_plan_vs_quantized_bank(self, b0):
        # rows h0, g0, g1 equal sqrt(2) times the quantized bank; the h1 row
        # picks up 3 - q^2 in its last entry because L and U were derived with q^2 = 3
        q = dyadic_approx(b0).value
        M = sa1_lifting_plan("dyadic", b0=b0).matrix()
        W = math.sqrt(2) * quantized_sa1(b0).analysis_matrix()
        D = M - W
        expected = np.zeros((4, 4))
        expected[1, 3] = 3 - q * q
        np.testing.assert_allclose(D, expected, atol=1e-14)

    def test_bad_options(self):
        with pytest.raises(ValueError):
            sa1_lifting_plan("fixed")
        with pytest.raises(ValueError):
            sa1_lifting_plan(rounding="round")
        with pytest.raises(ValueError):
            sa1_lifting_plan("dyadic")


class TestRoundtrip:
    def test_float(self):
        p = sa1_lifting_plan()
        x = np.random.default_rng(1).standard_normal((50, 4))
        np.testing.assert_allclose(lift_inverse(p, lift_forward(p, x)), x, atol=1e-13)

    def test_integer_example(self):
        p = sa1_lifting_plan("dyadic", "floor", b0=5)
        x = np.array([7, -3, 12, 5])
        y = lift_forward(p, x)
        assert y.dtype == np.int64
        np.testing.assert_array_equal(lift_inverse(p, y), x)

    @pytest.mark.parametrize("b0", [1, 2, 5, 8])
    def test_integer_bulk(self, b0):
        p = sa1_lifting_plan("dyadic", "floor", b0=b0)
        x = np.random.default_rng(b0).integers(-2**15, 2**15 + 1, size=(10**4, 4))
        y = lift_forward(p, x)
        np.testing.assert_array_equal(lift_inverse(p, y), x)

    @pytest.mark.parametrize("b0", [1, 5])
    def test_integer_close_to_float(self, b0):
        # each floor loses < 1, amplified at most by the later shears
        pi = sa1_lifting_plan("dyadic", "floor", b0=b0)
        pf = sa1_lifting_plan("dyadic", "none", b0=b0)
        x = np.random.default_rng(3).integers(-1000, 1000, size=(500, 4))
        assert np.max(np.abs(lift_forward(pi, x) - lift_forward(pf, x.astype(float)))) < 8

    def test_exact_coefficients_with_floor(self):
        p = sa1_lifting_plan("exact", "floor")
        x = np.random.default_rng(4).integers(-500, 500, size=(200, 4)).astype(float)
        y = lift_forward(p, x)
        np.testing.assert_array_equal(y, np.round(y))
        np.testing.assert_array_equal(lift_inverse(p, y), x)

    def test_rejects_non_integer(self):
        p = sa1_lifting_plan("dyadic", "floor", b0=2)
        with pytest.raises(ValueError):
            lift_forward(p, np.array([0.5, 0, 0, 0]))

    def test_block_size(self):
        with pytest.raises(ValueError):
            lift_forward(sa1_lifting_plan(), np.zeros(3))

    def test_signal(self, system):
        x = np.random.default_rng(6).standard_normal(64)
        p = sa1_lifting_plan()
        y = lift_signal(p, x)
        np.testing.assert_allclose(lift_signal(p, y, inverse=True), x, atol=1e-13)
        with pytest.raises(ValueError):
            lift_signal(p, np.zeros(6))


class TestEngines:
    @settings(max_examples=60, deadline=None)
    @given(st.sampled_from([1, 2, 3, 5, 8, 12]),
           arrays(np.int64, st.tuples(st.integers(1, 40), st.just(4)), elements=st.integers(-2**15, 2**15)))
    def test_kernel_equals_numpy(self, b0, x):
        p = sa1_lifting_plan("dyadic", "floor", b0=b0)
        y1 = lift_forward(p, x, engine="kernel")
        y2 = lift_forward(p, x, engine="numpy")
        np.testing.assert_array_equal(y1, y2)
        np.testing.assert_array_equal(lift_inverse(p, y1, engine="numpy"), x)
        np.testing.assert_array_equal(lift_inverse(p, y2, engine="kernel"), x)

    @pytest.mark.parametrize("engine", ["kernel", "numpy"])
    def test_hand_trace(self, engine):
        # b0 = 5, k = 55, x = (0, 0, 0, 100):
        #   x1 = -100; x2 = floor(5500/32) = 171; x3 = 400
        #   x3 += floor((32 * -100 - 110 * 171) / 64) = -344  -> 56
        #   x2 += floor((55 * -100) / 64) = -86               -> 85
        p = sa1_lifting_plan("dyadic", "floor", b0=5)
        y = lift_forward(p, np.array([0, 0, 0, 100]), engine=engine)
        np.testing.assert_array_equal(y, [0, 56, -100, 85])


class TestGramDefect:
    def test_exact(self, system):
        DH, DG, DHG = gram_defect(system)
        np.testing.assert_allclose(DH, 2 * np.eye(2), atol=1e-14)
        np.testing.assert_allclose(DG, 2 * np.eye(2), atol=1e-14)
        np.testing.assert_allclose(DHG, 0, atol=1e-14)

    def test_b0_1(self):
        DH, DG, DHG = gram_defect(quantized_sa1(1))
        np.testing.assert_allclose(DH, np.diag([2, 13 / 8]), atol=1e-14, rtol=0)
        np.testing.assert_allclose(DG, np.diag([2, 13 / 8]), atol=1e-14, rtol=0)
        np.testing.assert_allclose(DHG, 0, atol=1e-14)

    @pytest.mark.parametrize("b0", [2, 5, 8])
    def test_general_b0(self, b0):
        q = dyadic_approx(b0).value
        DH, DG, DHG = gram_defect(quantized_sa1(b0))
        assert DH[0, 0] == pytest.approx(2, abs=1e-14)
        # second diagonal entry is (q^2 + 1) / 2 from the two taps
        assert DH[1, 1] == pytest.approx((q * q + 1) / 2, abs=1e-14)
        np.testing.assert_allclose(DHG, 0, atol=1e-14)

    def test_shape_check(self):
        from mwbank.mwt import haar

        with pytest.raises(ValueError):
            gram_defect(haar())
