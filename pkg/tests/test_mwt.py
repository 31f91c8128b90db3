import math
import warnings

import numpy as np
import pytest

from conftest import G0_REF, G1_REF, H0_REF, H1_REF
from mwbank.mwt import (
    FormatError,
    CascadeDivergence,
    build_system,
    cascade_eval,
    haar,
    load_system,
    orthogonality_defect,
    quantized_sa1,
    sa1,
    save_system,
)

R3 = math.sqrt(3)


def piecewise_trapezoid(f, h, pieces=2):
    """Trapezoid rule over ``pieces`` equal subintervals of the sampled support.

    Samples are right-continuous, so each subinterval's right endpoint is
    replaced by the linear extrapolation of its left limit.
    """
    n = (len(f) - 1) // pieces
    total = 0.0
    for p in range(pieces):
        g = f[p * n:(p + 1) * n + 1].copy()
        g[-1] = 2 * g[-2] - g[-3]
        total += h * (np.sum(g) - 0.5 * (g[0] + g[-1]))
    return total


class TestSystems:
    def test_sa1_coefficients(self, system):
        np.testing.assert_allclose(system.H, [H0_REF, H1_REF], atol=1e-16)
        np.testing.assert_allclose(system.G, [G0_REF, G1_REF], atol=1e-16)
        assert system.orthogonal and system.r == 2 and system.m == 1

    def test_sa1_symmetry(self, system):
        np.testing.assert_array_equal(system.S, [1, -1])
        np.testing.assert_array_equal(system.T, [1, -1])

    def test_haar(self):
        h = haar()
        assert h.orthogonal and h.r == 1
        np.testing.assert_array_equal(h.T, [-1])

    def test_quantized_not_orthogonal(self):
        q = quantized_sa1(1)
        assert not q.orthogonal
        # diag(2, 13/8) in place of 2I: defect per condition is 3/16
        assert orthogonality_defect(q.H, q.G) == pytest.approx(3 / 16, abs=1e-15)
        np.testing.assert_array_equal(q.S, [1, -1])

    def test_quantized_converges_to_exact(self, system):
        for b0, tol in ((8, 1e-2), (14, 1e-4)):
            assert np.max(np.abs(quantized_sa1(b0).H - system.H)) < tol

    def test_analysis_matrix_orthogonal(self, system):
        W = system.analysis_matrix()
        np.testing.assert_allclose(W @ W.T, np.eye(4), atol=1e-15)

    def test_build_rejects_bad_shapes(self):
        with pytest.raises(ValueError):
            build_system(np.zeros((2, 2, 3)), np.zeros((2, 2, 3)))
        with pytest.raises(ValueError):
            build_system(np.zeros((2, 2, 2)), np.zeros((3, 2, 2)))

    def test_symbol(self, system):
        Hs = system.symbol("H")
        assert (Hs.lo, Hs.hi) == (-1, 0)
        np.testing.assert_array_equal(Hs[-1], system.H[1])


class TestCascade:
    def test_closed_forms(self, system):
        f = cascade_eval(system, L=8)
        t = f.grid[:-1]
        np.testing.assert_allclose(f.phi[0, :-1], 1.0, atol=1e-10)
        np.testing.assert_allclose(f.phi[1, :-1], R3 * (1 - 2 * t), atol=1e-10)
        np.testing.assert_allclose(f.psi[0, :-1], np.where(t < 0.5, R3 * (1 - 4 * t), R3 * (4 * t - 3)), atol=1e-10)
        np.testing.assert_allclose(f.psi[1, :-1], np.where(t < 0.5, 1 - 6 * t, 5 - 6 * t), atol=1e-10)

    def test_half_open_support(self, system):
        f = cascade_eval(system, L=4)
        np.testing.assert_array_equal(f.phi[:, -1], 0)
        assert f.grid[-1] == 1.0

    def test_quantized_closed_forms(self):
        f = cascade_eval(quantized_sa1(1), L=8)
        t = f.grid[:-1]
        np.testing.assert_allclose(f.phi[0, :-1], 1.0, atol=1e-12)
        np.testing.assert_allclose(f.phi[1, :-1], 1.5 * (1 - 2 * t), atol=1e-12)
        np.testing.assert_allclose(f.psi[0, :-1], np.where(t < 0.5, 1.5 * (1 - 4 * t), 1.5 * (4 * t - 3)), atol=1e-12)
        np.testing.assert_allclose(f.psi[1, :-1], np.where(t < 0.5, 5 / 8 - 4.5 * t, 31 / 8 - 4.5 * t), atol=1e-12)
        assert f.psi[1, 0] == pytest.approx(5 / 8, abs=1e-12)

    def test_moments(self, system):
        f = cascade_eval(system, L=10)
        h = 2.0**-10
        np.testing.assert_allclose(piecewise_trapezoid(f.phi[0], h), 1.0, atol=1e-6)
        for row in (f.phi[1], f.psi[0], f.psi[1]):
            assert abs(piecewise_trapezoid(row, h)) < 1e-6
        # orthonormality of the sampled functions
        g = np.vstack([f.phi[:, :-1], f.psi[:, :-1]])
        gram = g @ g.T * h
        np.testing.assert_allclose(gram, np.eye(4), atol=1e-2)

    def test_divergence(self):
        bad = build_system(2 * np.array(H0_REF)[None].repeat(2, 0), np.array(G0_REF)[None].repeat(2, 0))
        with pytest.raises(CascadeDivergence):
            cascade_eval(bad, L=4)


class TestFiles:
    def test_roundtrip(self, tmp_path, system):
        p = tmp_path / "sa1.mw"
        save_system(system, p)
        s2 = load_system(p)
        np.testing.assert_array_equal(s2.H, system.H)
        np.testing.assert_array_equal(s2.G, system.G)
        np.testing.assert_array_equal(s2.S, system.S)
        assert s2.name == "SA1" and s2.orthogonal

    def test_quantized_warns(self, tmp_path):
        p = tmp_path / "q.mw"
        save_system(quantized_sa1(1), p)
        with pytest.warns(UserWarning, match="not orthogonal"):
            load_system(p)

    def test_comments_and_blank_lines(self, tmp_path, system):
        p = tmp_path / "c.mw"
        save_system(system, p)
        text = "# header comment\n\n" + p.read_text().replace("H 1", "H 1  # second tap")
        p.write_text(text)
        assert load_system(p).orthogonal

    def test_false_declared_signature(self, tmp_path, system):
        p = tmp_path / "s.mw"
        save_system(system, p)
        p.write_text(p.read_text().replace("S 1 -1", "S 1 1"))
        with pytest.warns(UserWarning) as rec:
            s = load_system(p)
        assert any("declared S" in str(w.message) for w in rec)
        assert s.S is None

    @pytest.mark.parametrize("mutate, msg", [
        (lambda t: t.replace("MWSYS 1", "MWSYS 2"), "header"),
        (lambda t: t.replace("r 2 m 1", "r 2 q 1"), "expected 'r"),
        (lambda t: t.replace("G 1", "G 7"), "expected 'G 1'"),
        (lambda t: t.split("G 1")[0], "missing section 'G 1'"),
        (lambda t: t.replace("H 0\n", "H 0\nabc 1\n"), "non-numeric"),
    ])
    def test_malformed(self, tmp_path, system, mutate, msg):
        p = tmp_path / "bad.mw"
        save_system(system, p)
        p.write_text(mutate(p.read_text()))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            with pytest.raises(FormatError, match=msg):
                load_system(p)

    def test_line_numbers(self, tmp_path, system):
        p = tmp_path / "bad.mw"
        save_system(system, p)
        lines = p.read_text().splitlines()
        lines[4] = "1 2 3"
        p.write_text("\n".join(lines))
        with pytest.raises(FormatError, match="line 5"):
            load_system(p)
