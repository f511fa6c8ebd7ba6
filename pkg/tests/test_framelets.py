import json
from math import comb

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from bframelets._rational import Q
from bframelets.errors import InvalidOrderError, SmoothnessError, ToleranceError
from bframelets.framelets import (
    FrameletId,
    MaskSpec,
    calderon_sum,
    diagonal_lift,
    framelet_derivative_eval,
    framelet_eval,
    framelet_eval_fourier_inversion,
    framelet_eval_recurrence,
    framelet_fourier,
    framelet_from_json,
    framelet_piecewise,
    framelet_recurrence_piecewise,
    framelet_to_json,
    haar_piecewise,
    parity_offset,
    refinement_symbol,
    uep_residual,
    wavelet_mask,
)
from bframelets.quadrature import QuadratureConfig
from bframelets.splinecore import DirectionSet, box_spline_piecewise, bspline_derivative_eval, bspline_piecewise, sinc

from oracles import framelet_fourier_oracle, framelet_oracle

IDS = [(m, ell) for m in range(1, 9) for ell in range(1, m + 1)]

# frozen from oracles.framelet_oracle(m, l, x, centered=False)
FROZEN = [
    (2, 1, 0.25, -0.3535533905932738),
    (2, 2, 1 / 3, 0.0),
    (3, 1, 0.4, 0.15588457268119893),
    (4, 2, 0.3, -0.24290773282599848),
    (5, 3, -0.7, 0.06638147854970122),
    (8, 8, 0.2, 0.03757095238095238),
    (6, 1, -1.5, 0.11163039192371253),
]


class TestFrameletId:
    @pytest.mark.parametrize("m,ell", [(0, 1), (2, 0), (2, 3), (3, 1.5)])
    def test_invalid(self, m, ell):
        with pytest.raises(InvalidOrderError):
            FrameletId(m, ell)

    def test_parity_and_shift(self):
        assert parity_offset(4) == 0 and parity_offset(5) == 1
        assert FrameletId(5, 2).shift == 0.5
        assert FrameletId(5, 2, centered=True).shift == 0.0
        assert FrameletId(4, 2).shift == 0.0

    def test_scale(self):
        assert float(FrameletId(4, 2).scale) == pytest.approx(np.sqrt(6) / 16)


class TestSpectrum:
    @pytest.mark.parametrize("m,ell", IDS)
    def test_vanishes_at_zero(self, m, ell):
        assert framelet_fourier(FrameletId(m, ell), 0.0) == 0

    def test_haar_at_pi(self):
        assert framelet_fourier(FrameletId(1, 1), np.pi) == pytest.approx(2 / np.pi, abs=1e-15)

    @pytest.mark.parametrize("m,ell", [(1, 1), (2, 1), (3, 2), (5, 5), (8, 3)])
    @pytest.mark.parametrize("centered", [False, True])
    def test_matches_definition(self, m, ell, centered):
        w = np.linspace(-40, 40, 400)  # even count, avoids w = 0
        ref = np.array([framelet_fourier_oracle(m, ell, v, centered) for v in w])
        np.testing.assert_allclose(framelet_fourier(FrameletId(m, ell, centered), w), ref, atol=1e-14)

    @given(st.integers(1, 8).flatmap(lambda m: st.tuples(st.just(m), st.integers(1, m))),
           st.floats(-100, 100, allow_nan=False))
    def test_hermitian(self, mi, w):
        fid = FrameletId(*mi)
        assert framelet_fourier(fid, -w) == pytest.approx(np.conj(framelet_fourier(fid, w)), abs=1e-15)

    @given(st.integers(1, 8).flatmap(lambda m: st.tuples(st.just(m), st.integers(1, m))),
           st.floats(-100, 100, allow_nan=False))
    def test_centered_has_real_or_imaginary_values(self, mi, w):
        v = framelet_fourier(FrameletId(*mi, centered=True), w)
        assert abs(v.real if mi[1] % 2 else v.imag) < 1e-15


class TestMasks:
    def test_refinement_examples(self):
        assert refinement_symbol(3, 0.0) == 1
        assert abs(refinement_symbol(4, np.pi)) < 1e-15
        assert refinement_symbol(2, np.pi / 2) == pytest.approx(0.5)

    @pytest.mark.parametrize("m,ell", IDS)
    def test_mask_zero(self, m, ell):
        assert wavelet_mask(m, ell, 0.0) == 0

    @pytest.mark.parametrize("m,ell", IDS)
    def test_two_scale_relation(self, m, ell):
        w = np.linspace(-np.pi, np.pi, 1024)
        phi = np.exp(-0.5j * w * parity_offset(m)) * sinc(w / 2) ** m
        lhs = framelet_fourier(FrameletId(m, ell), 2 * w)
        assert np.max(np.abs(lhs - wavelet_mask(m, ell, w) * phi)) < 1e-12

    @pytest.mark.parametrize("m", range(1, 9))
    def test_mask_energy(self, m):
        w = np.linspace(-7, 7, 301)
        total = sum(np.abs(wavelet_mask(m, ell, w)) ** 2 for ell in range(m + 1))
        np.testing.assert_allclose(total, 1.0, atol=1e-14)

    def test_mask_spec(self):
        assert MaskSpec(3)(0.3) == refinement_symbol(3, 0.3)
        assert MaskSpec(3, "wavelet", 2)(0.3) == wavelet_mask(3, 2, 0.3)
        with pytest.raises(InvalidOrderError):
            MaskSpec(3, "wavelet", 4)
        with pytest.raises(InvalidOrderError):
            MaskSpec(3, "other")


class TestUEP:
    @pytest.mark.parametrize("m", range(1, 9))
    def test_grid(self, m):
        r1, r2 = uep_residual(m, np.linspace(-np.pi, np.pi, 4096, endpoint=False))
        assert r1.max() < 1e-12 and r2.max() < 1e-12

    def test_examples(self):
        r = uep_residual(1, np.pi / 3)
        assert r[0] < 1e-15 and r[1] < 1e-15

    @given(st.floats(-50, 50, allow_nan=False))
    def test_order_eight_random(self, w):
        r1, r2 = uep_residual(8, w)
        assert r1 < 1e-12 and r2 < 1e-12

    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_symbolic(self, m):
        # independent symbolic expansion of both identities
        w = sp.symbols("w", real=True)
        j = m % 2

        def b(ell, t):
            return (sp.I**ell * sp.exp(-sp.I * t * j / 2) * sp.sqrt(comb(m, ell))
                    * sp.cos(t / 2) ** (m - ell) * sp.sin(t / 2) ** ell)

        diag = sum(b(ell, w) * sp.conjugate(b(ell, w)) for ell in range(m + 1))
        cross = sum(b(ell, w) * sp.conjugate(b(ell, w + sp.pi)) for ell in range(m + 1))

        def reduce(e):
            return sp.simplify(sp.expand(e.rewrite(sp.exp)))

        assert reduce(diag - 1) == 0
        assert reduce(cross) == 0


class TestPiecewise:
    def test_haar(self):
        h = framelet_piecewise(FrameletId(1, 1, centered=True))
        assert h.exact_equals(haar_piecewise())
        np.testing.assert_array_equal(h(np.array([-0.5, -0.25, 0.0, 0.25, 0.5, 0.6])), [1, 1, -1, -1, -1, 0])

    @pytest.mark.parametrize("m", range(1, 7))
    def test_top_index_is_bspline_derivative(self, m):
        # psi_m^(m) = D^m [2 B_{2m}(2x - j_m)] / 4^m
        x = np.linspace(-m / 2 - 0.4, m / 2 + 0.4, 157)
        t = 2 * x - parity_offset(m)
        dm = bspline_piecewise(2 * m).derivative(m)(t) if m > 1 else bspline_derivative_eval(2, t)
        expected = 2 * 2**m * np.asarray(dm) / 4**m
        np.testing.assert_allclose(framelet_eval(FrameletId(m, m), x), expected, atol=1e-13)

    @pytest.mark.parametrize("m,ell", IDS)
    def test_zero_integral(self, m, ell):
        assert framelet_piecewise(FrameletId(m, ell)).integral_exact() == 0

    @pytest.mark.parametrize("m,ell", IDS)
    def test_against_oracle(self, m, ell):
        xs = [Q(k, 9) - Q(m + 1, 2) for k in range(0, 9 * (m + 1), 5)]
        got = framelet_eval(FrameletId(m, ell), np.array([float(x) for x in xs]))
        ref = [framelet_oracle(m, ell, x, centered=False) for x in xs]
        np.testing.assert_allclose(got, ref, atol=1e-14)

    @pytest.mark.parametrize("m,ell,x,expected", FROZEN)
    def test_frozen(self, m, ell, x, expected):
        assert framelet_eval(FrameletId(m, ell), x) == pytest.approx(expected, abs=1e-14)

    @pytest.mark.parametrize("m,ell", IDS)
    def test_symmetry_exact(self, m, ell):
        p = framelet_piecewise(FrameletId(m, ell, centered=True))
        expected = p if ell % 2 == 0 else p * -1
        assert p.reflect().exact_equals(expected)

    @pytest.mark.parametrize("m,ell", IDS)
    def test_moments(self, m, ell):
        p = framelet_piecewise(FrameletId(m, ell))
        for j in range(ell):
            assert p.moment_exact(j) == 0
        assert p.moment_exact(ell) != 0  # exactly l vanishing moments

    @pytest.mark.parametrize("m,ell", [(3, 1), (4, 4), (7, 2)])
    def test_compact_support(self, m, ell):
        x = np.array([-m / 2 - 1.01, -m / 2 - 3, m / 2 + 1.01, m / 2 + 7])
        for fid in (FrameletId(m, ell), FrameletId(m, ell, True)):
            np.testing.assert_array_equal(framelet_eval(fid, x), 0.0)
            np.testing.assert_array_equal(framelet_eval_recurrence(fid, x), 0.0)


class TestRecurrence:
    def test_order_two_top(self):
        p = framelet_recurrence_piecewise(2, 2)
        assert p(0.0) == -1.0
        x = np.linspace(-1, -0.51, 11)
        np.testing.assert_allclose(p(x), x + 1, atol=1e-15)
        assert diagonal_lift(haar_piecewise(), 1).exact_equals(p)

    @pytest.mark.parametrize("m,ell", IDS)
    def test_exactly_equals_box_route(self, m, ell):
        box = framelet_piecewise(FrameletId(m, ell, True))
        rec = framelet_recurrence_piecewise(m, ell)
        assert rec.exact_equals(box)

    @pytest.mark.parametrize("m,ell", [(2, 1), (3, 3), (5, 2), (8, 5)])
    def test_pointwise(self, m, ell):
        x = np.arange(-m / 2 - 1, m / 2 + 1, 1 / 64)
        for centered in (False, True):
            fid = FrameletId(m, ell, centered)
            assert np.max(np.abs(framelet_eval_recurrence(fid, x) - framelet_eval(fid, x))) < 1e-12

    @pytest.mark.parametrize("m", range(1, 9))
    def test_index_zero_is_bspline(self, m):
        # the horizontal lift with l = 0 is the B-spline recurrence
        assert framelet_recurrence_piecewise(m, 0).exact_equals(bspline_piecewise(m))

    def test_index_zero_box_route(self):
        # D^0 B(. | [1 x m]) = B_m, so the box route reduces the same way
        assert box_spline_piecewise(DirectionSet.framelet(5, 0)).exact_equals(bspline_piecewise(5))

    def test_invalid_index(self):
        with pytest.raises(InvalidOrderError):
            framelet_recurrence_piecewise(3, 4)


class TestDerivative:
    def test_order_two_top_at_zero(self):
        assert framelet_derivative_eval(FrameletId(2, 2, True), 0.0) == 2.0

    @pytest.mark.parametrize("m,ell", [(m, ell) for m in range(2, 7) for ell in range(1, m + 1)])
    @pytest.mark.parametrize("centered", [False, True])
    def test_finite_difference(self, m, ell, centered):
        fid = FrameletId(m, ell, centered)
        # stay away from knots (multiples of 1/4)
        x = np.arange(-m / 2 - 0.5, m / 2 + 0.5, 0.25) + 0.1
        h = 1e-5
        fd = (framelet_eval_recurrence(fid, x + h) - framelet_eval_recurrence(fid, x - h)) / (2 * h)
        assert np.max(np.abs(framelet_derivative_eval(fid, x) - fd)) < 1e-6

    @pytest.mark.parametrize("m,ell", [(3, 2), (4, 2), (6, 4), (6, 6)])
    def test_even_index_flat_at_center(self, m, ell):
        assert framelet_derivative_eval(FrameletId(m, ell, True), 0.0) == pytest.approx(0.0, abs=1e-14)

    @pytest.mark.parametrize("m", [3, 5])
    def test_matches_exact_derivative(self, m):
        fid = FrameletId(m, 1, True)
        x = np.linspace(-m / 2, m / 2, 77) + 1e-3
        exact = framelet_piecewise(fid).derivative(1)(x)
        np.testing.assert_allclose(framelet_derivative_eval(fid, x), exact, atol=1e-13)

    def test_index_zero_formula_reduces_to_bspline(self):
        # the l < m formula with l = 0 reads sqrt(m/m)(B_{m-1}(x+1/2) - B_{m-1}(x-1/2))
        x = np.linspace(-3, 3, 61)
        p = framelet_recurrence_piecewise(4, 0)
        np.testing.assert_allclose(p(x + 0.5) - p(x - 0.5), bspline_derivative_eval(5, x), atol=1e-15)

    def test_haar_rejected(self):
        with pytest.raises(SmoothnessError):
            framelet_derivative_eval(FrameletId(1, 1), 0.1)


class TestFourierInversion:
    def test_order_two(self):
        fid = FrameletId(2, 1)
        x = np.arange(-2, 2, 1 / 16)
        assert np.max(np.abs(framelet_eval_fourier_inversion(fid, x) - framelet_eval(fid, x))) < 1e-6

    def test_haar(self):
        fid = FrameletId(1, 1, centered=True)
        assert framelet_eval_fourier_inversion(fid, 0.25) == pytest.approx(-1.0, abs=1e-3)
        assert framelet_eval_fourier_inversion(fid, -0.25) == pytest.approx(1.0, abs=1e-3)

    def test_haar_truncated_tail_fails(self):
        with pytest.raises(ToleranceError):
            framelet_eval_fourier_inversion(FrameletId(1, 1), 0.25, QuadratureConfig(tail="truncate"))

    def test_truncated_tail_at_high_order(self):
        fid = FrameletId(6, 3)
        v = framelet_eval_fourier_inversion(fid, 0.3, QuadratureConfig(tail="truncate", truncation=256.0))
        assert v == pytest.approx(framelet_eval(fid, 0.3), abs=1e-9)

    @pytest.mark.parametrize("m,ell", [(3, 1), (4, 3), (7, 7)])
    def test_far_outside(self, m, ell):
        v = framelet_eval_fourier_inversion(FrameletId(m, ell), np.array([m + 5.0, -m - 9.0]))
        assert np.max(np.abs(v)) < 1e-8

    @pytest.mark.parametrize("m,ell", [(2, 2), (5, 3), (8, 1)])
    def test_error_check(self, m, ell):
        fid = FrameletId(m, ell)
        v = framelet_eval_fourier_inversion(fid, 0.4, QuadratureConfig(check_error=True))
        assert v == pytest.approx(framelet_eval(fid, 0.4), abs=1e-8)


class TestCalderon:
    @pytest.mark.parametrize("m", range(1, 9))
    def test_sum_is_one(self, m):
        w = np.linspace(1, 2, 257)
        assert np.max(np.abs(calderon_sum(m, w) - 1)) < 1e-6

    def test_short_sum_below_one(self):
        assert calderon_sum(3, 1.5, n_max=2) < 1


class TestSerialization:
    @pytest.mark.parametrize("m,ell,centered", [(1, 1, True), (3, 2, False), (6, 6, True)])
    @pytest.mark.parametrize("route", ["piecewise", "recurrence"])
    def test_roundtrip(self, m, ell, centered, route):
        fid = FrameletId(m, ell, centered)
        text = framelet_to_json(fid, route)
        data = json.loads(text)
        assert {"m", "l", "centered", "breakpoints", "pieces", "scale"} <= set(data)
        back_id, p = framelet_from_json(text)
        assert back_id == fid
        x = np.linspace(-m, m, 101)
        np.testing.assert_allclose(p(x), framelet_eval(fid, x), atol=1e-15)
