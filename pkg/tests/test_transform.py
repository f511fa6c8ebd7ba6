from math import factorial, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bframelets.errors import InvalidInputError, QuadratureError, UnsupportedCaseError
from bframelets.framelets import FrameletId, framelet_piecewise
from bframelets.quadrature import QuadratureConfig
from bframelets.splinecore import DirectionSet, box_spline_eval
from bframelets.transform import (
    TEST_FUNCTIONS,
    IndexBox,
    TestFunction,
    coefficient_table,
    coefficient_via_difference,
    difference_quarter,
    discretize_Tn,
    framelet_coefficient,
    framelet_coefficients,
    get_test_function,
    parseval_ratio,
    reconstruct_partial,
)

ONE = TestFunction("one", lambda x: np.ones_like(x), (-1000.0, 1000.0))
LINEAR = TestFunction("linear", lambda x: 3 * x - 1, (-1000.0, 1000.0))
SMOOTH = ["gaussian", "chirp", "ramp"]


class TestRegistry:
    @pytest.mark.parametrize("name", sorted(TEST_FUNCTIONS))
    def test_normalized(self, name):
        assert get_test_function(name, normalized=True).norm_squared() == pytest.approx(1.0, abs=1e-10)

    def test_gaussian_norm(self):
        assert get_test_function("gaussian").norm_squared() == pytest.approx(sqrt(np.pi / 2), abs=1e-12)

    def test_bump_values(self):
        f = get_test_function("bump")
        np.testing.assert_array_equal(f(np.array([-1.0, 1.0, 2.0])), 0.0)
        assert f(0.0) == 1.0

    def test_unknown(self):
        with pytest.raises(InvalidInputError):
            get_test_function("sawtooth")

    def test_algebra(self):
        f, g = get_test_function("gaussian"), get_test_function("ramp")
        h = f.scaled(2.0) + g
        assert h.name == "gaussian+ramp"
        assert h(0.5) == pytest.approx(2 * f(0.5) + g(0.5))


class TestIndexBox:
    def test_empty(self):
        assert IndexBox(1, 0).empty
        assert list(IndexBox(1, 0).scales) == []
        with pytest.raises(InvalidInputError):
            IndexBox(3, 0)

    def test_translates_from_supports(self):
        box = IndexBox(0, 2)
        ks = box.translates(1, (-1.0, 1.0), (-2.0, 3.0))
        # (k - 1)/2 <= 3 and (k + 1)/2 >= -2
        assert ks[0] == -5 and ks[-1] == 7

    def test_explicit_ranges(self):
        box = IndexBox(0, 1, {0: (-2, 2)})
        np.testing.assert_array_equal(box.translates(0, (-1, 1), (-9, 9)), np.arange(-2, 3))
        assert box.to_dict() == {"n_min": 0, "n_max": 1, "k_ranges": {"0": [-2, 2]}}


class TestCoefficients:
    @pytest.mark.parametrize("m,ell,n,k", [(2, 1, 0, 0), (3, 2, 1, 3), (5, 5, -1, 2), (8, 4, 2, -7)])
    def test_constant_is_annihilated(self, m, ell, n, k):
        assert abs(framelet_coefficient(ONE, FrameletId(m, ell), n, k)) < 1e-12

    @pytest.mark.parametrize("m,ell,n,k", [(2, 1, 0, 0), (3, 3, 1, -2), (4, 2, -1, 1), (6, 5, 2, 3)])
    def test_self_coefficient_is_norm(self, m, ell, n, k):
        fid = FrameletId(m, ell)
        p = framelet_piecewise(fid)
        f = TestFunction.from_piecewise("psi", p, n, k)
        assert framelet_coefficient(f, fid, n, k) == pytest.approx(p.norm_squared(), abs=1e-13)

    def test_decay_in_translate(self):
        f = get_test_function("gaussian")
        c = np.abs(framelet_coefficients(f, FrameletId(2, 2), 0, np.arange(2, 9)))
        assert np.all(np.diff(c) < 0)

    @pytest.mark.parametrize("name", SMOOTH)
    def test_linearity(self, name):
        f, g = get_test_function(name), get_test_function("bump")
        fid, ks = FrameletId(4, 3), np.arange(-3, 4)
        lhs = framelet_coefficients(f.scaled(2.5) + g.scaled(-0.75), fid, 1, ks)
        rhs = 2.5 * framelet_coefficients(f, fid, 1, ks) - 0.75 * framelet_coefficients(g, fid, 1, ks)
        np.testing.assert_allclose(lhs, rhs, atol=1e-15)

    def test_quadrature_error_check(self):
        quad = QuadratureConfig(order=2, panel_width=0.5, check_error=True, abs_tol=1e-14)
        with pytest.raises(QuadratureError):
            framelet_coefficient(get_test_function("chirp"), FrameletId(2, 1), 0, 1, quad)

    def test_error_check_passes_when_resolved(self):
        quad = QuadratureConfig(check_error=True, abs_tol=1e-12)
        c = framelet_coefficient(get_test_function("gaussian"), FrameletId(4, 2), 0, 1, quad)
        assert c == pytest.approx(framelet_coefficient(get_test_function("gaussian"), FrameletId(4, 2), 0, 1))

    def test_coefficient_table_records(self):
        recs = coefficient_table(get_test_function("bump"), 2, IndexBox(0, 1))
        assert {r["l"] for r in recs} == {1, 2}
        assert {r["n"] for r in recs} == {0, 1}
        assert all(set(r) == {"l", "n", "k", "value"} for r in recs)


class TestDiscretization:
    @pytest.mark.parametrize("m,ell,n", [(2, 1, 0), (4, 2, 1), (5, 0, -2), (6, 6, 3)])
    def test_constant(self, m, ell, n):
        x = np.array([-1.3, 0.0, 2.7])
        np.testing.assert_allclose(discretize_Tn(ONE, m, ell, n, x), 2.0 ** (n / 2), atol=1e-13)

    @pytest.mark.parametrize("m,ell,n", [(2, 1, 0), (4, 3, 1), (6, 2, -1)])
    def test_linear_stays_linear(self, m, ell, n):
        x = np.linspace(-2, 2, 9)
        t = discretize_Tn(LINEAR, m, ell, n, x)
        np.testing.assert_allclose(t, 2.0 ** (n / 2) * (3 * x / 2.0**n - 1), atol=1e-12)

    @pytest.mark.parametrize("name", ["gaussian", "chirp"])
    def test_riemann_sum(self, name):
        f = get_test_function(name)
        m, ell, n, x = 4, 2, 1, 0.3
        dirs = DirectionSet.discretization(m, ell)
        half = float(dirs.support_length) / 2
        N = 400_000
        t = -half + (np.arange(N) + 0.5) * (2 * half / N)
        ref = 2.0 ** (n / 2) * np.sum(f((x + t) / 2.0**n) * box_spline_eval(dirs, t)) * (2 * half / N)
        assert abs(discretize_Tn(f, m, ell, n, x) - ref) < 1e-8

    def test_invalid(self):
        with pytest.raises(InvalidInputError):
            discretize_Tn(ONE, 3, 4, 0, 0.0)


class TestDifference:
    def test_identity(self):
        assert difference_quarter(np.sin, 0, 0.7) == np.sin(0.7)

    @pytest.mark.parametrize("x", [-3.0, 0.0, 1.25])
    def test_linear(self, x):
        assert difference_quarter(lambda t: t, 1, x) == pytest.approx(0.5)

    def test_square(self):
        # (1/2)^2 - 2 * 0 + (-1/2)^2
        assert difference_quarter(lambda t: t * t, 2, 0.0) == pytest.approx(1 / 2)

    @given(st.integers(0, 6), st.floats(-5, 5))
    def test_polynomial_degree_drop(self, order, x):
        # order-fold differences of x^order equal order! (1/2)^order
        v = difference_quarter(lambda t: t**order, order, x)
        assert v == pytest.approx(factorial(order) * 0.5**order, rel=1e-6, abs=1e-9)

    def test_negative_order(self):
        with pytest.raises(InvalidInputError):
            difference_quarter(np.sin, -1, 0.0)


class TestDualRoute:
    def test_gaussian_example(self):
        f = get_test_function("gaussian")
        fid = FrameletId(2, 1)
        assert abs(coefficient_via_difference(f, fid, 0, 0) - framelet_coefficient(f, fid, 0, 0)) < 1e-7

    def test_second_example(self):
        f = get_test_function("gaussian")
        fid = FrameletId(4, 2)
        assert abs(coefficient_via_difference(f, fid, 1, 3) - framelet_coefficient(f, fid, 1, 3)) < 1e-7

    def test_constant(self):
        fid = FrameletId(4, 3)
        assert abs(coefficient_via_difference(ONE, fid, 0, 1)) < 1e-12
        assert abs(framelet_coefficient(ONE, fid, 0, 1)) < 1e-12

    @settings(max_examples=25)
    @given(st.sampled_from([2, 4, 6, 8]).flatmap(lambda m: st.tuples(st.just(m), st.integers(1, m))),
           st.integers(-1, 1), st.integers(-4, 4), st.sampled_from(SMOOTH + ["bump"]))
    def test_property(self, mi, n, k, name):
        f = get_test_function(name)
        fid = FrameletId(*mi)
        assert abs(coefficient_via_difference(f, fid, n, k) - framelet_coefficient(f, fid, n, k)) < 1e-7

    def test_array_of_translates(self):
        f, fid = get_test_function("chirp"), FrameletId(6, 4)
        ks = np.arange(-4, 5)
        np.testing.assert_allclose(coefficient_via_difference(f, fid, 1, ks),
                                   framelet_coefficients(f, fid, 1, ks), atol=1e-7)

    def test_odd_order_unsupported(self):
        with pytest.raises(UnsupportedCaseError):
            coefficient_via_difference(ONE, FrameletId(3, 1), 0, 0)


class TestParseval:
    def test_bounded_and_monotone(self):
        f = get_test_function("bump", normalized=True)
        ratios = [parseval_ratio(f, 3, IndexBox(lo, hi)) for lo, hi in [(0, 0), (-1, 1), (-3, 3), (-5, 6)]]
        assert all(b >= a for a, b in zip(ratios, ratios[1:]))
        assert ratios[-1] <= 1 + 1e-10
        assert ratios[-1] > 0.9

    def test_zero_mean_function_is_nearly_captured(self):
        # the ramp has zero mean, so coarse scales carry little energy
        f = get_test_function("ramp", normalized=True)
        r = parseval_ratio(f, 4, IndexBox(-6, 7))
        assert 0.999 < r <= 1 + 1e-10

    def test_thread_independent(self):
        f = get_test_function("chirp", normalized=True)
        a = parseval_ratio(f, 2, IndexBox(-1, 2), threads=1)
        b = parseval_ratio(f, 2, IndexBox(-1, 2), threads=4)
        assert a == b


class TestReconstruction:
    def test_empty_box(self):
        x = np.linspace(-1, 1, 5)
        np.testing.assert_array_equal(reconstruct_partial(get_test_function("bump"), 2, IndexBox(1, 0), None, x), 0.0)

    def test_error_decreases(self):
        f = get_test_function("ramp")
        x = np.linspace(-3, 3, 121)
        errs = []
        for lo, hi in [(0, 0), (-1, 2), (-3, 4)]:
            r = reconstruct_partial(f, 2, IndexBox(lo, hi), None, x)
            errs.append(np.sqrt(np.mean((r - f(x)) ** 2)))
        assert errs[0] > errs[1] > errs[2]

    def test_single_framelet_direct_sum(self):
        m = 2
        p = framelet_piecewise(FrameletId(m, 1))
        f = TestFunction.from_piecewise("psi", p)
        box = IndexBox(0, 0, {0: (-3, 3)})
        x = np.linspace(-2.5, 2.5, 41)
        # oracle: exact inner products of piecewise polynomials
        ref = np.zeros_like(x)
        for ell in range(1, m + 1):
            q = framelet_piecewise(FrameletId(m, ell))
            for k in range(-3, 4):
                qk = q.shift(k)
                ref += float(p.inner_exact(qk)) * float(p.scale) * float(qk.scale) * qk(x)
        np.testing.assert_allclose(reconstruct_partial(f, m, box, None, x), ref, atol=1e-13)
