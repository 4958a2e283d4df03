"""Truncated power series arithmetic and the inversion route to codimension."""

import numpy as np
import pytest

from fractalcodim.errors import CompositionConstantTerm, NotInvertible, WrongShape
from fractalcodim.models import ClassicalLienardModel
from fractalcodim.series import (
    TruncatedSeries,
    codimension_from_series,
    g_from_h1,
    psi_from_h1,
    series_add,
    series_compose,
    series_derivative,
    series_invert,
    series_mul,
)


def ts(coeffs, order=None):
    return TruncatedSeries.from_coeffs(coeffs, order=order)


class TestArithmetic:
    def test_mul(self):
        prod = series_mul(ts([1, 1], order=4), ts([1, -1], order=4))
        assert np.allclose(prod.coefficients, [1, 0, -1, 0, 0])

    def test_add_cancels(self):
        s = series_add(ts([0, 1], order=3), ts([0, -1], order=3))
        assert np.allclose(s.coefficients, 0.0)

    def test_compose(self):
        comp = series_compose(ts([0, 0, 1], order=4), ts([0, 1, 1], order=4))
        assert np.allclose(comp.coefficients, [0, 0, 1, 2, 1])

    def test_compose_requires_zero_constant(self):
        with pytest.raises(CompositionConstantTerm):
            series_compose(ts([0, 1], order=3), ts([1, 1], order=3))

    def test_truncation_to_min_order(self):
        prod = series_mul(ts([1, 1, 1], order=2), ts([1, 1], order=5))
        assert prod.order == 2

    def test_derivative(self):
        d = series_derivative(ts([3, 1, 2, 5], order=3))
        assert np.allclose(d.coefficients, [1, 4, 15])

    def test_order_floor(self):
        with pytest.raises(ValueError):
            TruncatedSeries(np.array([1.0]))


class TestPsi:
    def test_h1_zero_gives_identity(self):
        psi = psi_from_h1(ts([0.0], order=8))
        assert np.allclose(psi.coefficients, TruncatedSeries.identity(psi.order).coefficients)

    def test_constant_h1_binomial_coefficients(self):
        c = 1.7
        psi = psi_from_h1(ts([c], order=6))
        assert psi[1] == pytest.approx(1.0)
        assert psi[2] == pytest.approx(-c / 2.0)
        assert psi[3] == pytest.approx(-c * c / 8.0)
        assert psi[4] == pytest.approx(-(c**3) / 16.0)

    def test_squaring_recovers_radicand(self):
        # Psi(x)^2 = x^2 * (1 - x*h1(x)) exactly to truncation
        rng = np.random.default_rng(7)
        for _ in range(10):
            coeffs = rng.uniform(-1.0, 1.0, 5)
            h1 = ts(coeffs, order=10)
            psi = psi_from_h1(h1, order=11)
            sq = series_mul(psi, psi)
            expect = np.zeros(12)
            expect[2] = 1.0
            expect[3 : 3 + len(coeffs)] = -coeffs
            assert np.allclose(sq.coefficients, expect[:12], atol=1e-12)

    def test_linear_h1(self):
        psi = psi_from_h1(ts([0.0, 1.0], order=8))
        # x*sqrt(1-x^2) = x - x^3/2 - x^5/8 - x^7/16...
        assert psi[3] == pytest.approx(-0.5)
        assert psi[5] == pytest.approx(-0.125)
        assert psi[2] == psi[4] == 0.0


class TestLagrangeInversion:
    def test_identity(self):
        inv = series_invert(TruncatedSeries.identity(6))
        assert np.allclose(inv.coefficients, TruncatedSeries.identity(6).coefficients)

    def test_signed_catalan_numbers(self):
        inv = series_invert(ts([0, 1, 1], order=6))
        assert np.allclose(inv.coefficients, [0, 1, -1, 2, -5, 14, -42])

    def test_round_trip_random(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            coeffs = np.concatenate(([0.0, 1.0], rng.uniform(-1.0, 1.0, 10)))
            psi = TruncatedSeries(coeffs)
            comp = series_compose(psi, series_invert(psi))
            expect = TruncatedSeries.identity(comp.order)
            assert np.allclose(comp.coefficients, expect.coefficients, atol=1e-9)

    def test_requires_unit_linear_coefficient(self):
        with pytest.raises(NotInvertible):
            series_invert(ts([0, 2, 1], order=4))
        with pytest.raises(NotInvertible):
            series_invert(ts([1, 1], order=4))


class TestSlowForcing:
    def test_h1_zero_gives_minus_x(self):
        g = g_from_h1(ts([0.0], order=10))
        expect = np.zeros(g.order + 1)
        expect[1] = -1.0
        assert np.allclose(g.coefficients, expect)

    def test_linear_coefficient_is_minus_one(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            g = g_from_h1(ts(rng.uniform(-1, 1, 6), order=12))
            assert g[0] == pytest.approx(0.0, abs=1e-14)
            assert g[1] == pytest.approx(-1.0, abs=1e-12)

    def test_against_numeric_inverse_oracle(self):
        # h1 = 1: Psi(x) = x*sqrt(1-x); invert numerically by bisection and
        # compare g = -Psi^{-1} * (Psi^{-1})' pointwise with the series
        g = g_from_h1(ts([1.0], order=18))

        def psi_fn(x):
            return x * np.sqrt(1.0 - x)

        def psi_inv(y):
            lo, hi = 0.0, 0.6
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if psi_fn(mid) < y:
                    lo = mid
                else:
                    hi = mid
            return 0.5 * (lo + hi)

        for xbar in np.linspace(0.01, 0.1, 10):
            x = psi_inv(xbar)
            dpsi = np.sqrt(1.0 - x) - 0.5 * x / np.sqrt(1.0 - x)
            g_exact = -x / dpsi  # -Psi^{-1}(xbar) * (Psi^{-1})'(xbar)
            g_series = sum(g[i] * xbar**i for i in range(g.order + 1))
            assert g_series == pytest.approx(g_exact, rel=1e-8)


class TestSeriesCodimension:
    def test_constant_h1_is_codimension_one(self):
        for c in (1.0, -0.5, 2.0):
            v = codimension_from_series(g_from_h1(ts([c], order=12)))
            assert v.finite and v.codimension == 1 and v.j == 0
            assert v.alpha == pytest.approx(-3.0 * c)

    def test_single_term_even_h1(self):
        for j in range(5):
            for a in (1.0, 2.0):
                coeffs = np.zeros(2 * j + 1)
                coeffs[2 * j] = a
                v = codimension_from_series(g_from_h1(ts(coeffs, order=16)))
                assert v.finite and v.j == j and v.codimension == j + 1
                # even-part leading coefficient of the straightened forcing
                assert v.alpha == pytest.approx(-(2 * j + 3) * a, rel=1e-9)

    def test_odd_h1_is_infinite(self):
        for coeffs in ([0.0, 1.0], [0.0, -0.3, 0.0, 0.7]):
            g = g_from_h1(ts(coeffs, order=16))
            v = codimension_from_series(g)
            assert not v.finite
            assert v.infinite_up_to_order == g.order

    def test_wrong_shape(self):
        with pytest.raises(WrongShape):
            codimension_from_series(ts([0, 1, 1], order=6))

    def test_alpha_sign_matches_paired_model_sdi(self):
        # h1 = a x^(2j) pairs with F(x) = x^2 - a x^(2j+3); the even-part
        # coefficient and the model's equal-height integral carry one sign
        for j, a in [(0, 1.0), (0, -1.0), (1, 2.0), (2, -2.0)]:
            coeffs = np.zeros(2 * j + 1)
            coeffs[2 * j] = a
            v = codimension_from_series(g_from_h1(ts(coeffs, order=16)))
            paired = ClassicalLienardModel(j=j, a_coeff=-a)
            sdi_val = paired.sdi(1e-3, 1e-3)
            assert (v.alpha > 0) == (sdi_val > 0)

    def test_parity_of_inverse_for_even_h1(self):
        # even h1 with leading term at 2j: Psi^{-1} - x vanishes through 2j+1
        for j in (1, 2, 3):
            coeffs = np.zeros(2 * j + 1)
            coeffs[2 * j] = 1.0
            inv = series_invert(psi_from_h1(ts(coeffs, order=16)))
            resid = inv.coefficients.copy()
            resid[1] -= 1.0
            assert np.all(np.abs(resid[2 : 2 * j + 2]) < 1e-14)
            assert abs(resid[2 * j + 2]) > 1e-3

    def test_detectability_cap(self):
        # truncation order below 2j+3 cannot see the codimension
        coeffs = np.zeros(13)
        coeffs[12] = 1.0  # j = 6 needs order >= 15
        v = codimension_from_series(g_from_h1(ts(coeffs, order=10)))
        assert not v.finite
