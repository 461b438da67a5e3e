import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betageom.errors import DomainError, InvalidDecay, InvalidExponent, \
    NonConvergence
from betageom.quadrature import QuadConfig, integrate_interval, \
    integrate_real_line


def sech(x):
    return 1.0 / np.cosh(x)


class TestRealLine:
    def test_sech_squared(self):
        r = integrate_real_line(lambda x: sech(x) ** 2, 2.0)
        assert r.value.real == pytest.approx(2.0, abs=1e-10)
        assert r.error_estimate <= max(1e-12, 1e-10 * abs(r.value))

    def test_sech(self):
        r = integrate_real_line(sech, 1.0)
        assert r.value.real == pytest.approx(math.pi, rel=1e-10)

    def test_sech_cubed_complex_square(self):
        # sech^3(x) (pi/2 + ix)^2 integrates to pi
        r = integrate_real_line(
            lambda x: sech(x) ** 3 * (math.pi / 2 + 1j * x) ** 2, 3.0)
        assert r.value.real == pytest.approx(math.pi, rel=1e-10)
        assert abs(r.value.imag) <= 1e-12

    def test_invalid_decay(self):
        with pytest.raises(InvalidDecay):
            integrate_real_line(sech, 0.0)
        with pytest.raises(InvalidDecay):
            integrate_real_line(sech, -1.0)

    def test_nonconvergence(self):
        cfg = QuadConfig(rel_tol=1e-10, abs_tol=1e-14, max_refinements=1)
        with pytest.raises(NonConvergence):
            integrate_real_line(lambda x: sech(x) ** 0.3, 0.3, cfg)

    def test_gaussian_bulk_large_exponent(self):
        # mass concentrated far inside the naive truncation window
        a = 1e6
        from scipy.special import gammaln
        exact = math.sqrt(math.pi) * math.exp(
            gammaln(a / 2.0) - gammaln((a + 1) / 2.0))
        r = integrate_real_line(
            lambda x: np.exp(-a * (np.abs(x) + np.log1p(np.exp(-2 * np.abs(x)))
                                   - math.log(2.0))), a / 2.0)
        assert r.value.real == pytest.approx(exact, rel=1e-8)


class TestInterval:
    def test_arcsine_weight(self):
        r = integrate_interval(lambda t: np.ones_like(t), -1.0, 1.0,
                               (-0.5, -0.5))
        assert r.value.real == pytest.approx(math.pi, rel=1e-10)

    def test_flat(self):
        r = integrate_interval(lambda t: np.ones_like(t), -1.0, 1.0,
                               (0.0, 0.0))
        assert r.value.real == pytest.approx(2.0, rel=1e-10)

    def test_semicircle(self):
        r = integrate_interval(lambda t: np.ones_like(t), -1.0, 1.0,
                               (0.5, 0.5))
        assert r.value.real == pytest.approx(math.pi / 2.0, rel=1e-10)

    def test_deep_singularity(self):
        # Beta(0.1, 0.1) normalization: needs precision right at the endpoints
        from scipy.special import gammaln
        exact = math.exp(2 * gammaln(0.1) - gammaln(0.2))
        r = integrate_interval(lambda t: np.ones_like(t), 0.0, 1.0,
                               (-0.9, -0.9))
        assert r.value.real == pytest.approx(exact, rel=1e-9)

    def test_invalid_exponent(self):
        with pytest.raises(InvalidExponent):
            integrate_interval(lambda t: t, -1.0, 1.0, (-1.0, 0.0))
        with pytest.raises(InvalidExponent):
            integrate_interval(lambda t: t, -1.0, 1.0, (0.0, -1.5))

    def test_bad_interval(self):
        with pytest.raises(DomainError):
            integrate_interval(lambda t: t, 1.0, -1.0, (0.0, 0.0))


class TestInvariants:
    @settings(max_examples=20, deadline=None)
    @given(a=st.floats(-3, 3), b=st.floats(-3, 3),
           s1=st.floats(0.5, 2.5), s2=st.floats(0.5, 2.5))
    def test_linearity(self, a, b, s1, s2):
        f = lambda x: sech(s1 * x)
        g = lambda x: sech(s2 * x) ** 2
        lhs = integrate_real_line(lambda x: a * f(x) + b * g(x),
                                  min(s1, 2 * s2)).value
        rhs = (a * integrate_real_line(f, s1).value
               + b * integrate_real_line(g, 2 * s2).value)
        tol = 10 * max(1e-12, 1e-10 * abs(rhs))
        assert abs(lhs - rhs) <= tol

    def test_conjugation(self):
        f = lambda x: sech(x) ** 2 * (1.0 + 2j * x)
        r1 = integrate_real_line(f, 2.0).value
        r2 = integrate_real_line(lambda x: np.conj(f(x)), 2.0).value
        assert r2 == pytest.approx(np.conj(r1), abs=5e-15)

    def test_even_real_symmetry(self):
        r = integrate_real_line(lambda x: sech(x) ** 2 * np.cos(x) ** 2, 2.0)
        assert abs(r.value.imag) <= 1e-12

    def test_refinement_monotonicity(self):
        # halving rel_tol never moves the result away from the truth
        battery = [
            (lambda x: sech(x) ** 2, 2.0, 2.0),
            (sech, 1.0, math.pi),
            (lambda x: sech(x) ** 4, 4.0, 4.0 / 3.0),
        ]
        for f, rho, exact in battery:
            errs = []
            tol = 1e-4
            while tol >= 1e-12:
                cfg = QuadConfig(rel_tol=tol, abs_tol=tol * 1e-2)
                errs.append(abs(integrate_real_line(f, rho, cfg).value - exact))
                tol *= 0.5
            for e_prev, e_next in zip(errs, errs[1:]):
                assert e_next <= e_prev + 1e-15
