import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betageom.errors import DomainError
from betageom.special import (BetaParam, GammaMultiset, c_const, f_imag,
                              f_real, kappa, log_cosh_pow_integral,
                              sech_pow_primitive)
from oracles import F_imag_ref, F_ref, c_ref


class TestConstants:
    def test_c_values(self):
        assert c_const(0.0) == pytest.approx(0.5, rel=1e-14)
        assert c_const(-0.5) == pytest.approx(1.0 / math.pi, rel=1e-14)
        assert c_const(1.0) == pytest.approx(0.75, rel=1e-14)

    def test_c_pole_is_zero(self):
        assert c_const(-1.0) == 0.0

    def test_c_domain(self):
        with pytest.raises(DomainError):
            c_const(-1.5)
        with pytest.raises(DomainError):
            c_const(-2.0)

    def test_duplication_identity(self):
        # c(a) c(a - 1/2) = (2a + 1) / (2 pi)
        rng = np.random.default_rng(0)
        for a in rng.uniform(-0.499, 12.0, 200):
            lhs = c_const(a) * c_const(a - 0.5)
            assert lhs == pytest.approx((2 * a + 1) / (2 * math.pi),
                                        abs=1e-12 * max(1, abs(lhs)))

    def test_kappa(self):
        assert kappa(0) == pytest.approx(1.0)
        assert kappa(1) == pytest.approx(2.0)
        assert kappa(2) == pytest.approx(math.pi)
        assert kappa(3) == pytest.approx(4 * math.pi / 3)
        with pytest.raises(DomainError):
            kappa(-1)


class TestFReal:
    def test_examples(self):
        assert f_real(0.0, math.pi / 2) == pytest.approx(math.pi, rel=1e-12)
        assert f_real(2.0, 0.0) == pytest.approx(math.pi / 4, rel=1e-12)
        assert f_real(1.0, math.pi / 2) == pytest.approx(2.0, rel=1e-12)

    def test_against_oracle(self):
        for beta, x in [(-0.5, 0.3), (0.7, -1.2), (3.2, 1.0), (9.0, 0.2)]:
            assert f_real(beta, x) == pytest.approx(F_ref(beta, x), rel=1e-11)

    def test_full_integral_identity(self):
        # int_{-pi/2}^{pi/2} cos^{h-1} = 1 / c((h-2)/2)
        rng = np.random.default_rng(1)
        for h in rng.uniform(0.01, 20.0, 50):
            full = f_real(h - 1.0, math.pi / 2)
            assert full == pytest.approx(1.0 / c_const((h - 2.0) / 2.0),
                                         rel=1e-10)

    @settings(max_examples=30, deadline=None)
    @given(beta=st.floats(-0.9, 8.0), x=st.floats(0.0, math.pi / 2 - 1e-6))
    def test_oddness_about_zero(self, beta, x):
        mid = f_real(beta, 0.0)
        assert (f_real(beta, x) - mid) == pytest.approx(
            -(f_real(beta, -x) - mid), abs=1e-12)

    def test_monotone(self):
        xs = np.linspace(-math.pi / 2 + 0.01, math.pi / 2 - 0.01, 41)
        vals = [f_real(1.7, x) for x in xs]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_domain(self):
        with pytest.raises(DomainError):
            f_real(-1.0, 0.0)
        with pytest.raises(DomainError):
            f_real(0.5, 2.0)


class TestFImag:
    def test_examples(self):
        assert f_imag(0.0, 1.5) == pytest.approx(math.pi / 2 + 1.5j)
        assert f_imag(1.0, 0.0) == pytest.approx(1.0 + 0.0j)
        assert f_imag(1.0, 2.0) == pytest.approx(1.0 + 1j * math.sinh(2.0),
                                                 rel=1e-12)

    def test_against_oracle(self):
        for beta, x in [(0.4, 0.8), (2.0, 3.0), (5.5, 1.2), (16.0, 2.5)]:
            ref = F_imag_ref(beta, x)
            got = f_imag(beta, x)
            assert got.real == pytest.approx(ref.real, rel=1e-11)
            assert got.imag == pytest.approx(ref.imag, rel=1e-11)

    def test_imag_odd_real_constant(self):
        for x in [0.3, 1.0, 4.0]:
            plus = f_imag(2.3, x)
            minus = f_imag(2.3, -x)
            assert plus.imag == pytest.approx(-minus.imag, rel=1e-13)
            assert plus.real == pytest.approx(minus.real, rel=1e-13)

    def test_domain(self):
        with pytest.raises(DomainError):
            f_imag(-0.1, 1.0)


class TestCoshPowIntegral:
    def test_regimes_against_each_other(self):
        # values must be continuous across the plain / layer / recurrence
        # branch boundaries
        for beta in [0.9, 7.0, 139.0, 145.0, 8000.0]:
            xs = np.linspace(0.05, 6.0, 97)
            logs = log_cosh_pow_integral(beta, xs)
            diffs = np.diff(logs)
            assert np.all(diffs > 0)  # strictly increasing primitive

    def test_scaling_extreme(self):
        # beta so large the primitive overflows double range: log stays finite
        v = log_cosh_pow_integral(2e6, np.array([0.5, 5.0, 30.0]))
        assert np.all(np.isfinite(v))
        assert v[-1] > 1e6  # ~ beta * log cosh(30)

    def test_decaying_primitive_odd(self):
        u = np.array([-2.0, -0.5, 0.0, 0.5, 2.0])
        t = sech_pow_primitive(3.0, u)
        assert t[2] == 0.0
        assert t[0] == pytest.approx(-t[4], rel=1e-14)
        assert t[1] == pytest.approx(-t[3], rel=1e-14)


class TestTypes:
    def test_beta_param(self):
        assert BetaParam(-1.0).value == -1.0
        with pytest.raises(DomainError):
            BetaParam(-1.01)

    def test_multiset_sorted_and_equal(self):
        a = GammaMultiset([3.0, 1.0, 2.0])
        b = GammaMultiset([2.0, 3.0, 1.0])
        assert a == b
        assert a.elements == (1.0, 2.0, 3.0)
        assert hash(a) == hash(b)

    def test_multiset_union_adds_multiplicities(self):
        a = GammaMultiset([1.0, 2.0])
        b = GammaMultiset([2.0])
        assert (a | b).elements == (1.0, 2.0, 2.0)

    def test_multiset_keeps_duplicates(self):
        m = GammaMultiset([1.0, 1.0, 1.0])
        assert len(m) == 3
        assert m.grouped() == [(1.0, 3)]

    def test_multiset_rejects_negative(self):
        with pytest.raises(DomainError):
            GammaMultiset([-0.1])
