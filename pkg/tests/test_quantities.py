import math

import numpy as np
import pytest

from betageom.errors import ConvergenceDomain, DomainError, SubsetBlowup
from betageom.quantities import (ThetaArgs, a1_quantity, a_quantity,
                                 ab_pair_sum, b1_quantity, b_quantity, big_A,
                                 big_B, ext_quantity, ext_quantity_direct,
                                 int_quantity, theta, theta_factors,
                                 theta_size_sums, theta_size_sums_naive)
from betageom.special import GammaMultiset, c_const
from oracles import a_ref, b_ref, theta_ref


class TestAQuantity:
    def test_empty(self):
        q = a_quantity(2.0, ())
        assert q.value == pytest.approx(2.0, rel=1e-13)
        assert q.method == "closed-form-d0"

    def test_single(self):
        q = a_quantity(4.0, (1.0,))
        assert q.value == pytest.approx(4.0 / 3.0, rel=1e-13)
        assert q.method == "closed-form-d1"

    def test_two_zero_args(self):
        q = a_quantity(3.0, (0.0, 0.0))
        assert q.value == pytest.approx(math.pi, rel=1e-10)
        assert q.method == "line-representation"
        assert q.imag_residual <= 1e-8

    def test_against_oracle(self):
        for alpha, args in [(5.0, (1.0, 2.0)), (7.3, (0.5, 1.5, 2.0)),
                            (4.2, (0.0, 3.1))]:
            got = a_quantity(alpha, args).value
            assert got == pytest.approx(a_ref(alpha, args), rel=1e-9)

    def test_convergence_domain(self):
        with pytest.raises(ConvergenceDomain):
            a_quantity(2.9, (1.0, 2.0))

    def test_a1_empty_and_single(self):
        assert a1_quantity(5.0, ()).value == 0.0
        assert a1_quantity(3.0, (1.0,)).value == pytest.approx(-2.0 / 3.0,
                                                               rel=1e-13)


class TestBQuantity:
    def test_empty(self):
        assert b_quantity(0.0, ()).value == pytest.approx(math.pi, rel=1e-13)
        assert b_quantity(2.0, ()).value == pytest.approx(math.pi / 2,
                                                          rel=1e-13)

    def test_single(self):
        assert b_quantity(1.0, (1.0,)).value == pytest.approx(2.0, rel=1e-13)

    def test_against_oracle(self):
        for alpha, args in [(1.5, (1.0, 2.0)), (0.0, (0.5, 0.5)),
                            (3.0, (0.0, 1.0, 2.0))]:
            got = b_quantity(alpha, args).value
            assert got == pytest.approx(b_ref(alpha, args), rel=1e-9)

    def test_domain(self):
        with pytest.raises(DomainError):
            b_quantity(-1.0, ())
        with pytest.raises(DomainError):
            b_quantity(-1.2, (1.0, 1.0))
        with pytest.raises(DomainError):
            b1_quantity(0.0, (1.0,))

    def test_b1_empty_and_single(self):
        assert b1_quantity(3.0, ()).value == 0.0
        assert b1_quantity(1.0, (1.0,)).value == pytest.approx(math.pi / 2,
                                                               rel=1e-13)


def _residual_tol(*values):
    return 1e-7 * max(1.0, *(abs(v) for v in values))


class TestRecurrences:
    """Residuals of the two-term and four-index recurrence identities."""

    def _random_args(self, rng, d):
        return tuple(rng.uniform(0.0, 2.5, d))

    def test_a_family(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            d = int(rng.integers(0, 5))
            args = self._random_args(rng, d)
            alpha = sum(args) + rng.uniform(0.7, 4.0)
            a0 = a_quantity(alpha, args).value
            a2 = a_quantity(alpha + 2.0, args).value
            rhs1 = math.fsum(
                a1_quantity(alpha - args[j],
                            args[:j] + args[j + 1:]).value
                for j in range(d))
            res1 = alpha * a0 - (alpha + 1.0) * a2 - rhs1
            assert abs(res1) <= _residual_tol(a0, a2)

            a1v = a1_quantity(alpha, args).value
            rhs2 = -math.fsum(
                a_quantity(alpha - args[j], args[:j] + args[j + 1:]).value
                for j in range(d))
            assert abs(alpha * a1v - rhs2) <= _residual_tol(a1v)

    def test_b_family(self):
        rng = np.random.default_rng(8)
        for _ in range(25):
            d = int(rng.integers(0, 5))
            args = self._random_args(rng, d)
            alpha = rng.uniform(1.2, 5.0)
            b0 = b_quantity(alpha, args).value
            bm2 = b_quantity(alpha - 2.0, args).value
            rhs1 = -math.fsum(
                b1_quantity(alpha + args[j], args[:j] + args[j + 1:]).value
                for j in range(d))
            res1 = alpha * b0 - (alpha - 1.0) * bm2 - rhs1
            assert abs(res1) <= _residual_tol(b0, bm2)

            b1v = b1_quantity(alpha, args).value
            rhs2 = math.fsum(
                b_quantity(alpha + args[j], args[:j] + args[j + 1:]).value
                for j in range(d))
            assert abs(alpha * b1v - rhs2) <= _residual_tol(b1v)

    def test_two_step_relations(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            d = int(rng.integers(2, 5))
            args = self._random_args(rng, d)
            alpha = sum(args) + rng.uniform(0.7, 3.0)
            lhs = ((alpha + 1.0) * a_quantity(alpha + 2.0, args).value
                   - alpha * a_quantity(alpha, args).value)
            rhs = math.fsum(
                a_quantity(alpha - args[j1] - args[j2],
                           tuple(a for i, a in enumerate(args)
                                 if i not in (j1, j2))).value
                / (alpha - args[j1])
                for j1 in range(d) for j2 in range(d) if j1 != j2)
            assert abs(lhs - rhs) <= _residual_tol(lhs)

            beta = rng.uniform(1.5, 4.0)
            lhs = ((beta - 1.0) * b_quantity(beta - 2.0, args).value
                   - beta * b_quantity(beta, args).value)
            rhs = math.fsum(
                b_quantity(beta + args[j1] + args[j2],
                           tuple(a for i, a in enumerate(args)
                                 if i not in (j1, j2))).value
                / (beta + args[j1])
                for j1 in range(d) for j2 in range(d) if j1 != j2)
            assert abs(lhs - rhs) <= _residual_tol(lhs)


class TestPairSums:
    def test_periodicity_and_closed_values(self):
        rng = np.random.default_rng(10)
        for d in range(0, 4):
            lambdas = tuple(rng.uniform(0.0, 2.0, d))
            lam = rng.uniform(-0.9, 2.0)
            for zeta in (+1, -1):
                s = ab_pair_sum(lam, lambdas, zeta)
                s_shift = ab_pair_sum(lam + 2.0, lambdas, zeta)
                assert abs(s - s_shift) <= 1e-7 * max(1.0, abs(s))
            s_minus = ab_pair_sum(lam, lambdas, -1)
            target_minus = 2.0 * math.pi if d == 0 else 0.0
            assert abs(s_minus - target_minus) <= 1e-7
            s_plus = ab_pair_sum(lam, lambdas, +1)
            target_plus = 2.0 * math.pi * math.prod(
                1.0 / c_const(li / 2.0 - 0.5) for li in lambdas)
            assert s_plus == pytest.approx(target_plus, rel=1e-7)


class TestSpecialAValues:
    def test_product_formula(self):
        # a(d + 2 + sum; args of size d+1) = pi * prod 1/(a_i + 1)
        rng = np.random.default_rng(11)
        for d in (1, 2, 3):
            for _ in range(5):
                args = tuple(rng.uniform(0.0, 2.0, d + 1))
                got = a_quantity(d + 2.0 + sum(args), args).value
                want = math.pi * math.prod(1.0 / (ai + 1.0) for ai in args)
                assert got == pytest.approx(want, rel=1e-8)

    def test_vanishing(self):
        rng = np.random.default_rng(12)
        for d in (2, 3, 4, 5):
            for ell in range(0, (d - 1) // 2 + 1):
                args = tuple(rng.uniform(0.0, 1.5, d + 1))
                got = a_quantity(d - 2.0 * ell + sum(args), args).value
                assert abs(got) <= 1e-8


class TestTheta:
    def test_empty(self):
        assert theta(ThetaArgs(0.7, GammaMultiset(), GammaMultiset())) == 1.0

    def test_single_z(self):
        args = ThetaArgs(1.3, GammaMultiset(), GammaMultiset([2.2]))
        assert theta(args) == pytest.approx(0.5, rel=1e-13)

    def test_large_x_limit(self):
        args = ThetaArgs(1e4, GammaMultiset([1.0, 2.0]), GammaMultiset([3.0]))
        assert theta(args) == pytest.approx(0.125, rel=0.01)

    def test_against_oracle(self):
        for x, Y, Z in [(0.8, (1.0,), (0.5, 2.0)), (0.0, (0.3, 0.7), (1.0,))]:
            got = theta(ThetaArgs(x, GammaMultiset(Y), GammaMultiset(Z)))
            assert got == pytest.approx(theta_ref(x, Y, Z), rel=1e-8)

    def test_factor_product(self):
        args = ThetaArgs(0.9, GammaMultiset([1.2, 0.4]), GammaMultiset([2.0]))
        fy, fz = theta_factors(args)
        assert fy * fz == pytest.approx(theta(args), rel=1e-13)

    def test_permutation_bit_identical(self):
        a1 = theta(ThetaArgs(0.5, GammaMultiset([2.0, 1.0, 1.5]),
                             GammaMultiset([0.3, 0.9])))
        a2 = theta(ThetaArgs(0.5, GammaMultiset([1.5, 2.0, 1.0]),
                             GammaMultiset([0.9, 0.3])))
        assert a1 == a2  # exactly equal, canonical sorted representation

    def test_domain(self):
        with pytest.raises(DomainError):
            ThetaArgs(-0.5, GammaMultiset(), GammaMultiset())

    def test_sum_to_one_and_halves(self):
        rng = np.random.default_rng(13)
        for _ in range(5):
            n = int(rng.integers(1, 6))
            g = rng.uniform(-0.4, 5.0)
            gs = list(rng.uniform(0.0, 6.0, n))
            s = theta_size_sums(g, gs)
            assert math.fsum(s) == pytest.approx(1.0, abs=1e-7)
            assert math.fsum(s[1::2]) == pytest.approx(0.5, abs=1e-7)
            assert math.fsum(s[0::2]) == pytest.approx(0.5, abs=1e-7)

    def test_vanishing_at_half_dim(self):
        # Theta(d/2 - 1; Y; Z) = 0 when #Y = d + 1
        from betageom.quantities import _theta_raw
        from betageom.quadrature import DEFAULT_CONFIG
        rng = np.random.default_rng(14)
        for d in (2, 3, 4):
            y = tuple(rng.uniform(0.0, 2.0, d + 1))
            z = tuple(rng.uniform(0.0, 2.0, 2))
            got = _theta_raw(d / 2.0 - 1.0, y, z, DEFAULT_CONFIG)
            assert abs(got) <= 1e-8


class TestSubsetEngine:
    def test_grouped_matches_naive(self):
        rng = np.random.default_rng(15)
        pool = [0.5, 0.5, 1.2, 2.0, 0.5]
        s_fast = theta_size_sums(0.7, pool)
        s_naive = theta_size_sums_naive(0.7, pool)
        for a, b in zip(s_fast, s_naive):
            assert a == pytest.approx(b, abs=1e-12)

    def test_equal_values_collapse(self):
        s_fast = theta_size_sums(0.3, [1.1] * 6)
        s_naive = theta_size_sums_naive(0.3, [1.1] * 6)
        for a, b in zip(s_fast, s_naive):
            assert a == pytest.approx(b, abs=1e-12)

    def test_cap(self):
        with pytest.raises(SubsetBlowup):
            theta_size_sums(0.5, [1.0] * 21)


class TestIntExt:
    def test_int_conventions(self):
        assert int_quantity(0.3, []) == 1.0
        assert int_quantity(0.3, [-0.5]) == 0.5

    def test_int_triangle_symmetry(self):
        assert int_quantity(0.0, [0.0, 0.0]) == pytest.approx(1.0 / 6.0,
                                                              abs=1e-9)

    def test_int_apex_limit(self):
        assert int_quantity(1e6, [0.0, 0.0, 0.0]) == pytest.approx(0.125,
                                                                   rel=0.01)

    def test_ext_conventions_and_values(self):
        assert ext_quantity(1.0, [2.0]) == 0.5
        assert ext_quantity(0.0, [0.0, 0.0, 0.0]) == pytest.approx(0.25,
                                                                   abs=1e-9)
        assert ext_quantity(1e6, [0.0, 0.0]) == pytest.approx(0.25, rel=0.01)

    def test_ext_dual_paths(self):
        rng = np.random.default_rng(16)
        for _ in range(8):
            d = int(rng.integers(2, 5))
            lo = -(d + 1) / 2.0
            beta = rng.uniform(lo + 0.3, 3.0)
            betas = list(rng.uniform(lo + 0.3, 3.0, d))
            t_path = ext_quantity(beta, betas)
            d_path = ext_quantity_direct(beta, betas)
            assert t_path == pytest.approx(d_path, abs=1e-8)

    def test_domain(self):
        with pytest.raises(DomainError):
            int_quantity(-1.2, [0.0, 0.0])
        with pytest.raises(DomainError):
            ext_quantity(-2.0, [0.0, 0.0])  # lo = -1.5


class TestAB:
    def test_b_empty(self):
        assert big_B(0.8, ()) == 1.0
        assert big_A(0.8, ()) == 1.0

    def test_a_single(self):
        assert big_A(1.0, (1.0,)) == pytest.approx(0.5, rel=1e-12)

    def test_a_exchangeable(self):
        # equal arguments reduce to the triangle symmetry value
        assert big_A(1.0, (1.0, 1.0)) == pytest.approx(1.0 / 6.0, abs=1e-9)

    def test_reparameterizations(self):
        # A(beta + p/2; {beta_i + p/2}) = Int(beta; betas) and the Ext analog
        rng = np.random.default_rng(17)
        for _ in range(5):
            p = int(rng.integers(2, 5))
            beta = rng.uniform(-0.9, 2.0)
            betas = list(rng.uniform(-0.9, 2.0, p))
            a_val = big_A(beta + p / 2.0, tuple(b + p / 2.0 for b in betas))
            assert a_val == pytest.approx(int_quantity(beta, betas), abs=1e-9)
            g = beta + p / 2.0 + math.fsum(b + p / 2.0 for b in betas)
            b_val = big_B(g, tuple(b + p / 2.0 for b in betas))
            assert b_val == pytest.approx(ext_quantity(beta, betas), abs=1e-9)

    def test_domain(self):
        with pytest.raises(DomainError):
            big_A(-0.1, (1.0, 0.2))  # needs gamma >= d/2 - 1 = 0
        with pytest.raises(DomainError):
            big_B(1.0, (1.0, 1.0))  # gamma - sum = -1 < 0
