"""The quantity calculus.

Everything the cone and polytope layers need reduces to two families of
integrals over the real line,

    a(alpha; alpha_1..alpha_d)  = int sech^alpha(x) prod_j F_{alpha_j}(i x) dx,
    b(alpha; alpha_1..alpha_d)  = int_{-pi/2}^{pi/2} cos^alpha prod_j F_{alpha_j},

their first-moment variants a_1 / b_1, and the function

    Theta(x; Y; Z) = (2 pi)^{-1} prod_{w in Y+Z} c(w - 1/2)
                     * a(2x + 2 sum Y + 2; 2Y) * (2x + 2 sum Y + 1)
                     * b(2x + 2 sum Y; 2Z),

which factors as Theta(x; Y; {}) * Theta(x + sum Y; {}; Z).  b is evaluated
in its real-line form (substituting t = tanh u), which removes the
(-1, 1)-endpoint singularities entirely; the interval forms are kept only as
cross-check paths.  Multiset arguments of size 0 or 1 always route to the
extended-range closed forms.

Internal/external quantities and the A/B-quantities are reparameterizations
of Theta:

    Int(beta; beta_1..beta_d) = Theta(beta + d/2; {beta_i + d/2}; {}),
    Ext(beta; beta_1..beta_d) = Theta(beta + d/2; {}; {beta_i + d/2}),
    A(g; g_1..g_p) = Theta(g; {g_i}; {}),
    B(g; g_1..g_p) = Theta(g - sum g_i; {}; {g_i}).
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import special
from .errors import (ConvergenceDomain, DomainError, ResidualError,
                     SubsetBlowup)
from .quadrature import DEFAULT_CONFIG, QuadConfig, integrate_interval, \
    integrate_real_line
from .special import GammaMultiset, c_const, log_cosh

SUBSET_CAP = 20
_IMAG_RESIDUAL_CAP = 1e-8


@dataclasses.dataclass(frozen=True)
class ThetaArgs:
    x: float
    Y: GammaMultiset
    Z: GammaMultiset

    def __post_init__(self) -> None:
        if not self.x > -0.5:
            raise DomainError(f"Theta requires x > -1/2, got {self.x}")


@dataclasses.dataclass(frozen=True)
class QuantityValue:
    value: float
    imag_residual: float
    method: str

    def __float__(self) -> float:
        return self.value


def _as_sorted_tuple(args) -> tuple:
    if isinstance(args, GammaMultiset):
        return args.elements
    return tuple(sorted(float(a) for a in args))


def _check_residual(value: float, residual: float) -> None:
    if residual > _IMAG_RESIDUAL_CAP * max(1.0, abs(value)):
        raise ResidualError(
            f"imaginary residual {residual:.3e} exceeds cap for value {value:.6e}")


def _scaled_product_factors(x: np.ndarray, groups) -> tuple:
    """Common core of the a-family integrands.

    Returns (log_magnitude, unit_scale_product) of
    prod_j F_{alpha_j}(i x)^{m_j} with each factor written as
    exp(M_j) * (e^{log R_j - M_j} + i sign(x) e^{log S_j - M_j}),
    M_j the factor's log magnitude scale.  Keeps everything finite even when
    individual factors overflow double precision.
    """
    expo = np.zeros_like(x)
    mant = np.ones_like(x, dtype=complex)
    sgn = np.sign(x)
    ax = np.abs(x)
    for aj, mult in groups:
        rj = 0.5 / c_const((aj - 1.0) / 2.0)
        log_rj = math.log(rj)
        log_sj = special.log_cosh_pow_integral(aj, ax)
        mj = np.maximum(log_rj, log_sj)
        with np.errstate(invalid="ignore"):
            factor = np.exp(log_rj - mj) + 1j * sgn * np.exp(log_sj - mj)
        expo += mult * mj
        mant *= factor ** mult
    return expo, mant


def a_quantity(alpha: float, args, cfg: QuadConfig = DEFAULT_CONFIG) -> QuantityValue:
    """a(alpha; args) = int sech^alpha(x) prod_j F_{alpha_j}(i x) dx.

    Sizes 0 and 1 use the extended-range closed forms
    1/c(alpha/2 - 1) and 1/(2 c((alpha_1-1)/2) c((alpha-2)/2)); otherwise the
    line representation is integrated (requires alpha > sum(args)).
    """
    args = _as_sorted_tuple(args)
    if len(args) == 0:
        return QuantityValue(1.0 / c_const(alpha / 2.0 - 1.0), 0.0, "closed-form-d0")
    if len(args) == 1:
        val = 0.5 / (c_const((args[0] - 1.0) / 2.0) * c_const(alpha / 2.0 - 1.0))
        return QuantityValue(val, 0.0, "closed-form-d1")
    total = math.fsum(args)
    if not alpha > total:
        raise ConvergenceDomain(
            f"a-quantity needs alpha > sum(args): alpha={alpha}, sum={total}")
    groups = _group_values(args)

    def f(x):
        x = np.asarray(x, dtype=float)
        expo, mant = _scaled_product_factors(x, groups)
        return np.exp(expo - alpha * log_cosh(x)) * mant

    res = integrate_real_line(f, alpha - total, cfg)
    value, residual = res.value.real, abs(res.value.imag)
    _check_residual(value, residual)
    return QuantityValue(value, residual, "line-representation")


def a1_quantity(alpha: float, args, cfg: QuadConfig = DEFAULT_CONFIG) -> QuantityValue:
    """a_1(alpha; args) = i * int sech^{alpha+1} sinh prod_j F_{alpha_j}(ix) dx."""
    args = _as_sorted_tuple(args)
    if len(args) == 0:
        return QuantityValue(0.0, 0.0, "closed-form-d0")
    if len(args) == 1:
        # alpha * a_1(alpha; a1) = -a(alpha - a1; {}) in the extended range
        val = -a_quantity(alpha - args[0], (), cfg).value / alpha
        return QuantityValue(val, 0.0, "closed-form-d1")
    total = math.fsum(args)
    if not alpha > total:
        raise ConvergenceDomain(
            f"a1-quantity needs alpha > sum(args): alpha={alpha}, sum={total}")
    groups = _group_values(args)

    def f(x):
        x = np.asarray(x, dtype=float)
        expo, mant = _scaled_product_factors(x, groups)
        return 1j * np.tanh(x) * np.exp(expo - alpha * log_cosh(x)) * mant

    res = integrate_real_line(f, alpha - total, cfg)
    value, residual = res.value.real, abs(res.value.imag)
    _check_residual(value, residual)
    return QuantityValue(value, residual, "line-representation")


def _b_factor_groups(args: tuple) -> list:
    groups = _group_values(args)
    out = []
    for aj, mult in groups:
        rj = 0.5 / c_const((aj - 1.0) / 2.0)
        out.append((aj, mult, rj))
    return out


def b_quantity(alpha: float, args, cfg: QuadConfig = DEFAULT_CONFIG) -> QuantityValue:
    """b(alpha; args) = int_{-pi/2}^{pi/2} cos^alpha prod_j F_{alpha_j} dx.

    Sizes 0 and 1 use 1/c((alpha-1)/2) and
    1/(2 c((alpha_1-1)/2) c((alpha-1)/2)); otherwise the real-line form

        int sech^{alpha+1}(u) prod_j (R_j + T_j(u)) du,

    with T_j(u) = int_0^u cosh^{-alpha_j-1}, requires alpha > -1.
    """
    args = _as_sorted_tuple(args)
    if len(args) == 0:
        if not alpha > -1.0:
            raise DomainError(f"b-quantity requires alpha > -1, got {alpha}")
        return QuantityValue(1.0 / c_const((alpha - 1.0) / 2.0), 0.0, "closed-form-d0")
    if len(args) == 1:
        val = 0.5 / (c_const((args[0] - 1.0) / 2.0) * c_const((alpha - 1.0) / 2.0))
        return QuantityValue(val, 0.0, "closed-form-d1")
    if not alpha > -1.0:
        raise DomainError(f"b-quantity requires alpha > -1, got {alpha}")
    groups = _b_factor_groups(args)

    def f(u):
        u = np.asarray(u, dtype=float)
        out = np.exp(-(alpha + 1.0) * log_cosh(u))
        for aj, mult, rj in groups:
            out = out * (rj + special.sech_pow_primitive(aj + 1.0, u)) ** mult
        return out

    res = integrate_real_line(f, alpha + 1.0, cfg)
    value, residual = res.value.real, abs(res.value.imag)
    _check_residual(value, residual)
    return QuantityValue(value, residual, "line-representation")


def b1_quantity(alpha: float, args, cfg: QuadConfig = DEFAULT_CONFIG) -> QuantityValue:
    """b_1(alpha; args) = int_{-pi/2}^{pi/2} cos^{alpha-1} sin prod_j F_{alpha_j} dx,
    alpha > 0."""
    if not alpha > 0.0:
        raise DomainError(f"b1-quantity requires alpha > 0, got {alpha}")
    args = _as_sorted_tuple(args)
    if len(args) == 0:
        return QuantityValue(0.0, 0.0, "closed-form-d0")
    if len(args) == 1:
        # alpha * b_1(alpha; a1) = b(alpha + a1; {})
        val = b_quantity(alpha + args[0], (), cfg).value / alpha
        return QuantityValue(val, 0.0, "closed-form-d1")
    groups = _b_factor_groups(args)

    def f(u):
        u = np.asarray(u, dtype=float)
        out = np.tanh(u) * np.exp(-alpha * log_cosh(u))
        for aj, mult, rj in groups:
            out = out * (rj + special.sech_pow_primitive(aj + 1.0, u)) ** mult
        return out

    res = integrate_real_line(f, alpha, cfg)
    value, residual = res.value.real, abs(res.value.imag)
    _check_residual(value, residual)
    return QuantityValue(value, residual, "line-representation")


# ---------------------------------------------------------------------------
# Theta
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1 << 18)
def _theta_y_factor(x: float, y: tuple, cfg_key: tuple) -> float:
    """Theta(x; Y; {}) = c(x + sum Y) prod c(w-1/2) a(2x + 2 sum Y + 2; 2Y)."""
    cfg = QuadConfig(*cfg_key)
    sy = math.fsum(y)
    val = c_const(x + sy)
    for w in y:
        val *= c_const(w - 0.5)
    return val * a_quantity(2.0 * x + 2.0 * sy + 2.0,
                            tuple(2.0 * w for w in y), cfg).value


@lru_cache(maxsize=1 << 18)
def _theta_z_factor(alpha: float, z: tuple, cfg_key: tuple) -> float:
    """Theta(alpha; {}; Z) = c(alpha - 1/2) prod c(w-1/2) b(2 alpha; 2Z)."""
    cfg = QuadConfig(*cfg_key)
    val = c_const(alpha - 0.5)
    for w in z:
        val *= c_const(w - 0.5)
    return val * b_quantity(2.0 * alpha, tuple(2.0 * w for w in z), cfg).value


def _theta_raw(x: float, y: tuple, z: tuple, cfg: QuadConfig) -> float:
    """Theta without the nonnegativity check on the multisets (the d = 1
    reparameterizations push entries slightly below 0)."""
    if not x > -0.5:
        raise DomainError(f"Theta requires x > -1/2, got {x}")
    y = tuple(sorted(y))
    z = tuple(sorted(z))
    fy = _theta_y_factor(x, y, cfg.key()) if y else 1.0
    alpha = x + math.fsum(y)
    fz = _theta_z_factor(alpha, z, cfg.key()) if z else 1.0
    return fy * fz


def theta(args: ThetaArgs, cfg: QuadConfig = DEFAULT_CONFIG) -> float:
    """Theta(x; Y; Z) for x > -1/2 and multisets of nonnegative reals."""
    return _theta_raw(args.x, args.Y.elements, args.Z.elements, cfg)


def theta_factors(args: ThetaArgs, cfg: QuadConfig = DEFAULT_CONFIG) -> tuple:
    """(Theta(x;Y;{}), Theta(x+sumY;{};Z)) -- the two product factors."""
    y, z = args.Y.elements, args.Z.elements
    fy = _theta_y_factor(args.x, y, cfg.key()) if y else 1.0
    fz = _theta_z_factor(args.x + math.fsum(y), z, cfg.key()) if z else 1.0
    return fy, fz


def clear_caches() -> None:
    _theta_y_factor.cache_clear()
    _theta_z_factor.cache_clear()


# ---------------------------------------------------------------------------
# Int / Ext and A / B
# ---------------------------------------------------------------------------

def int_quantity(beta: float, betas: Sequence[float],
                 cfg: QuadConfig = DEFAULT_CONFIG) -> float:
    """Expected solid angle of a cone spanned by d beta vectors:
    Theta(beta + d/2; {beta_i + d/2}; {}).  Conventions: 1 for d = 0 and
    1/2 for d = 1."""
    d = len(betas)
    if not beta >= -1.0 or any(b < -1.0 for b in betas):
        raise DomainError("int_quantity requires all parameters >= -1")
    if d == 0:
        return 1.0
    if d == 1:
        return 0.5
    return _theta_raw(beta + d / 2.0, tuple(b + d / 2.0 for b in betas), (), cfg)


def ext_quantity(beta: float, betas: Sequence[float],
                 cfg: QuadConfig = DEFAULT_CONFIG) -> float:
    """Expected solid angle of the polar cone:
    Theta(beta + d/2; {}; {beta_i + d/2}) on the extended range
    beta, beta_i > -(d+1)/2.  Conventions: 1 for d = 0, 1/2 for d = 1."""
    d = len(betas)
    lo = -(d + 1) / 2.0
    if not beta > lo or any(not b > lo for b in betas):
        raise DomainError(f"ext_quantity requires parameters > {lo}")
    if d == 0:
        return 1.0
    if d == 1:
        return 0.5
    return _theta_raw(beta + d / 2.0, (), tuple(b + d / 2.0 for b in betas), cfg)


def ext_quantity_direct(beta: float, betas: Sequence[float],
                        cfg: QuadConfig = DEFAULT_CONFIG) -> float:
    """Cross-check path for ext_quantity: the double integral

        int_{-1}^{1} c_l (1-t^2)^l prod_j CDF_{l_j}(t) dt,

    with l = beta + (d-1)/2, l_j = beta_j + (d-1)/2 and CDF the
    one-dimensional beta distribution function."""
    d = len(betas)
    lo = -(d + 1) / 2.0
    if not beta > lo or any(not b > lo for b in betas):
        raise DomainError(f"ext_quantity requires parameters > {lo}")
    if d == 0:
        return 1.0
    lam0 = beta + (d - 1) / 2.0
    lams = [b + (d - 1) / 2.0 for b in betas]
    c0 = c_const(lam0)

    def smooth(t):
        out = np.full(np.shape(t), c0)
        for lam in lams:
            out = out * special.beta_interval_cdf(lam, t)
        return out

    res = integrate_interval(smooth, -1.0, 1.0, (lam0, lam0), cfg)
    return res.value.real


def big_A(gamma: float, gammas, cfg: QuadConfig = DEFAULT_CONFIG) -> float:
    """A(gamma; gammas) = Theta(gamma; gammas; {}) for
    gamma, gamma_i >= d/2 - 1."""
    g = _as_sorted_tuple(gammas)
    d = len(g)
    lo = d / 2.0 - 1.0
    if d and (not gamma >= lo or any(gi < lo for gi in g)):
        raise DomainError(f"A-quantity requires arguments >= {lo}")
    if d == 0:
        return 1.0
    return _theta_raw(gamma, g, (), cfg)


def big_B(gamma: float, gammas, cfg: QuadConfig = DEFAULT_CONFIG) -> float:
    """B(gamma; gammas) = Theta(gamma - sum gammas; {}; gammas) for
    gamma_i >= d/2 - 1 and gamma - sum gammas >= d/2 - 1."""
    g = _as_sorted_tuple(gammas)
    d = len(g)
    lo = d / 2.0 - 1.0
    if d and (not gamma - math.fsum(g) >= lo or any(gi < lo for gi in g)):
        raise DomainError(f"B-quantity requires gamma - sum >= {lo}")
    if d == 0:
        return 1.0
    return _theta_raw(gamma - math.fsum(g), (), g, cfg)


# ---------------------------------------------------------------------------
# Subset-sum engine
# ---------------------------------------------------------------------------

def _group_values(values: Sequence[float], tol: float = 1e-12) -> list:
    groups: list[list] = []
    for v in sorted(values):
        if groups and abs(v - groups[-1][0]) <= tol:
            groups[-1][1] += 1
        else:
            groups.append([float(v), 1])
    return [(v, m) for v, m in groups]


def theta_size_sums(x0: float, pool: Sequence[float],
                    cfg: QuadConfig = DEFAULT_CONFIG,
                    extra_y: Sequence[float] = ()) -> list:
    """s[k] = sum over subsets I of the pool with #I = k of
    Theta(x0; extra_y + {pool_i : i in I}; {pool_i : i not in I}).

    Subsets are enumerated by multiplicity vectors over groups of equal pool
    values (binomial weights), which collapses the 2^n enumeration when
    values repeat while remaining exact.
    """
    n = len(pool)
    if n > SUBSET_CAP:
        raise SubsetBlowup(f"subset sums capped at {SUBSET_CAP} indices, got {n}")
    groups = _group_values(pool)
    sums: list[list] = [[] for _ in range(n + 1)]
    ey = tuple(extra_y)
    for counts in itertools.product(*(range(m + 1) for _, m in groups)):
        k = sum(counts)
        weight = 1.0
        y: list = list(ey)
        z: list = []
        for (v, m), c in zip(groups, counts):
            weight *= math.comb(m, c)
            y.extend([v] * c)
            z.extend([v] * (m - c))
        sums[k].append(weight * _theta_raw(x0, tuple(y), tuple(z), cfg))
    return [math.fsum(vals) for vals in sums]


def theta_size_sums_naive(x0: float, pool: Sequence[float],
                          cfg: QuadConfig = DEFAULT_CONFIG) -> list:
    """Reference path: explicit enumeration over index subsets."""
    n = len(pool)
    if n > SUBSET_CAP:
        raise SubsetBlowup(f"subset sums capped at {SUBSET_CAP} indices, got {n}")
    sums: list[list] = [[] for _ in range(n + 1)]
    idx = range(n)
    for k in range(n + 1):
        for comb in itertools.combinations(idx, k):
            chosen = set(comb)
            y = tuple(pool[i] for i in comb)
            z = tuple(pool[i] for i in idx if i not in chosen)
            sums[k].append(_theta_raw(x0, y, z, cfg))
    return [math.fsum(vals) for vals in sums]


# ---------------------------------------------------------------------------
# a/b nonlinear-relation sums (test and diagnostic support)
# ---------------------------------------------------------------------------

def ab_pair_sum(lam: float, lambdas: Sequence[float], zeta: int,
                cfg: QuadConfig = DEFAULT_CONFIG) -> float:
    """sum over I of zeta^{#I} a(lam + S_I + 2; I) (lam + S_I + 1)
    b(lam + S_I; I^c), the quantity that is 2 pi * prod 1/(2 c(..)) for
    zeta = +1 and 0 (d >= 1) for zeta = -1, independently of lam > -1."""
    if zeta not in (-1, 1):
        raise DomainError("zeta must be +1 or -1")
    n = len(lambdas)
    if n > SUBSET_CAP:
        raise SubsetBlowup(f"subset sums capped at {SUBSET_CAP} indices")
    terms = []
    for k in range(n + 1):
        for comb in itertools.combinations(range(n), k):
            chosen = set(comb)
            y = tuple(lambdas[i] for i in comb)
            z = tuple(lambdas[i] for i in range(n) if i not in chosen)
            s_i = math.fsum(y)
            term = (a_quantity(lam + s_i + 2.0, y, cfg).value
                    * (lam + s_i + 1.0)
                    * b_quantity(lam + s_i, z, cfg).value)
            terms.append((zeta ** k) * term)
    return math.fsum(terms)
