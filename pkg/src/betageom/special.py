"""Scalar building blocks: normalizing constants, the cosine-power
primitive F and its hyperbolic counterparts.

The one-dimensional normalizing constant is

    c(beta) = Gamma(beta + 3/2) / (sqrt(pi) * Gamma(beta + 1)),

the unit-ball volume is kappa(d) = pi^{d/2} / Gamma(d/2 + 1), and

    f_real(beta, x)  = int_{-pi/2}^{x} cos^beta(y) dy,
    f_imag(beta, x)  = f_real evaluated at i*x
                     = 1/(2 c((beta-1)/2)) + i * int_0^x cosh^beta(y) dy.

Integrals of cosh powers appear inside every quantity integrand, evaluated
at thousands of quadrature nodes, and their values span hundreds of orders
of magnitude, so the growing primitive is computed in log scale
(:func:`log_cosh_pow_integral`) by a descending integration-by-parts
recurrence with a regularized-incomplete-beta base case, switching to a
boundary-layer quadrature when the exponent is extreme.  The decaying
primitive ``int_0^u cosh^{-q}`` reduces exactly to the regularized
incomplete beta function (:func:`sech_pow_primitive`).
"""

from __future__ import annotations

import dataclasses
import math
from functools import lru_cache
from typing import Iterable

import numpy as np
from scipy.special import betainc, gammaln, gammasgn, roots_legendre

from .errors import DomainError

_LN2 = math.log(2.0)
_SQRT_PI = math.sqrt(math.pi)
_GL_X, _GL_W = roots_legendre(16)

# log(cosh x) threshold below which plain double-precision quadrature of
# cosh^beta is safe (values stay under e^50).
_PLAIN_CAP = 50.0
# number of descending recurrence steps before truncation is negligible
_MAX_RECURRENCE = 70


def log_cosh(x):
    """log(cosh x), full relative precision for small and large |x|."""
    ax = np.abs(np.asarray(x, dtype=float))
    small = ax < 1.0
    safe = np.where(small, 0.0, ax)
    large_val = safe + np.log1p(np.exp(-2.0 * safe)) - _LN2
    small_val = np.log1p(2.0 * np.sinh(0.5 * np.where(small, ax, 0.0)) ** 2)
    out = np.where(small, small_val, large_val)
    return out if out.ndim else float(out)


@lru_cache(maxsize=65536)
def c_const(beta: float) -> float:
    """Gamma(beta+3/2) / (sqrt(pi) Gamma(beta+1)) via log-Gamma.

    Defined for beta > -3/2; the Gamma(beta+1) poles at nonpositive integers
    give 0 (handled by the log-Gamma formulation), and the sign of
    Gamma(beta+1) on (-3/2, -1) is carried explicitly.
    """
    beta = float(beta)
    if not beta > -1.5:
        raise DomainError(f"c_const requires beta > -3/2, got {beta}")
    sign = gammasgn(beta + 1.5) * gammasgn(beta + 1.0)
    if sign == 0.0:
        return 0.0
    return sign * math.exp(gammaln(beta + 1.5) - gammaln(beta + 1.0)) / _SQRT_PI


def kappa(d: int) -> float:
    """Volume of the d-dimensional unit ball."""
    if d < 0 or d != int(d):
        raise DomainError(f"kappa requires an integer d >= 0, got {d}")
    return math.pi ** (d / 2.0) / math.exp(gammaln(d / 2.0 + 1.0))


def beta_interval_cdf(lam: float, t):
    """CDF at t of the density proportional to (1-s^2)^lam on (-1, 1).

    Equals the regularized incomplete beta function I_{(1+t)/2}(lam+1, lam+1).
    """
    if not lam > -1.0:
        raise DomainError(f"exponent must exceed -1, got {lam}")
    t = np.clip(t, -1.0, 1.0)
    return betainc(lam + 1.0, lam + 1.0, 0.5 * (1.0 + t))


def f_real(beta: float, x) -> float:
    """int_{-pi/2}^{x} cos^beta(y) dy for beta > -1, |x| <= pi/2."""
    if not beta > -1.0:
        raise DomainError(f"f_real requires beta > -1, got {beta}")
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) > math.pi / 2 + 1e-12):
        raise DomainError("f_real requires x in [-pi/2, pi/2]")
    full = 1.0 / c_const((beta - 1.0) / 2.0)
    val = full * beta_interval_cdf((beta - 1.0) / 2.0, np.sin(xa))
    return float(val) if np.isscalar(x) else val


def sech_pow_primitive(q: float, u):
    """T(u) = int_0^u cosh^{-q}(v) dv for q > 0, odd in u.

    Reduces to the regularized incomplete beta function with parameters
    (1/2, q/2): the argument is tanh^2 u near 0 and the complement is taken
    through sech^2 u near the saturation value, so both ends keep full
    relative precision.
    """
    if not q > 0.0:
        raise DomainError(f"sech_pow_primitive requires q > 0, got {q}")
    u = np.asarray(u, dtype=float)
    au = np.abs(u)
    half_beta = math.exp(gammaln(0.5) + gammaln(0.5 * q)
                         - gammaln(0.5 * (q + 1.0))) * 0.5
    th2 = np.tanh(au) ** 2
    sh2 = (1.0 / np.cosh(au)) ** 2
    small = th2 <= 0.5
    reg = np.where(small,
                   betainc(0.5, 0.5 * q, np.where(small, th2, 0.0)),
                   1.0 - betainc(0.5 * q, 0.5, np.where(small, 1.0, sh2)))
    return half_beta * reg * np.sign(u)


def sech_pow_total(q: float) -> float:
    """int_0^inf cosh^{-q} = B(1/2, q/2) / 2."""
    if not q > 0.0:
        raise DomainError(f"sech_pow_total requires q > 0, got {q}")
    return 0.5 * math.exp(gammaln(0.5) + gammaln(0.5 * q)
                          - gammaln(0.5 * (q + 1.0)))


def _plain_cumulative(beta: float, xs: np.ndarray) -> np.ndarray:
    """log int_0^x cosh^beta for ascending xs with beta*logcosh(x) <= cap.

    Composite Gauss-Legendre between consecutive abscissae, with panels
    subdivided so the local exponential rate stays resolved.
    """
    out = np.empty(xs.size)
    bounds = np.concatenate([[0.0], xs])
    acc = 0.0
    for i in range(xs.size):
        a, b = bounds[i], bounds[i + 1]
        w = b - a
        if w <= 0.0:
            out[i] = math.log(acc) if acc > 0.0 else -math.inf
            continue
        rate = beta * math.tanh(b)
        nsub = max(1, min(4000, int(math.ceil(rate * w / 15.0)) + 1))
        edges = np.linspace(a, b, nsub + 1)
        mids = 0.5 * (edges[:-1] + edges[1:])
        halfw = 0.5 * (edges[1:] - edges[:-1])
        nodes = mids[:, None] + halfw[:, None] * _GL_X[None, :]
        vals = np.exp(beta * log_cosh(nodes))
        acc += float(np.sum(halfw[:, None] * _GL_W[None, :] * vals))
        out[i] = math.log(acc)
    return out


_BL_PANELS = [(0.0, 1.0), (1.0, 3.0), (3.0, 7.0), (7.0, 15.0), (15.0, 40.0)]
_BL_NODES = np.concatenate([0.5 * (a + b) + 0.5 * (b - a) * _GL_X
                            for a, b in _BL_PANELS])
_BL_WEIGHTS = np.concatenate([0.5 * (b - a) * _GL_W for a, b in _BL_PANELS])


def _boundary_layer(beta: float, xs: np.ndarray) -> np.ndarray:
    """log int_0^x cosh^beta when beta*logcosh(x) is large.

    Substituting u = beta*(L(x) - L(y)) concentrates the integral in a
    boundary layer of width O(1/beta) below x:

        S = e^{beta L(x)} / beta * int_0^{40} e^{-u} / tanh(y(u)) du,

    with y(u) = arccosh(exp(L(x) - u/beta)) recovered through expm1 so that
    tiny arguments keep full precision.
    """
    L = log_cosh(xs)
    delta = L[:, None] - _BL_NODES[None, :] / beta
    w = np.expm1(delta)
    y = np.log1p(w + np.sqrt(w * (2.0 + w)))
    integ = np.sum(_BL_WEIGHTS[None, :] * np.exp(-_BL_NODES)[None, :]
                   / np.tanh(y), axis=1)
    return beta * L + np.log(integ) - math.log(beta)


def _recurrence(beta: float, xs: np.ndarray) -> np.ndarray:
    """log int_0^x cosh^beta via the descending two-step recurrence

        I_b = cosh^{b-1}(x) sinh(x)/b + ((b-1)/b) I_{b-2},

    run until the exponent drops into (-2, 0], where the primitive is x
    itself or the incomplete-beta form of the decaying primitive.  Terms are
    accumulated in log scale against the leading term.
    """
    L = log_cosh(xs)
    log_sinh = np.log(np.sinh(xs))
    n_steps = int(math.ceil(beta / 2.0 - 1e-12))
    truncated = n_steps > _MAX_RECURRENCE
    if truncated:
        n_steps = _MAX_RECURRENCE

    log_rho, sign_rho = 0.0, 1.0
    term_logs, term_signs = [], []
    for j in range(n_steps):
        b = beta - 2.0 * j
        term_logs.append(log_rho + (b - 1.0) * L + log_sinh - math.log(b))
        term_signs.append(sign_rho)
        step = (b - 1.0) / b
        if step == 0.0:
            log_rho, sign_rho = -math.inf, 1.0
        else:
            log_rho += math.log(abs(step))
            sign_rho *= math.copysign(1.0, step)

    logs = np.stack(term_logs, axis=0)
    signs = np.array(term_signs)[:, None]

    if not truncated and log_rho > -math.inf:
        b_last = beta - 2.0 * n_steps  # in (-2, 0]
        if b_last > -1e-12:
            base = xs.copy()
        else:
            base = np.asarray(sech_pow_primitive(-b_last, xs))
        with np.errstate(divide="ignore"):
            base_log = np.where(base > 0.0, np.log(np.maximum(base, 1e-300)),
                                -math.inf) + log_rho
        logs = np.concatenate([logs, base_log[None, :]], axis=0)
        signs = np.concatenate([signs, np.full((1, 1), sign_rho)], axis=0)

    peak = np.max(logs, axis=0)
    acc = np.sum(signs * np.exp(logs - peak[None, :]), axis=0)
    return peak + np.log(acc)


def log_cosh_pow_integral(beta: float, x) -> np.ndarray:
    """log of S(x) = int_0^x cosh^beta(y) dy for beta >= 0, x >= 0.

    Returns -inf at x = 0.  Stable over the full parameter range used by the
    quantity integrands (beta up to ~1e7, x up to the truncation points of
    the line quadrature).
    """
    if beta < 0.0:
        raise DomainError(f"log_cosh_pow_integral requires beta >= 0, got {beta}")
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs).astype(float)
    if np.any(xs < 0.0):
        raise DomainError("log_cosh_pow_integral requires x >= 0")

    out = np.full(xs.shape, -math.inf)
    pos = xs > 0.0
    if beta == 0.0:
        with np.errstate(divide="ignore"):
            out[pos] = np.log(xs[pos])
        return out[0] if scalar else out

    L = log_cosh(xs)
    plain = pos & (beta * L <= _PLAIN_CAP)
    layer = pos & ~plain & ((xs < 1.0) | (beta > 2.0 * _MAX_RECURRENCE))
    recur = pos & ~plain & ~layer

    if np.any(plain):
        idx = np.where(plain)[0]
        order = np.argsort(xs[idx])
        vals = _plain_cumulative(beta, xs[idx][order])
        out[idx[order]] = vals
    if np.any(layer):
        out[layer] = _boundary_layer(beta, xs[layer])
    if np.any(recur):
        out[recur] = _recurrence(beta, xs[recur])
    return out[0] if scalar else out


def f_imag(beta: float, x):
    """F at a purely imaginary argument:
    1/(2 c((beta-1)/2)) + i * int_0^x cosh^beta(y) dy, for beta >= 0.

    The real part does not depend on x and the imaginary part is odd.
    """
    if beta < 0.0:
        raise DomainError(f"f_imag requires beta >= 0, got {beta}")
    xs = np.asarray(x, dtype=float)
    re = 0.5 / c_const((beta - 1.0) / 2.0)
    im = np.sign(xs) * np.exp(log_cosh_pow_integral(beta, np.abs(xs)))
    val = re + 1j * im
    return complex(val) if np.isscalar(x) else val


@dataclasses.dataclass(frozen=True)
class BetaParam:
    """A beta-distribution parameter; must be >= -1 where it denotes an
    actual distribution (derived exponents are validated per operation)."""

    value: float

    def __post_init__(self) -> None:
        if not self.value >= -1.0:
            raise DomainError(f"beta parameter must be >= -1, got {self.value}")


class GammaMultiset:
    """A finite multiset of nonnegative reals, stored sorted.

    Equality is order-insensitive; disjoint union adds multiplicities.
    Duplicate values are kept as-is (never collapsed).
    """

    __slots__ = ("elements",)

    def __init__(self, elements: Iterable[float] = ()):
        elems = tuple(sorted(float(e) for e in elements))
        if any(e < 0.0 for e in elems):
            raise DomainError(f"multiset entries must be >= 0, got {elems}")
        object.__setattr__(self, "elements", elems)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("GammaMultiset is immutable")

    def union(self, other: "GammaMultiset") -> "GammaMultiset":
        return GammaMultiset(self.elements + tuple(other))

    __or__ = union

    def total(self) -> float:
        return math.fsum(self.elements)

    def grouped(self, tol: float = 1e-12):
        """[(value, multiplicity)] with values merged at absolute tol."""
        groups: list[list] = []
        for e in self.elements:
            if groups and abs(e - groups[-1][0]) <= tol:
                groups[-1][1] += 1
            else:
                groups.append([e, 1])
        return [(v, m) for v, m in groups]

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __eq__(self, other) -> bool:
        return isinstance(other, GammaMultiset) and self.elements == other.elements

    def __hash__(self) -> int:
        return hash(self.elements)

    def __repr__(self) -> str:
        return f"GammaMultiset({list(self.elements)!r})"
