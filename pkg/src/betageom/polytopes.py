"""Closed-form expectations for beta polytopes.

A beta polytope is the convex hull of n independent points in the unit ball
of R^d, the i-th with density proportional to (1 - |x|^2)^{beta_i}.  Every
expectation reduces to subset sums of Theta at gamma_i = beta_i + d/2, via
the tangent-cone dictionary: the tangent cone at the face spanned by an
index set K is, up to a lineality factor, a beta cone in dimension d-k+1
with apex parameter sum_K gamma_i - (d-k+1)/2 and point parameters
gamma_i - (d-k+1)/2 for i outside K.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from typing import Sequence

from .cones import ConeSpec
from .errors import DomainError, ResidualError, SubsetBlowup
from .quadrature import DEFAULT_CONFIG, QuadConfig
from scipy.special import gammaln

from .quantities import SUBSET_CAP, _group_values, _theta_raw, theta_size_sums
from .special import kappa

_CROSS_CHECK_TOL = 1e-9


@dataclasses.dataclass(frozen=True)
class PolySpec:
    """Model parameters of a beta polytope."""

    d: int
    point_betas: tuple

    def __init__(self, d: int, point_betas: Sequence[float]):
        object.__setattr__(self, "d", int(d))
        object.__setattr__(self, "point_betas",
                           tuple(float(b) for b in point_betas))
        self._validate()

    def _validate(self) -> None:
        if self.d < 1:
            raise DomainError(f"dimension must be >= 1, got {self.d}")
        if len(self.point_betas) < 2:
            raise DomainError("a beta polytope needs at least two points")
        if any(b < -1.0 for b in self.point_betas):
            raise DomainError("beta parameters must be >= -1")
        if self.d == 1 and any(b == -1.0 for b in self.point_betas):
            raise DomainError("d = 1 excludes beta = -1 (degenerate)")

    @property
    def n(self) -> int:
        return len(self.point_betas)

    @property
    def gammas(self) -> tuple:
        return tuple(b + self.d / 2.0 for b in self.point_betas)


def _check_K(spec: PolySpec, K: Sequence[int], lo: int, hi: int) -> tuple:
    K = tuple(sorted(int(i) for i in K))
    if len(set(K)) != len(K):
        raise IndexError(f"duplicate indices in K: {K}")
    if K and (K[0] < 0 or K[-1] >= spec.n):
        raise IndexError(f"K indices out of range: {K}")
    if not lo <= len(K) <= hi:
        raise IndexError(f"#K must lie in [{lo}, {hi}], got {len(K)}")
    return K


def tangent_cone_dictionary(spec: PolySpec, K: Sequence[int]) -> ConeSpec:
    """The beta cone isometric (up to an R^{k-1} lineality factor) to the
    tangent cone of the polytope at the face spanned by K."""
    K = _check_K(spec, K, 1, min(spec.d, spec.n - 1))
    k = len(K)
    dim = spec.d - k + 1
    gammas = spec.gammas
    apex = math.fsum(gammas[i] for i in K) - dim / 2.0
    pts = [gammas[i] - dim / 2.0 for i in range(spec.n) if i not in set(K)]
    return ConeSpec(dim, apex, pts)


def _face_sums(spec: PolySpec, K: tuple, cfg: QuadConfig) -> list:
    gammas = spec.gammas
    x0 = math.fsum(gammas[i] for i in K)
    pool = tuple(gammas[i] for i in range(spec.n) if i not in set(K))
    return theta_size_sums(x0, pool, cfg)


def face_probability_poly(spec: PolySpec, K: Sequence[int],
                          cfg: QuadConfig = DEFAULT_CONFIG,
                          cross_check: bool = False) -> float:
    """P[conv(X_i : i in K) is a face], #K in {1, ..., min(d, n-1)}.

    Two complementary subset sums are available (winning sizes
    d-k, d-k-2, ... or losing sizes d-k+2, d-k+4, ...); the one with fewer
    terms is evaluated.  With ``cross_check`` both are computed and must sum
    to 1 within 1e-9.
    """
    K = _check_K(spec, K, 1, min(spec.d, spec.n - 1))
    k = len(K)
    m = spec.n - k
    win_sizes = list(range(spec.d - k, -1, -2))
    lose_sizes = list(range(spec.d - k + 2, m + 1, 2))
    n_win = sum(math.comb(m, j) for j in win_sizes if j <= m)
    n_lose = sum(math.comb(m, j) for j in lose_sizes)
    s = _face_sums(spec, K, cfg)
    win = 2.0 * math.fsum(s[j] for j in win_sizes if j <= m)
    lose = 2.0 * math.fsum(s[j] for j in lose_sizes)
    if cross_check and abs(win + lose - 1.0) > _CROSS_CHECK_TOL:
        raise ResidualError(
            f"face-probability sums violate complementarity: {win + lose}")
    return win if n_win <= n_lose else 1.0 - lose


def _fk_outer(spec: PolySpec, k: int, sizes_of, cfg: QuadConfig) -> float:
    """2 * sum over K of size k of the Theta sum with inner subset sizes
    given by sizes_of(pool_size); outer sum grouped over equal gammas."""
    if spec.n > SUBSET_CAP:
        raise SubsetBlowup(f"n capped at {SUBSET_CAP} for subset sums")
    gammas = spec.gammas
    groups = _group_values(gammas)
    total = []
    for counts in itertools.product(*(range(min(m, k) + 1) for _, m in groups)):
        if sum(counts) != k:
            continue
        weight = 1.0
        x0 = 0.0
        pool: list = []
        for (v, m), c in zip(groups, counts):
            weight *= math.comb(m, c)
            x0 += v * c
            pool.extend([v] * (m - c))
        s = theta_size_sums(x0, pool, cfg)
        inner = math.fsum(s[j] for j in sizes_of(len(pool)))
        total.append(weight * inner)
    return 2.0 * math.fsum(total)


def expected_fk_poly(spec: PolySpec, ell: int,
                     cfg: QuadConfig = DEFAULT_CONFIG) -> float:
    """Expected number of ell-dimensional faces,
    ell in {0, ..., min(d, n-1) - 1}; uses index sets of size k = ell + 1."""
    k = ell + 1
    if not 1 <= k <= min(spec.d, spec.n - 1):
        raise IndexError(
            f"ell must lie in [0, {min(spec.d, spec.n - 1) - 1}], got {ell}")
    return _fk_outer(spec, k,
                     lambda m: range(spec.d - k, -1, -2), cfg)


def expected_fk_poly_complement(spec: PolySpec, ell: int,
                                cfg: QuadConfig = DEFAULT_CONFIG) -> float:
    """C(n, ell+1) - E f_ell via the complementary subset sum (cross-check)."""
    k = ell + 1
    if not 1 <= k <= min(spec.d, spec.n - 1):
        raise IndexError(
            f"ell must lie in [0, {min(spec.d, spec.n - 1) - 1}], got {ell}")
    return _fk_outer(spec, k,
                     lambda m: range(spec.d - k + 2, m + 1, 2), cfg)


def expected_beta_content(spec: PolySpec, beta: float,
                          cfg: QuadConfig = DEFAULT_CONFIG) -> float:
    """Probability that one extra independent point with parameter beta falls
    inside the polytope; d >= 2, n >= d+1, beta >= -1.

    Both stated subset sums are evaluated and must agree within 1e-9.
    """
    if spec.d < 2 or spec.n < spec.d + 1:
        raise DomainError("beta content requires d >= 2 and n >= d+1")
    if beta < -1.0:
        raise DomainError("content parameter must be >= -1")
    gamma = beta + spec.d / 2.0
    s = theta_size_sums(gamma, spec.gammas, cfg)
    high = 2.0 * math.fsum(s[j] for j in range(spec.d + 1, spec.n + 1, 2))
    low = 1.0 - 2.0 * math.fsum(s[j] for j in range(spec.d - 1, -1, -2))
    if abs(high - low) > _CROSS_CHECK_TOL:
        raise ResidualError(
            f"beta-content subset sums disagree: {high} vs {low}")
    return high


def expected_volume(spec: PolySpec, cfg: QuadConfig = DEFAULT_CONFIG,
                    cross_check: bool = False) -> float:
    """E Vol = 2 kappa_d * sum over #I = d+1 of Theta(d/2; I; I^c);
    d >= 2 and n >= d+1."""
    if spec.d < 2 or spec.n < spec.d + 1:
        raise DomainError("expected volume requires d >= 2 and n >= d+1")
    s = theta_size_sums(spec.d / 2.0, spec.gammas, cfg)
    kd = kappa(spec.d)
    val = 2.0 * kd * s[spec.d + 1]
    if cross_check:
        other = kd - 2.0 * kd * math.fsum(
            s[j] for j in range(spec.d - 1, -1, -2))
        if abs(val - other) > _CROSS_CHECK_TOL * max(1.0, kd):
            raise ResidualError(
                f"volume subset sums disagree: {val} vs {other}")
    return val


def simplex_volume_moment(spec: PolySpec, p: float,
                          k: int | None = None) -> float:
    """p-th moment of the k-volume of the simplex spanned by all n = k+1
    points of the spec (n <= d+1), as a product of Gamma ratios:

        E Vol_k^p = (k!)^{-p}
            * G((k+1)p/2 + 1 + S) / G(kp/2 + 1 + S)
            * prod_i G(g_i + 1) / G(g_i + p/2 + 1)
            * prod_{i=1..k} G((d+1+p-i)/2) / G((d+1-i)/2),

    with g_i = beta_i + d/2 and S their sum.
    """
    if p < 0.0:
        raise DomainError("moment order must be >= 0")
    if spec.n > spec.d + 1:
        raise DomainError("simplex moment requires n <= d+1 points")
    if k is None:
        k = spec.n - 1
    if k != spec.n - 1:
        raise DomainError("the spec's points span a (n-1)-simplex")
    if p == 0.0:
        return 1.0
    g = spec.gammas
    s = math.fsum(g)
    args = ([(k + 1) * p / 2.0 + 1.0 + s, k * p / 2.0 + 1.0 + s]
            + [gi + 1.0 for gi in g] + [gi + p / 2.0 + 1.0 for gi in g]
            + [(spec.d + 1.0 + p - i) / 2.0 for i in range(1, k + 1)]
            + [(spec.d + 1.0 - i) / 2.0 for i in range(1, k + 1)])
    if any(a <= 0.0 for a in args):
        raise DomainError("Gamma pole in simplex moment (inadmissible spec)")
    logv = (-p * gammaln(k + 1.0)
            + gammaln((k + 1) * p / 2.0 + 1.0 + s)
            - gammaln(k * p / 2.0 + 1.0 + s)
            + math.fsum(gammaln(gi + 1.0) - gammaln(gi + p / 2.0 + 1.0)
                        for gi in g)
            + math.fsum(gammaln((spec.d + 1.0 + p - i) / 2.0)
                        - gammaln((spec.d + 1.0 - i) / 2.0)
                        for i in range(1, k + 1)))
    return math.exp(logv)


def simplex_volume_gamma(spec: PolySpec) -> float:
    """Expected volume of the full-dimensional simplex (n = d+1) as the
    classical product of Gamma ratios."""
    if spec.n != spec.d + 1:
        raise DomainError("gamma-product volume requires n = d+1")
    d = spec.d
    sb = math.fsum(spec.point_betas)
    logv = (-gammaln(d + 1.0)
            + gammaln(sb + d * (d + 1) / 2.0 + 1.0 + (d + 1) / 2.0)
            - gammaln(sb + d * (d + 1) / 2.0 + 1.0 + d / 2.0)
            + gammaln((d + 1) / 2.0) - gammaln(0.5)
            + math.fsum(gammaln(d / 2.0 + b + 1.0)
                        - gammaln(d / 2.0 + b + 1.5)
                        for b in spec.point_betas))
    return math.exp(logv)


def expected_intrinsic_volume(spec: PolySpec, k: int,
                              cfg: QuadConfig = DEFAULT_CONFIG) -> float:
    """E V_k = 2 C(d,k) kappa_d / kappa_{d-k}
    * sum over #I = k+1 of Theta(k/2; I; I^c),
    for k in {0, ..., min(d, n-1) - 1}."""
    if not 0 <= k <= min(spec.d, spec.n - 1) - 1:
        raise IndexError(
            f"k must lie in [0, {min(spec.d, spec.n - 1) - 1}], got {k}")
    s = theta_size_sums(k / 2.0, spec.gammas, cfg)
    pref = 2.0 * math.comb(spec.d, k) * kappa(spec.d) / kappa(spec.d - k)
    return pref * s[k + 1]


def sylvester_probability(spec: PolySpec,
                          cfg: QuadConfig = DEFAULT_CONFIG) -> float:
    """P[the hull of n = d+2 points is a simplex]
    = 2 sum_j Theta(gamma_j; {gamma_i : i != j}; {})."""
    if spec.n != spec.d + 2:
        raise DomainError("Sylvester probability requires n = d+2")
    if spec.d < 2:
        raise DomainError("Sylvester probability requires d >= 2")
    g = spec.gammas
    terms = [_theta_raw(g[j], tuple(g[i] for i in range(spec.n) if i != j),
                        (), cfg)
             for j in range(spec.n)]
    return 2.0 * math.fsum(terms)


def skeleton_lp_volume(spec: PolySpec, k: int, p: float,
                       cfg: QuadConfig = DEFAULT_CONFIG) -> float:
    """Expected L^p volume of the k-skeleton:
    2 * sum over #I = k+1 of E[Vol_k^p(F_I)] * Theta sum with the first
    argument shifted by k p / 2."""
    if not 0 <= k <= min(spec.d, spec.n - 1) - 1:
        raise IndexError(
            f"k must lie in [0, {min(spec.d, spec.n - 1) - 1}], got {k}")
    if p < 0.0:
        raise DomainError("moment order must be >= 0")
    if spec.n > SUBSET_CAP:
        raise SubsetBlowup(f"n capped at {SUBSET_CAP} for subset sums")
    gammas = spec.gammas
    betas = spec.point_betas
    total = []
    for comb in itertools.combinations(range(spec.n), k + 1):
        chosen = set(comb)
        if k == 0 or p == 0.0:
            moment = 1.0
        else:
            moment = simplex_volume_moment(
                _SimplexView(spec.d, tuple(betas[i] for i in comb)), p)
        x0 = k * p / 2.0 + math.fsum(gammas[i] for i in comb)
        pool = tuple(gammas[i] for i in range(spec.n) if i not in chosen)
        s = theta_size_sums(x0, pool, cfg)
        inner = math.fsum(s[j] for j in range(spec.d - k - 1, -1, -2))
        total.append(moment * inner)
    return 2.0 * math.fsum(total)


def conic_volume_sums(spec: PolySpec, k: int, ell: int,
                      cfg: QuadConfig = DEFAULT_CONFIG) -> float:
    """Expected sum over k-faces F of upsilon_ell of the tangent cone at F,
    for 0 <= k <= ell <= min(d, n-1); the top ell uses the alternating form."""
    top = min(spec.d, spec.n - 1)
    if not 0 <= k <= ell <= top:
        raise IndexError(f"need 0 <= k <= ell <= {top}")
    if k == top:
        raise IndexError("k must be < min(d, n-1)")
    if spec.n > SUBSET_CAP:
        raise SubsetBlowup(f"n capped at {SUBSET_CAP} for subset sums")
    gammas = spec.gammas
    total = []
    for comb in itertools.combinations(range(spec.n), k + 1):
        chosen = set(comb)
        x0 = math.fsum(gammas[i] for i in comb)
        pool = tuple(gammas[i] for i in range(spec.n) if i not in chosen)
        s = theta_size_sums(x0, pool, cfg)
        if ell < top:
            total.append(s[ell - k])
        else:
            total.append(math.fsum((-1.0) ** (ell - k - 1 - j) * s[j]
                                   for j in range(ell - k)))
    return math.fsum(total)


def equal_beta_angles(n: int, k: int, x: float, which: str,
                      cfg: QuadConfig = DEFAULT_CONFIG) -> float:
    """Expected internal (J) and external (I) angles of the simplex spanned
    by n points with equal parameter x >= -1 in R^{n-1}, at the face spanned
    by the first k points:

        J_{n,k}(x) = Theta(k g; {g} * (n-k); {}),
        I_{n,k}(2x + n - 1) = Theta(k g; {}; {g} * (n-k)),

    with g = x + (n-1)/2.
    """
    if not 1 <= k <= n:
        raise IndexError(f"k must lie in [1, {n}], got {k}")
    if x < -1.0:
        raise DomainError("equal beta parameter must be >= -1")
    g = x + (n - 1) / 2.0
    rest = (g,) * (n - k)
    if which == "J":
        return _theta_raw(k * g, rest, (), cfg)
    if which == "I":
        return _theta_raw(k * g, (), rest, cfg)
    raise DomainError(f"which must be 'J' or 'I', got {which!r}")


class _SimplexView:
    """Lightweight stand-in with the PolySpec attributes needed by
    simplex_volume_moment for a sub-simplex of a larger spec."""

    def __init__(self, d: int, point_betas: tuple):
        self.d = d
        self.point_betas = point_betas

    @property
    def n(self) -> int:
        return len(self.point_betas)

    @property
    def gammas(self) -> tuple:
        return tuple(b + self.d / 2.0 for b in self.point_betas)
