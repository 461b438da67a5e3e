"""Closed-form expectations for beta cones.

A beta cone in R^d is the positive hull of Z_1 - Z, ..., Z_n - Z where the
apex point Z has beta parameter ``apex_beta`` and the Z_i have parameters
``point_betas``.  All expectations reduce to subset sums of Theta evaluated
at gamma = beta + d/2 arguments.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from fractions import Fraction
from typing import Sequence

from .errors import DomainError, SubsetBlowup
from .quadrature import DEFAULT_CONFIG, QuadConfig
from .quantities import SUBSET_CAP, _group_values, _theta_raw, theta_size_sums

FACE_ANGLE_KINDS = ("face_angle", "internal_on_face_event",
                    "external_on_face_event", "normal_angle",
                    "upsilon_of_tangent")


@dataclasses.dataclass(frozen=True)
class ConeSpec:
    """Model parameters of a beta cone."""

    d: int
    apex_beta: float
    point_betas: tuple

    def __init__(self, d: int, apex_beta: float, point_betas: Sequence[float]):
        object.__setattr__(self, "d", int(d))
        object.__setattr__(self, "apex_beta", float(apex_beta))
        object.__setattr__(self, "point_betas",
                           tuple(float(b) for b in point_betas))
        self._validate()

    def _validate(self) -> None:
        if self.d < 1:
            raise DomainError(f"cone dimension must be >= 1, got {self.d}")
        if len(self.point_betas) < 1:
            raise DomainError("a beta cone needs at least one point")
        betas = (self.apex_beta,) + self.point_betas
        if any(b < -1.0 for b in betas):
            raise DomainError("beta parameters must be >= -1")
        if self.d == 1 and any(b == -1.0 for b in betas):
            raise DomainError("d = 1 excludes beta = -1 (degenerate)")

    @property
    def n(self) -> int:
        return len(self.point_betas)

    @property
    def gamma(self) -> float:
        return self.apex_beta + self.d / 2.0

    @property
    def gammas(self) -> tuple:
        return tuple(b + self.d / 2.0 for b in self.point_betas)


def _size_sums(spec: ConeSpec, cfg: QuadConfig) -> list:
    return theta_size_sums(spec.gamma, spec.gammas, cfg)


def prob_full_space(spec: ConeSpec, cfg: QuadConfig = DEFAULT_CONFIG) -> float:
    """P[the cone is all of R^d]: 0 for n < d, else twice the Theta sum over
    subsets of size d+1, d+3, ..."""
    if spec.n < spec.d:
        return 0.0
    s = _size_sums(spec, cfg)
    return 2.0 * math.fsum(s[k] for k in range(spec.d + 1, spec.n + 1, 2))


def prob_proper(spec: ConeSpec, cfg: QuadConfig = DEFAULT_CONFIG) -> float:
    """P[the cone is a proper subset of R^d]."""
    if spec.n < spec.d:
        return 1.0
    s = _size_sums(spec, cfg)
    return 2.0 * math.fsum(s[k] for k in range(spec.d - 1, -1, -2))


def expected_upsilon(spec: ConeSpec, k: int,
                     cfg: QuadConfig = DEFAULT_CONFIG) -> float:
    """Expected k-th conic intrinsic volume, 0 <= k <= min(n, d)."""
    top = min(spec.n, spec.d)
    if not 0 <= k <= top:
        raise IndexError(f"k must lie in [0, {top}], got {k}")
    s = _size_sums(spec, cfg)
    if k < top:
        return s[k]
    if spec.n < spec.d:
        return s[spec.n]
    return math.fsum(s[j] for j in range(spec.d, spec.n + 1))


def expected_solid_angle(spec: ConeSpec,
                         cfg: QuadConfig = DEFAULT_CONFIG) -> float:
    """E[solid angle] = E[upsilon_{min(n,d)}]."""
    return expected_upsilon(spec, min(spec.n, spec.d), cfg)


def expected_solid_angle_on_proper(spec: ConeSpec,
                                   cfg: QuadConfig = DEFAULT_CONFIG) -> float:
    """E[solid angle restricted to the event {cone != R^d}]: the alternating
    Theta sum over subset sizes <= d-1."""
    if spec.n < spec.d:
        return expected_solid_angle(spec, cfg)
    s = _size_sums(spec, cfg)
    return math.fsum((-1.0) ** (spec.d - 1 - j) * s[j] for j in range(spec.d))


def _check_K(spec: ConeSpec, K: Sequence[int]) -> tuple:
    K = tuple(sorted(int(i) for i in K))
    if len(set(K)) != len(K):
        raise IndexError(f"duplicate indices in K: {K}")
    if K and (K[0] < 0 or K[-1] >= spec.n):
        raise IndexError(f"K indices out of range: {K}")
    return K


def _face_split(spec: ConeSpec, K: tuple) -> tuple:
    """(x0, pool) for Theta sums at the face spanned by K."""
    gammas = spec.gammas
    x0 = spec.gamma + math.fsum(gammas[i] for i in K)
    pool = tuple(gammas[i] for i in range(spec.n) if i not in set(K))
    return x0, pool


def face_probability_cone(spec: ConeSpec, K: Sequence[int],
                          cfg: QuadConfig = DEFAULT_CONFIG) -> float:
    """P[pos(Z_i - Z : i in K) is a face of the cone], #K <= min(n,d)-1."""
    K = _check_K(spec, K)
    k = len(K)
    if k > min(spec.n, spec.d) - 1:
        raise IndexError(f"#K must be <= min(n,d)-1 = {min(spec.n, spec.d)-1}")
    x0, pool = _face_split(spec, K)
    s = theta_size_sums(x0, pool, cfg)
    return 2.0 * math.fsum(s[j] for j in range(spec.d - k - 1, -1, -2))


def face_improbability_cone(spec: ConeSpec, K: Sequence[int],
                            cfg: QuadConfig = DEFAULT_CONFIG) -> float:
    """Complementary subset sum: P[K does not span a face]."""
    K = _check_K(spec, K)
    k = len(K)
    x0, pool = _face_split(spec, K)
    s = theta_size_sums(x0, pool, cfg)
    return 2.0 * math.fsum(s[j] for j in range(spec.d - k + 1, len(pool) + 1, 2))


def expected_fk_cone(spec: ConeSpec, k: int,
                     cfg: QuadConfig = DEFAULT_CONFIG) -> float:
    """Expected number of k-dimensional faces, 0 <= k <= d-1.

    The outer sum over index sets K of size k is collapsed over groups of
    equal point parameters with multinomial weights.
    """
    if not 0 <= k <= spec.d - 1:
        raise IndexError(f"k must lie in [0, {spec.d - 1}], got {k}")
    if spec.n > SUBSET_CAP:
        raise SubsetBlowup(f"n capped at {SUBSET_CAP} for subset sums")
    gammas = spec.gammas
    groups = _group_values(gammas)
    total = []
    for counts in itertools.product(*(range(min(m, k) + 1) for _, m in groups)):
        if sum(counts) != k:
            continue
        weight = 1.0
        sum_k = 0.0
        pool: list = []
        for (v, m), c in zip(groups, counts):
            weight *= math.comb(m, c)
            sum_k += v * c
            pool.extend([v] * (m - c))
        s = theta_size_sums(spec.gamma + sum_k, pool, cfg)
        inner = math.fsum(s[j] for j in range(spec.d - k - 1, -1, -2))
        total.append(weight * inner)
    return 2.0 * math.fsum(total)


def expected_face_angles_cone(spec: ConeSpec, K: Sequence[int], which: str,
                              ell: int | None = None,
                              cfg: QuadConfig = DEFAULT_CONFIG) -> float:
    """Expected angles attached to the possible face spanned by K.

    ``which`` selects among:
      * ``face_angle``: E[angle of the face itself],
      * ``internal_on_face_event``: E[angle of the tangent cone at the face,
        restricted to the event that K spans a face] (needs n > d),
      * ``external_on_face_event``: E[angle of the normal cone on that event],
      * ``normal_angle``: E[angle of the normal cone] (counting 1 when K
        fails to span a face),
      * ``upsilon_of_tangent``: E[upsilon_ell of the tangent cone], with
        ``ell`` in {#K, ..., min(n,d)-1}.
    """
    if which not in FACE_ANGLE_KINDS:
        raise DomainError(f"unknown angle kind {which!r}")
    K = _check_K(spec, K)
    k = len(K)
    if k > min(spec.n, spec.d) - 1:
        raise IndexError(f"#K must be <= min(n,d)-1 = {min(spec.n, spec.d)-1}")
    gammas = spec.gammas
    x0, pool = _face_split(spec, K)

    if which == "face_angle":
        if k == 0:
            return 1.0
        return _theta_raw(spec.gamma, tuple(gammas[i] for i in K), (), cfg)

    if which == "upsilon_of_tangent":
        if ell is None or not k <= ell <= min(spec.n, spec.d) - 1:
            raise IndexError("ell must lie in [#K, min(n,d)-1]")
        s = theta_size_sums(x0, pool, cfg)
        return s[ell - k]

    if which == "internal_on_face_event":
        if spec.n <= spec.d:
            raise DomainError("internal_on_face_event requires n > d")
        s = theta_size_sums(x0, pool, cfg)
        return math.fsum((-1.0) ** (spec.d - k - 1 - j) * s[j]
                         for j in range(spec.d - k))

    ext = _theta_raw(x0, (), pool, cfg)
    if which == "external_on_face_event":
        return ext
    # normal_angle
    return ext + face_improbability_cone(spec, K, cfg)


def wendel_reference(n: int, d: int, quantity: str,
                     k: int | None = None) -> Fraction:
    """Exact rational reference values for the beta -> infinity limit cone
    spanned by n uniform sphere directions in R^d.

    quantity in {'prob_proper', 'prob_full', 'upsilon', 'fk', 'upsilon_d',
    'upsilon_d_on_proper'}; 'upsilon' and 'fk' take the index k.
    """
    if d < 1 or n < 1:
        raise IndexError("need n >= 1, d >= 1")
    if quantity in ("prob_proper", "prob_full"):
        if n < d:
            proper = Fraction(1)
        else:
            proper = Fraction(sum(math.comb(n - 1, l) for l in range(d)),
                              2 ** (n - 1))
        return proper if quantity == "prob_proper" else 1 - proper
    if quantity == "upsilon":
        top = min(n, d)
        if k is None or not 0 <= k <= top:
            raise IndexError(f"upsilon index must lie in [0, {top}]")
        if n <= d or k < d:
            return Fraction(math.comb(n, k), 2 ** n)
        return Fraction(sum(math.comb(n, l) for l in range(d, n + 1)), 2 ** n)
    if quantity == "upsilon_d":
        if n < d:
            raise IndexError("upsilon_d needs n >= d")
        return Fraction(sum(math.comb(n, l) for l in range(d, n + 1)), 2 ** n)
    if quantity == "upsilon_d_on_proper":
        if n < d:
            raise IndexError("needs n >= d")
        return Fraction(math.comb(n - 1, d - 1), 2 ** n)
    if quantity == "fk":
        if k is None or not 0 <= k < d <= n:
            raise IndexError("fk needs 0 <= k < d <= n")
        return Fraction(math.comb(n, k)
                        * sum(math.comb(n - k - 1, l) for l in range(d - k)),
                        2 ** (n - k - 1))
    raise IndexError(f"unknown wendel quantity {quantity!r}")
