"""Deterministic quadrature kernels.

Two entry points:

* :func:`integrate_real_line` -- trapezoidal rule on a uniform grid over a
  truncated interval ``[-X, X]``, with geometric mesh refinement.  For
  integrands analytic in a strip around the real axis and exponentially
  decaying (sech powers and their relatives) the trapezoidal rule converges
  geometrically in ``1/h``, so a handful of refinements reaches double
  precision.

* :func:`integrate_interval` -- integrals over a finite interval with
  algebraic endpoint weights ``(t-lo)^p (hi-t)^q``.  The weight is owned by
  the integrator: the substitution ``t = mid + half*tanh(x)`` maps the
  problem to the real line and the weight is evaluated in log form from
  ``x``, which keeps full precision arbitrarily close to the endpoints.

Integrand callables must accept a numpy array of abscissae and return an
array of values (real or complex).
"""

from __future__ import annotations

import dataclasses
import math
from typing import Callable

import numpy as np

from .errors import DomainError, InvalidDecay, InvalidExponent, NonConvergence

_LN10 = math.log(10.0)
_LN2 = math.log(2.0)

# Tail values this far (in natural log) below the integrand's peak are
# treated as fully decayed when the truncation point is adjusted.
_TAIL_LOG_DROP = 18.0 * _LN10


@dataclasses.dataclass(frozen=True)
class QuadConfig:
    """Tolerances and limits shared by every quadrature call.

    ``truncation_margin`` is measured in decades: the truncation point X of a
    line integral satisfies ``decay_rate * X >= truncation_margin * ln 10``
    before data-driven adjustment.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_refinements: int = 18
    truncation_margin: float = 40.0

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0):
            raise DomainError("rel_tol and abs_tol must be positive")
        if self.max_refinements < 1:
            raise DomainError("max_refinements must be >= 1")
        if self.truncation_margin <= 0.0:
            raise DomainError("truncation_margin must be positive")

    def key(self) -> tuple:
        return (self.rel_tol, self.abs_tol, self.max_refinements,
                self.truncation_margin)


DEFAULT_CONFIG = QuadConfig()


@dataclasses.dataclass(frozen=True)
class QuadResult:
    value: complex
    error_estimate: float
    evaluations: int


def _tolerance(cfg: QuadConfig, value: complex) -> float:
    return max(cfg.abs_tol, cfg.rel_tol * abs(value))


def _adjust_truncation(f: Callable, x0: float, evals: list) -> float:
    """Grow/shrink the truncation point until |f| has decayed at +-X.

    The initial guess comes from the declared decay rate, which only bounds
    the far tail; integrands whose mass sits in a narrow bulk (very large
    exponents) need X grown past the bulk, while slowly decaying ones may
    allow shrinking.  Decisions are made from actual integrand samples.
    """

    def fmag(x: float) -> float:
        xs = np.array([-x, x])
        vals = np.asarray(f(xs))
        evals[0] += 2
        vals = vals[np.isfinite(vals)]
        return float(np.max(np.abs(vals))) if vals.size else 0.0

    probes = np.linspace(0.0, x0, 5)
    vals = np.abs(np.asarray(f(np.concatenate([-probes[::-1], probes]))))
    evals[0] += 10
    peak = float(np.max(vals[np.isfinite(vals)]))
    if peak == 0.0 or not math.isfinite(peak):
        return x0
    floor = peak * math.exp(-_TAIL_LOG_DROP)

    x = x0
    grow = 0
    while fmag(x) > floor and grow < 120:
        x *= 1.4
        grow += 1
    if grow == 120:
        raise NonConvergence("integrand tail does not decay; cannot truncate")
    shrink = 0
    while shrink < 400:
        cand = x / 1.4
        if cand <= x0 / 1e9 or fmag(cand) > floor:
            break
        # keep the peak visible: never shrink below the outermost probe
        # where the integrand was within the tail floor of its peak
        x = cand
        shrink += 1
    return x


def integrate_real_line(f: Callable, decay_rate: float,
                        cfg: QuadConfig = DEFAULT_CONFIG) -> QuadResult:
    """Integrate ``f`` over the whole real line.

    ``f`` must be vectorized and satisfy ``|f(x)| <= C (1+|x|^m)
    exp(-decay_rate |x|)``.  The truncation point is seeded from
    ``decay_rate`` and the configured margin, then adjusted by sampling the
    integrand so that the discarded tail is negligible for bulk-concentrated
    integrands as well.
    """
    if not (decay_rate > 0.0) or not math.isfinite(decay_rate):
        raise InvalidDecay(f"decay_rate must be positive, got {decay_rate}")

    evals = [0]
    x0 = cfg.truncation_margin * _LN10 / decay_rate
    x_trunc = _adjust_truncation(f, x0, evals)

    n0 = max(32, int(math.ceil(2.0 * x_trunc / 0.5)))
    n0 = min(n0, 1 << 17)
    h = 2.0 * x_trunc / n0

    nodes = np.linspace(-x_trunc, x_trunc, n0 + 1)
    vals = np.asarray(f(nodes), dtype=complex)
    evals[0] += nodes.size
    total = complex(np.sum(vals) - 0.5 * (vals[0] + vals[-1])) * h

    for _ in range(cfg.max_refinements):
        mids = nodes[:-1] + 0.5 * h if nodes.size < (1 << 22) else None
        if mids is None:
            break
        fm = np.asarray(f(mids), dtype=complex)
        evals[0] += mids.size
        refined = 0.5 * total + 0.5 * h * complex(np.sum(fm))
        est = abs(refined - total)
        h *= 0.5
        # rebuild the node set implicitly: only sums are needed
        nodes = np.sort(np.concatenate([nodes, mids]))
        total = refined
        if est <= _tolerance(cfg, refined):
            return QuadResult(refined, est, evals[0])
    raise NonConvergence(
        f"trapezoidal refinement did not reach tolerance after "
        f"{cfg.max_refinements} levels (last estimate {est:.3e})")


def _log1p_exp(v: np.ndarray) -> np.ndarray:
    """log(1 + exp(v)) without overflow."""
    out = np.where(v > 0.0, v, 0.0)
    return out + np.log1p(np.exp(-np.abs(v)))


def integrate_interval(f: Callable, lo: float, hi: float,
                       endpoint_exponents: tuple,
                       cfg: QuadConfig = DEFAULT_CONFIG) -> QuadResult:
    """Integrate ``f(t) * (t-lo)^p * (hi-t)^q`` over ``(lo, hi)``.

    ``(p, q) = endpoint_exponents`` with ``p, q > -1``; ``f`` is the smooth
    factor and must extend continuously to the closed interval.  The
    algebraic weight is applied internally, evaluated in log form through the
    substitution ``t = mid + half*tanh(x)``, so endpoint singularities never
    meet floating-point cancellation.
    """
    p, q = endpoint_exponents
    if p <= -1.0 or q <= -1.0:
        raise InvalidExponent(f"endpoint exponents must exceed -1, got {p}, {q}")
    if not (hi > lo):
        raise DomainError("interval must satisfy lo < hi")

    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    log_half = math.log(half)

    def g(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        t = mid + half * np.tanh(x)
        # 1 -+ tanh(x) in log form:  1 - tanh x = 2 e^{-2x} / (1 + e^{-2x})
        log_1m = _LN2 - 2.0 * x - _log1p_exp(-2.0 * x)
        log_1p = _LN2 + 2.0 * x - _log1p_exp(2.0 * x)
        log_sech2 = 2.0 * (_LN2 - np.abs(x) - _log1p_exp(-2.0 * np.abs(x)))
        logw = (p * (log_half + log_1p) + q * (log_half + log_1m)
                + log_half + log_sech2)
        return np.asarray(f(t)) * np.exp(logw)

    decay = 2.0 * (1.0 + min(p, q))
    return integrate_real_line(g, decay, cfg)
