"""Simulation oracle: sample beta points and estimate every expectation the
formula layers produce, using absorption predicates instead of hull
construction wherever dimension allows.

Geometric predicates:

* ``cone_is_full_space`` -- LP feasibility (dense simplex with Bland's rule):
  the positive hull of the given vectors is all of R^d iff no closed
  half-space contains them, i.e. iff the maximal margin m with
  <u, v_i> <= -m |v_i|, |u|_inf <= 1, is zero.
* ``is_face`` -- project the non-K points onto the orthogonal complement of
  the K-span and test that the resulting cone is not the whole complement.
* conic intrinsic volumes -- metric projection of a standard Gaussian onto
  the cone by nonnegative least squares; the face whose relative interior
  receives the projection has dimension equal to the active support size.

Replications are partitioned into independent streams; identical
``RngSpec`` values reproduce identical sample paths.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .cones import ConeSpec
from .errors import DegenerateInput, DomainError
from .polytopes import PolySpec
from .special import beta_interval_cdf, kappa

_LP_TOL = 1e-9
_JITTER = 1e-12


@dataclasses.dataclass(frozen=True)
class RngSpec:
    """Seed plus worker-stream index; (seed, stream) fixes the sample path."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed,
                                    spawn_key=(self.stream,))
        return np.random.Generator(np.random.PCG64(ss))


@dataclasses.dataclass(frozen=True)
class Estimate:
    mean: float
    std_error: float
    samples: int
    seed: RngSpec


def _estimate_from_sums(total: float, total_sq: float, n: int,
                        seed: RngSpec) -> Estimate:
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0)
    return Estimate(mean, math.sqrt(var / n), n, seed)


def sample_beta_point(d: int, beta: float, rng: np.random.Generator,
                      size: int | None = None) -> np.ndarray:
    """Sample from the density proportional to (1-|x|^2)^beta on the unit
    ball of R^d (uniform on the sphere for beta = -1): X = r U with U uniform
    on the sphere and r^2 ~ Beta(d/2, beta+1)."""
    if beta < -1.0:
        raise DomainError(f"beta must be >= -1, got {beta}")
    n = 1 if size is None else size
    u = rng.standard_normal((n, d))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    if beta == -1.0:
        r = np.ones(n)
    else:
        r = np.sqrt(rng.beta(d / 2.0, beta + 1.0, n))
    x = u * r[:, None]
    return x[0] if size is None else x


def _simplex_max(A: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    """max c.z s.t. A z <= b, z >= 0, b >= 0, by the dense primal simplex
    method with Bland's anti-cycling rule.  Instances here are tiny."""
    m, n = A.shape
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -c
    basis = list(range(n, n + m))
    for _ in range(10000):
        red = T[m, :n + m]
        enter = -1
        for j in range(n + m):  # Bland: smallest eligible index
            if red[j] < -_LP_TOL:
                enter = j
                break
        if enter < 0:
            return T[m, -1]
        col = T[:m, enter]
        rows = np.where(col > _LP_TOL)[0]
        if rows.size == 0:
            return math.inf  # unbounded (cannot happen for our instances)
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        cand = rows[ratios <= best + _LP_TOL]
        leave = cand[np.argmin([basis[r] for r in cand])]
        piv = T[leave, enter]
        T[leave, :] /= piv
        other = [i for i in range(m + 1) if i != leave]
        T[other, :] -= np.outer(T[other, enter], T[leave, :])
        basis[leave] = enter
    raise DegenerateInput("simplex method failed to terminate")


def _max_margin(vectors: np.ndarray) -> float:
    """Optimal margin of the separating-halfspace program for the vectors."""
    v = np.asarray(vectors, dtype=float)
    n, d = v.shape
    norms = np.linalg.norm(v, axis=1)
    if np.any(norms < 1e-13):
        raise DegenerateInput("zero vector among cone generators")
    # variables (a, b, m) >= 0 with u = a - b; rows: V(a-b) + m|v_i| <= 0,
    # a_j <= 1, b_j <= 1
    A = np.zeros((n + 2 * d, 2 * d + 1))
    A[:n, :d] = v
    A[:n, d:2 * d] = -v
    A[:n, 2 * d] = norms
    A[n:n + d, :d] = np.eye(d)
    A[n + d:, d:2 * d] = np.eye(d)
    b = np.concatenate([np.zeros(n), np.ones(2 * d)])
    c = np.zeros(2 * d + 1)
    c[2 * d] = 1.0
    return _simplex_max(A, b, c)


def cone_is_full_space(vectors: np.ndarray, tol: float = _LP_TOL) -> bool:
    """True iff the positive hull of the vectors is the whole space."""
    try:
        return _max_margin(vectors) <= tol
    except DegenerateInput:
        raise
    except Exception:
        rng = np.random.default_rng(0)
        jittered = np.asarray(vectors, float) + _JITTER * rng.standard_normal(
            np.shape(vectors))
        return _max_margin(jittered) <= tol


def _complement_basis(span: np.ndarray, d: int) -> np.ndarray:
    """Orthonormal basis (columns) of the orthogonal complement of the row
    space of ``span`` in R^d; raises on rank deficiency."""
    if span.size == 0:
        return np.eye(d)
    u, s, vt = np.linalg.svd(span, full_matrices=True)
    rank = int(np.sum(s > 1e-9 * max(1.0, s[0] if s.size else 1.0)))
    if rank < min(span.shape):
        raise DegenerateInput("K-span is rank deficient")
    return vt[rank:].T


def is_face(points: np.ndarray, K: Sequence[int], mode: str = "polytope",
            tol: float = _LP_TOL) -> bool:
    """Whether the K-indexed points/vectors span a face.

    polytope mode: conv(x_i : i in K) is a face of conv(all) iff the
    projections of the other points onto the orthogonal complement of
    aff(x_i : i in K), recentered at the common projection of the K points,
    do not positively span that complement.  cone mode: the same with linear
    spans and no recentering.
    """
    pts = np.asarray(points, dtype=float)
    n, d = pts.shape
    K = sorted(int(i) for i in K)
    rest = [i for i in range(n) if i not in set(K)]
    if mode == "polytope":
        if not K:
            raise DomainError("polytope faces need a nonempty index set")
        base = pts[K[0]]
        span = pts[K[1:]] - base if len(K) > 1 else np.empty((0, d))
        B = _complement_basis(span, d)
        vecs = (pts[rest] - base) @ B
    elif mode == "cone":
        span = pts[K] if K else np.empty((0, d))
        B = _complement_basis(span, d)
        vecs = pts[rest] @ B
    else:
        raise DomainError(f"unknown mode {mode!r}")
    if vecs.shape[1] == 0:
        return False
    if not rest:
        return True
    return not cone_is_full_space(vecs, tol)


def _cone_basis(vectors: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the linear span of the generators."""
    u, s, vt = np.linalg.svd(vectors, full_matrices=False)
    rank = int(np.sum(s > 1e-9 * s[0]))
    return vt[:rank].T


def nnls_small(A: np.ndarray, b: np.ndarray, tol: float = 1e-11) -> tuple:
    """Lawson-Hanson nonnegative least squares for tiny dense systems.

    Returns (x, residual_norm) with the residual recomputed explicitly.
    Written out here because the instances are a few columns wide and the
    active support of the solution must be trustworthy (it encodes the face
    dimension of the metric projection).
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    scale = max(1.0, float(np.linalg.norm(b)))
    x = np.zeros(n)
    passive = np.zeros(n, dtype=bool)
    w = A.T @ b
    for _ in range(8 * n + 32):
        if passive.all() or np.max(w[~passive], initial=-math.inf) <= tol * scale:
            break
        free = np.where(~passive)[0]
        passive[free[np.argmax(w[free])]] = True
        for _ in range(8 * n + 32):
            idx = np.where(passive)[0]
            z = np.zeros(n)
            z[idx], *_ = np.linalg.lstsq(A[:, idx], b, rcond=None)
            if np.all(z[idx] > tol):
                x = z
                break
            neg = idx[z[idx] <= tol]
            ratios = x[neg] / (x[neg] - z[neg])
            alpha = float(np.min(ratios))
            x = x + alpha * (z - x)
            passive[idx[x[idx] <= tol]] = False
            x[~passive] = 0.0
        w = A.T @ (b - A @ x)
    return x, float(np.linalg.norm(A @ x - b))


def cone_membership(vectors: np.ndarray, target: np.ndarray,
                    tol: float = 1e-9) -> bool:
    """Whether target is a nonnegative combination of the generators
    (nonnegative least squares residual test)."""
    _, res = nnls_small(np.asarray(vectors, float).T,
                        np.asarray(target, float))
    return res <= tol * max(1.0, float(np.linalg.norm(target)))


def projection_face_dim(vectors: np.ndarray, g: np.ndarray,
                        tol: float = 1e-9) -> int:
    """Dimension of the face whose relative interior contains the metric
    projection of g onto the cone, from the active NNLS support."""
    v = np.asarray(vectors, float)
    sol, _ = nnls_small(v.T, np.asarray(g, float))
    support = int(np.sum(sol > tol))
    return min(support, v.shape[1])


def estimate_solid_angle(vectors: np.ndarray, rng_spec: RngSpec,
                         samples: int) -> Estimate:
    """Fraction of uniform directions (in the linear span of the cone) that
    lie inside the cone."""
    v = np.asarray(vectors, dtype=float)
    if np.any(np.linalg.norm(v, axis=1) < 1e-13):
        raise DegenerateInput("zero generator")
    B = _cone_basis(v)
    vv = v @ B
    rng = rng_spec.generator()
    hits = 0
    for _ in range(samples):
        u = rng.standard_normal(vv.shape[1])
        u /= np.linalg.norm(u)
        hits += cone_membership(vv, u)
    p = hits / samples
    return Estimate(p, math.sqrt(p * (1.0 - p) / samples), samples, rng_spec)


# ---------------------------------------------------------------------------
# batched estimators
# ---------------------------------------------------------------------------

def _split_streams(samples: int, seed: RngSpec, jobs: int) -> list:
    jobs = max(1, int(jobs))
    base, extra = divmod(samples, jobs)
    out = []
    for j in range(jobs):
        n_j = base + (1 if j < extra else 0)
        if n_j:
            out.append((RngSpec(seed.seed, seed.stream + j), n_j))
    return out


def _hull(pts: np.ndarray) -> ConvexHull:
    try:
        return ConvexHull(pts)
    except QhullError:
        return ConvexHull(pts + _JITTER * np.random.default_rng(0)
                          .standard_normal(pts.shape))


def _hull_edges(hull: ConvexHull) -> set:
    edges = set()
    for simplex in hull.simplices:
        m = len(simplex)
        for i in range(m):
            for j in range(i + 1, m):
                a, b = simplex[i], simplex[j]
                edges.add((a, b) if a < b else (b, a))
    return edges


def _hull_counts(hull: ConvexHull, d: int) -> tuple:
    nv = len(hull.vertices)
    if d == 2:
        return nv, nv
    return nv, len(_hull_edges(hull))


def _hull_contains(hull: ConvexHull, y: np.ndarray, tol: float = 1e-12) -> bool:
    eq = hull.equations
    return bool(np.all(eq[:, :-1] @ y + eq[:, -1] <= tol))


def _edge_length_powers(hull: ConvexHull, pts: np.ndarray, p: float) -> float:
    d = pts.shape[1]
    total = 0.0
    if d == 2:
        vs = hull.vertices
        for i in range(len(vs)):
            a, b = pts[vs[i]], pts[vs[(i + 1) % len(vs)]]
            total += float(np.linalg.norm(a - b)) ** p
        return total
    for i, j in _hull_edges(hull):
        total += float(np.linalg.norm(pts[i] - pts[j])) ** p
    return total


def _full_space_batch(vecs_all: np.ndarray) -> np.ndarray:
    """Vectorized full-space indicator for a batch of generator sets.

    d = 2 uses the angular-gap criterion; d = 3 tests whether the origin is
    interior to the hull of the normalized generators; other dimensions fall
    back to the LP predicate per replication.
    """
    n_rep, n, d = vecs_all.shape
    if n < d + 1:
        return np.zeros(n_rep, dtype=bool)
    if d == 2:
        ang = np.sort(np.arctan2(vecs_all[:, :, 1], vecs_all[:, :, 0]), axis=1)
        gaps = np.diff(np.concatenate([ang, ang[:, :1] + 2.0 * np.pi], axis=1),
                       axis=1)
        return np.max(gaps, axis=1) < np.pi
    out = np.empty(n_rep, dtype=bool)
    if d == 3:
        unit = vecs_all / np.linalg.norm(vecs_all, axis=2, keepdims=True)
        for r in range(n_rep):
            try:
                hull = ConvexHull(unit[r])
                out[r] = bool(np.all(hull.equations[:, -1] < -1e-12))
            except QhullError:
                out[r] = cone_is_full_space(vecs_all[r])
        return out
    for r in range(n_rep):
        out[r] = cone_is_full_space(vecs_all[r])
    return out


def _parse_stat(stat: str) -> tuple:
    name, _, arg = stat.partition(":")
    return name, arg


_HULL_STATS = ("f0", "f1", "sylvester", "volume", "content", "skeleton",
               "tangent_upsilon_sum")


def estimate_polytope_statistics(spec: PolySpec, rng_spec: RngSpec,
                                 samples: int,
                                 statistics: Iterable[str] = ("f0", "volume"),
                                 jobs: int = 1) -> dict:
    """Monte Carlo estimates for a beta polytope.

    Statistic names: ``f0``, ``f1`` (hull-based, d <= 3), ``volume``,
    ``content:<beta>``, ``sylvester`` (n = d+2), ``face:<i,j,...>`` (LP face
    predicate), ``V1`` (mean-width sampling), ``skeleton:<k>,<p>`` (edge
    sums, k = 1, d <= 3), ``tangent_upsilon_sum:<l>`` (vertex tangent cones).
    One convex hull is built per replication and shared by every hull-based
    statistic.
    """
    stats = list(statistics)
    parsed = [(s,) + _parse_stat(s) for s in stats]
    if any(name in _HULL_STATS for _, name, _a in parsed) and spec.d > 3:
        raise DomainError("hull-based estimators are limited to d <= 3")
    needs_hull = any(name in _HULL_STATS for _, name, _a in parsed)
    for s, name, arg in parsed:
        if name == "sylvester" and spec.n != spec.d + 2:
            raise DomainError("sylvester needs n = d+2")
        if name == "skeleton" and int(arg.split(",")[0]) != 1:
            raise DomainError("skeleton estimator supports k = 1")

    acc = {s: [0.0, 0.0] for s in stats}
    total_n = 0
    # V_1 = d kappa_d / (2 kappa_{d-1}) * mean width
    width_pref = spec.d * kappa(spec.d) / (2.0 * kappa(spec.d - 1))
    for sub_seed, n_j in _split_streams(samples, rng_spec, jobs):
        rng = sub_seed.generator()
        pts_all = np.stack([sample_beta_point(spec.d, b, rng, n_j)
                            for b in spec.point_betas], axis=1)
        extra = {}
        for s, name, arg in parsed:
            if name == "content":
                extra[s] = sample_beta_point(spec.d, float(arg), rng, n_j)
            elif name == "volume":
                extra[s] = sample_beta_point(spec.d, 0.0, rng, n_j)
            elif name == "V1":
                u = rng.standard_normal((n_j, spec.d))
                extra[s] = u / np.linalg.norm(u, axis=1, keepdims=True)
            elif name == "tangent_upsilon_sum":
                extra[s] = rng.standard_normal((n_j, spec.d))
        for r in range(n_j):
            pts = pts_all[r]
            hull = _hull(pts) if needs_hull else None
            counts = _hull_counts(hull, spec.d) if needs_hull else None
            for s, name, arg in parsed:
                if name == "f0":
                    val = float(counts[0])
                elif name == "f1":
                    val = float(counts[1])
                elif name == "sylvester":
                    val = 1.0 if counts[0] == spec.d + 1 else 0.0
                elif name in ("volume", "content"):
                    val = float(_hull_contains(hull, extra[s][r]))
                    if name == "volume":
                        val *= kappa(spec.d)
                elif name == "face":
                    K = [int(t) for t in arg.split(",") if t != ""]
                    val = float(is_face(pts, K, "polytope"))
                elif name == "V1":
                    proj = pts @ extra[s][r]
                    val = width_pref * float(proj.max() - proj.min())
                elif name == "skeleton":
                    val = _edge_length_powers(hull, pts,
                                              float(arg.split(",")[1]))
                elif name == "tangent_upsilon_sum":
                    ell = int(arg)
                    g = extra[s][r]
                    val = 0.0
                    for vi in hull.vertices:
                        gens = np.delete(pts, vi, axis=0) - pts[vi]
                        val += float(projection_face_dim(gens, g) == ell)
                else:
                    raise DomainError(f"unknown statistic {s!r}")
                acc[s][0] += val
                acc[s][1] += val * val
        total_n += n_j
    return {s: _estimate_from_sums(acc[s][0], acc[s][1], total_n, rng_spec)
            for s in stats}


def estimate_cone_statistics(spec: ConeSpec, rng_spec: RngSpec,
                             samples: int,
                             statistics: Iterable[str] = ("prob_full_space",),
                             jobs: int = 1) -> dict:
    """Monte Carlo estimates for a beta cone.

    Statistic names: ``prob_full_space``, ``prob_proper``, ``upsilon:<k>``
    (Gaussian metric projection), ``solid_angle``, ``solid_angle_on_proper``,
    ``fk:<k>`` (subset face tests, n <= 8), ``face:<i,j,...>``,
    ``face_angle:<i,j,...>`` (angle of the face spanned by K, d <= 3 via
    direction sampling), ``normal_upsilon0`` (external angle).
    """
    stats = list(statistics)
    for s in stats:
        name, arg = _parse_stat(s)
        if name == "fk" and spec.n > 8:
            raise DomainError("exhaustive face enumeration limited to n <= 8")

    parsed = [(s,) + _parse_stat(s) for s in stats]
    needs_full = any(name in ("prob_full_space", "prob_proper",
                              "solid_angle_on_proper") or
                     (name == "fk" and arg == "0")
                     for _, name, arg in parsed)
    acc = {s: [0.0, 0.0] for s in stats}
    total_n = 0
    for sub_seed, n_j in _split_streams(samples, rng_spec, jobs):
        rng = sub_seed.generator()
        apex = sample_beta_point(spec.d, spec.apex_beta, rng, n_j)
        pts = np.stack([sample_beta_point(spec.d, b, rng, n_j)
                        for b in spec.point_betas], axis=1)
        vecs_all = pts - apex[:, None, :]
        full_all = _full_space_batch(vecs_all) if needs_full else None
        extra = {}
        for s, name, _arg in parsed:
            if name in ("upsilon", "normal_upsilon0"):
                extra[s] = rng.standard_normal((n_j, spec.d))
            elif name in ("solid_angle", "solid_angle_on_proper"):
                u = rng.standard_normal((n_j, spec.d))
                extra[s] = u / np.linalg.norm(u, axis=1, keepdims=True)
        for r in range(n_j):
            vecs = vecs_all[r]
            for s, name, arg in parsed:
                if name == "prob_full_space":
                    val = float(full_all[r])
                elif name == "prob_proper":
                    val = float(not full_all[r])
                elif name == "upsilon":
                    val = float(projection_face_dim(vecs, extra[s][r])
                                == int(arg))
                elif name == "solid_angle":
                    val = float(cone_membership(vecs, extra[s][r]))
                elif name == "solid_angle_on_proper":
                    val = float((not full_all[r])
                                and cone_membership(vecs, extra[s][r]))
                elif name == "fk":
                    k = int(arg)
                    if k == 0:
                        val = float(not full_all[r])
                    else:
                        val = 0.0
                        for comb in itertools.combinations(range(spec.n), k):
                            val += float(is_face(vecs, comb, "cone"))
                elif name == "face":
                    K = [int(t) for t in arg.split(",") if t != ""]
                    val = float(is_face(vecs, K, "cone"))
                elif name == "normal_upsilon0":
                    val = float(projection_face_dim(vecs, extra[s][r]) == 0)
                else:
                    raise DomainError(f"unknown statistic {s!r}")
                acc[s][0] += val
                acc[s][1] += val * val
        total_n += n_j
    return {s: _estimate_from_sums(acc[s][0], acc[s][1], total_n, rng_spec)
            for s in stats}


def marginal_projection_cdf(d: int, beta: float):
    """CDF of <X, e> for X with d-dimensional beta parameter ``beta``: a
    one-dimensional beta distribution with parameter beta + (d-1)/2."""
    lam = beta + (d - 1) / 2.0

    def cdf(t):
        return beta_interval_cdf(lam, t)

    return cdf


def discordant(formula: float, est: Estimate, sigmas: float = 3.0,
               floor: float = 1e-6) -> bool:
    """Comparison protocol: flag iff |formula - mean| exceeds both
    ``sigmas`` standard errors and the absolute floor."""
    gap = abs(formula - est.mean)
    return gap > sigmas * est.std_error and gap > floor
