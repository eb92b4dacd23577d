"""Sample-set geometry: Lagrange polynomials, poisedness estimates, and the
construction / selection of interpolation sets used by the solver.

Completion pivots on Newton fundamental polynomials taken in basis order
(constant, linear, then quadratic monomials), so every prefix of a completed
set of length ``n + 1`` is itself linearly poised.  Full quadratic sets are
then improved by greedy point replacement until the sampled Lagrange bound
drops below ``lambda_threshold``.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .errors import GeometryFailure, NonPoised, WrongCardinality
from .model_core import (
    COND_LIMIT,
    SampleSet,
    basis_matrix,
    linear_size,
    mfn_kkt_matrix,
    quadratic_size,
)

# relative slack when testing containment in a ball
_BALL_SLACK = 1e-10


class IterationOutcome(str, Enum):
    SERIOUS = "serious"
    NULL_TYPE1 = "null1"
    NULL_TYPE2 = "null2"


@dataclass(frozen=True)
class GeometryConfig:
    lambda_threshold: float = 100.0
    candidate_count: int | None = None  # default 50 n
    max_improvement_rounds: int | None = None  # default 20 q
    pivot_threshold: float = 0.1  # smallest Newton pivot accepted for a reused point

    def __post_init__(self):
        if not self.lambda_threshold > 1:
            raise ValueError("lambda_threshold must exceed 1")
        if not 0 < self.pivot_threshold <= 1:
            raise ValueError("pivot_threshold must lie in (0, 1]")

    def candidates_for(self, n):
        count = 50 * n if self.candidate_count is None else self.candidate_count
        if count < 2 * n:
            raise ValueError(f"candidate_count must be at least 2n = {2 * n}")
        return count

    def rounds_for(self, n):
        if self.max_improvement_rounds is None:
            return 20 * quadratic_size(n)
        return self.max_improvement_rounds


DEFAULT_CONFIG = GeometryConfig()


def ball_candidates(n, count, seed=0):
    """``count`` pseudo-random points, uniform in the unit ball of R^n."""
    rng = np.random.default_rng(seed)
    d = rng.standard_normal((count, n))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    return d * rng.random((count, 1)) ** (1.0 / n)


@dataclass(frozen=True, eq=False)
class LagrangeBasis:
    """Lagrange polynomials of a sample set, one column per point.

    Coefficients refer to the natural basis in the scaled coordinates
    ``(x - centre) / radius``; ``ncols`` basis functions are used.
    """

    coefficients: np.ndarray
    centre: np.ndarray
    radius: float

    @property
    def ncols(self):
        return self.coefficients.shape[0]

    def scaled_values(self, Z):
        return basis_matrix_cols(Z, self.ncols) @ self.coefficients

    def __call__(self, x):
        """Values of every polynomial at the rows of ``x`` (or a single point)."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        Z = (np.atleast_2d(x) - self.centre) / self.radius
        vals = self.scaled_values(Z)
        return vals[0] if single else vals


def basis_matrix_cols(Z, ncols):
    return _kernels.basis_matrix(np.ascontiguousarray(Z, dtype=float), ncols)


def _lagrange_coefficients(Z):
    """Lagrange coefficients for scaled points ``Z`` (row 0 at the origin)."""
    p1, n = Z.shape
    if p1 == linear_size(n) or p1 == quadratic_size(n):
        M = basis_matrix_cols(Z, p1)
        _check_cond(M)
        return np.linalg.solve(M, np.eye(p1))
    if linear_size(n) < p1 < quadratic_size(n):
        M = basis_matrix(Z, quadratic=True)
        ML, MQ = M[:, : n + 1], M[:, n + 1 :]
        F = mfn_kkt_matrix(ML, MQ)
        _check_cond(F)
        rhs = np.zeros((p1 + n + 1, p1))
        rhs[:p1] = np.eye(p1)
        sol = np.linalg.solve(F, rhs)
        return np.vstack([sol[p1:], MQ.T @ sol[:p1]])
    raise WrongCardinality(f"no polynomial space fits {p1} points in dimension {n}")


def _check_cond(A):
    with np.errstate(all="ignore"):
        cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise NonPoised(f"interpolation system has condition number {cond:.3g}")


def lagrange_basis(Y, radius=None):
    """Lagrange polynomials of ``Y``.

    Sets of ``n + 1`` points use the linear space, ``(n+1)(n+2)/2`` points the
    full quadratic space, and sizes in between the minimum-norm polynomials
    of the underdetermined quadratic space.
    """
    r = Y.radius if radius is None else float(radius)
    if r <= 0:
        raise NonPoised("sample set has zero radius")
    coef = _lagrange_coefficients(Y.scaled(r))
    return LagrangeBasis(coef, Y.centre.copy(), r)


def _linear_lambda(L):
    # |c + b.z| peaks on the unit ball at |c| + ||b||
    return float(np.max(np.abs(L[0]) + np.linalg.norm(L[1:], axis=0)))


def poisedness_constant(Y, radius, cfg=None, seed=0):
    """Sampled estimate of ``max_i max_{x in ball} |l_i(x)|`` (always >= 1).

    The ball is centred at ``Y.centre``.  Linear sets are measured exactly;
    other sizes by evaluating at ``cfg.candidate_count`` random points of the
    ball plus the set itself.
    """
    cfg = cfg or DEFAULT_CONFIG
    if radius <= 0:
        raise ValueError("radius must be positive")
    Z = Y.scaled(radius)
    L = _lagrange_coefficients(Z)
    if len(Y) == linear_size(Y.n):
        return max(1.0, _linear_lambda(L))
    pool = np.vstack([ball_candidates(Y.n, cfg.candidates_for(Y.n), seed), Z])
    return max(1.0, float(np.abs(basis_matrix_cols(pool, L.shape[0]) @ L).max()))


def _in_ball(points, centre, radius):
    d = np.linalg.norm(np.atleast_2d(points) - centre, axis=1)
    return d <= radius * (1 + _BALL_SLACK)


def _grow(centre, seeds, radius, count, cfg, seed):
    """Pivot ``count`` points out of ``seeds`` (then fresh points) around ``centre``.

    ``seeds`` excludes the centre and is ordered by preference; ties in the
    pivot are resolved in that order.  Full quadratic sets are additionally
    improved to the configured Lagrange bound.
    """
    n = centre.size
    q = quadratic_size(n)
    seeds = np.asarray(seeds, dtype=float).reshape(-1, n)
    Zs = np.vstack([np.zeros((1, n)), (seeds - centre) / radius])
    Zc = ball_candidates(n, cfg.candidates_for(n), seed)
    Z, _, status = _kernels.newton_pivot(Zs, Zc, count, cfg.pivot_threshold)
    if status != _kernels.PIVOT_OK:
        raise GeometryFailure("Newton pivoting met a vanishing pivot")
    if count == q:
        V = basis_matrix_cols(Zc, q) @ _lagrange_coefficients(Z)
        _kernels.greedy_replace(V, Z, Zc, cfg.lambda_threshold, cfg.rounds_for(n))
    return SampleSet(centre + radius * Z)


def complete_well_poised_set(seed_set, centre, radius, cfg=None, seed=0):
    """Extend ``seed_set`` to a well-poised set of ``(n+1)(n+2)/2`` points.

    ``seed_set`` may be ``None`` or contain only the centre.  As many seed
    points as the geometry allows are kept; the result lies in the ball of
    the given radius, starts with ``centre`` and has a sampled Lagrange bound
    at most ``cfg.lambda_threshold`` on the candidate pool drawn from
    ``seed``.
    """
    cfg = cfg or DEFAULT_CONFIG
    centre = np.asarray(centre, dtype=float).ravel()
    n = centre.size
    q = quadratic_size(n)
    if radius <= 0:
        raise ValueError("radius must be positive")
    pts = np.zeros((0, n)) if seed_set is None else np.atleast_2d(np.asarray(getattr(seed_set, "points", seed_set), float))
    if pts.shape[1] != n:
        raise ValueError(f"seed points have dimension {pts.shape[1]}, centre has {n}")
    if len(pts) and not np.array_equal(pts[0], centre):
        raise ValueError("the first seed point must be the centre")
    if not np.all(_in_ball(pts, centre, radius)):
        raise ValueError("seed points must lie in the sampling ball")

    if len(pts) == q and _quadratic_ok(pts, radius, cfg, seed):
        return seed_set if isinstance(seed_set, SampleSet) else SampleSet(pts)

    Y = _grow(centre, pts[1:], radius, q, cfg, seed)
    lam = poisedness_constant(Y, radius, cfg, seed)
    if lam > cfg.lambda_threshold * (1 + 1e-8):
        raise GeometryFailure(f"Lagrange bound {lam:.3g} above threshold {cfg.lambda_threshold:g}")
    return Y


def _quadratic_ok(pts, radius, cfg, seed):
    try:
        Y = SampleSet(pts)
        return poisedness_constant(Y, radius, cfg, seed) <= cfg.lambda_threshold
    except (NonPoised, ValueError):
        return False


def passes_safety_check(Y, radius=None, cfg=None, seed=0):
    """Poisedness test applied to every set handed to the solver.

    Full quadratic sets must meet the Lagrange bound in the quadratic space;
    smaller sets must have a linearly well-poised ``n + 1`` prefix, and sets
    strictly between the two sizes a well-conditioned minimum Frobenius norm
    system.
    """
    cfg = cfg or DEFAULT_CONFIG
    r = Y.radius if radius is None else radius
    n = Y.n
    try:
        if len(Y) == quadratic_size(n):
            return poisedness_constant(Y, r, cfg, seed) <= cfg.lambda_threshold
        if len(Y) < linear_size(n):
            return False
        prefix = SampleSet(Y.points[: n + 1])
        if poisedness_constant(prefix, r) > cfg.lambda_threshold:
            return False
        if len(Y) > linear_size(n):
            _lagrange_coefficients(Y.scaled(r))
        return True
    except NonPoised:
        return False


def _finish(Y, count, radius, cfg, seed):
    """Safety-check ``Y``; on failure rebuild from the centre alone."""
    if passes_safety_check(Y, radius, cfg, seed):
        return Y
    fresh = _grow(Y.centre, np.zeros((0, Y.n)), radius, count, cfg, seed + 1)
    if passes_safety_check(fresh, radius, cfg, seed + 1):
        return fresh
    raise GeometryFailure("could not produce a well-poised sample set")


def select_subset(full, count, cfg=None, seed=0, radius=None):
    """First ``count`` points of ``full``, regenerated if they fail the safety check."""
    cfg = cfg or DEFAULT_CONFIG
    n = full.n
    if not linear_size(n) <= count <= len(full):
        raise WrongCardinality(f"cannot select {count} of {len(full)} points in dimension {n}")
    r = full.radius if radius is None else radius
    Y = full if count == len(full) else SampleSet(full.points[:count])
    if passes_safety_check(Y, r, cfg, seed):
        return Y
    fresh = complete_well_poised_set(None, full.centre, r, cfg, seed + 1)
    Y = SampleSet(fresh.points[:count])
    if passes_safety_check(Y, r, cfg, seed + 1):
        return Y
    raise GeometryFailure("regenerated sample set failed the safety check")


def cached_points_near(history, x, radius, exclude=()):
    """Rows of ``history`` within ``radius`` of ``x``, most recent first.

    ``history`` is in evaluation order; ``x`` itself and rows of ``exclude``
    are dropped.
    """
    if history is None:
        return np.zeros((0, x.size))
    H = np.asarray(history, dtype=float).reshape(-1, x.size)[::-1]
    keep = _in_ball(H, x, radius) & np.any(H != x, axis=1)
    for e in np.atleast_2d(np.asarray(exclude, dtype=float)).reshape(-1, x.size):
        keep &= np.any(H != e, axis=1)
    H = H[keep]
    # drop repeated coordinates, keeping the most recent
    _, first = np.unique(H, axis=0, return_index=True)
    return H[np.sort(first)]


def next_sample_set(outcome, Yk, x_next, delta, gamma, target_size, history=None, cfg=None, seed=0, serious_factor=1.0):
    """Interpolation set for the next iteration after a step-4 ``outcome``.

    serious  -- centre ``x_next``, cached points within ``serious_factor * delta``
    null 1   -- keep the centre and radius; take ``target_size`` points of
                ``Yk`` when it is large enough, otherwise grow ``Yk``
    null 2   -- centre ``x_next``, cached points within ``gamma * delta``

    Only the first ``target_size`` points of the completed set are ever
    formed: pivoting is sequential, so they coincide with the prefix of the
    full completion.
    """
    cfg = cfg or DEFAULT_CONFIG
    outcome = IterationOutcome(outcome)
    x_next = np.asarray(x_next, dtype=float).ravel()
    n = x_next.size
    if not linear_size(n) <= target_size <= quadratic_size(n):
        raise WrongCardinality(f"target size {target_size} outside [{linear_size(n)}, {quadratic_size(n)}]")
    if not np.all(np.isfinite(x_next)):
        raise ValueError("x_next must be finite")

    if outcome is IterationOutcome.NULL_TYPE1:
        radius = delta
        if len(Yk) >= target_size:
            return select_subset(Yk, target_size, cfg, seed, radius=radius)
        centre = Yk.centre
        near = cached_points_near(history, centre, radius, exclude=Yk.points)
        seeds = np.vstack([Yk.points[1:], near])
    else:
        radius = serious_factor * delta if outcome is IterationOutcome.SERIOUS else gamma * delta
        centre = x_next
        seeds = cached_points_near(history, centre, radius)
    Y = _grow(centre, seeds, radius, target_size, cfg, seed)
    return _finish(Y, target_size, radius, cfg, seed)


def initial_sample_set(x0, delta0, target_size, history=None, cfg=None, seed=0):
    """Well-poised starting set around ``x0``."""
    cfg = cfg or DEFAULT_CONFIG
    x0 = np.asarray(x0, dtype=float).ravel()
    seeds = cached_points_near(history, x0, delta0)
    Y = _grow(x0, seeds, delta0, target_size, cfg, seed)
    return _finish(Y, target_size, delta0, cfg, seed)
