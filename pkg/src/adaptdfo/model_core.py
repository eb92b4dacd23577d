"""Polynomial interpolation models: linear, quadratic and minimum Frobenius norm.

Every system is assembled in shifted-and-scaled coordinates
``z = (y - y0) / radius`` so the sample set lies in the unit ball, and the
resulting coefficients are mapped back to the original coordinates.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .errors import DimensionMismatch, NonPoised, WrongCardinality

#: condition-number bar above which an interpolation system is rejected
COND_LIMIT = 1e8
#: relative duplicate-point tolerance
DUPLICATE_TOL = 1e-12


def linear_size(n):
    return n + 1


def quadratic_size(n):
    return (n + 1) * (n + 2) // 2


class ModelKind(str, Enum):
    LINEAR = "linear"
    QUADRATIC = "quadratic"
    MIN_FROBENIUS = "mfn"


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Ordered interpolation points; ``points[0]`` is the centre."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, copy=True)
        if pts.ndim == 1:
            pts = pts[:, None] if pts.size else pts.reshape(0, 1)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise DimensionMismatch(f"need a (p+1, n) array with p+1, n >= 1, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("sample points must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if len(pts) > 1:
            # squared distances via the Gram matrix, relative to the centre
            # to limit cancellation
            D = pts - pts[0]
            sq = np.einsum("ij,ij->i", D, D)
            d2 = sq[:, None] + sq[None, :] - 2.0 * (D @ D.T)
            d2[np.diag_indices_from(d2)] = np.inf
            tol = DUPLICATE_TOL * max(1.0, self.radius)
            slack = max((2 * tol) ** 2, 1e-12 * float(sq.max()))
            for i, j in np.argwhere(d2 <= slack):
                if i < j and np.linalg.norm(pts[i] - pts[j]) <= tol:
                    raise ValueError(f"duplicate sample points {i} and {j}")

    centre_index = 0

    @property
    def centre(self):
        return self.points[0]

    @property
    def n(self):
        return self.points.shape[1]

    @property
    def radius(self):
        if len(self.points) == 1:
            return 0.0
        return float(np.max(np.linalg.norm(self.points - self.points[0], axis=1)))

    def __len__(self):
        return len(self.points)

    def scaled(self, radius=None):
        """Points mapped to ``(y - y0) / radius`` (default: own radius)."""
        r = self.radius if radius is None else radius
        if r <= 0:
            raise NonPoised("sample set has zero radius")
        return (self.points - self.points[0]) / r


@dataclass(frozen=True, eq=False)
class QuadraticModel:
    """``q(x) = a + <g, x> + 0.5 <x, H x>``."""

    a: float
    g: np.ndarray
    H: np.ndarray

    def __post_init__(self):
        g = np.atleast_1d(np.asarray(self.g, dtype=float)).copy()
        H = np.atleast_2d(np.asarray(self.H, dtype=float))
        if H.shape != (g.size, g.size):
            raise DimensionMismatch(f"H has shape {H.shape}, expected {(g.size, g.size)}")
        H = 0.5 * (H + H.T)
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "H", H)

    @property
    def n(self):
        return self.g.size

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionMismatch(f"point has shape {x.shape}, model dimension is {self.n}")
        return x

    def __call__(self, x):
        x = self._check(x)
        return self.a + self.g @ x + 0.5 * x @ (self.H @ x)

    def gradient(self, x):
        x = self._check(x)
        return self.g + self.H @ x

    def hessian(self):
        return self.H


@dataclass(frozen=True)
class InterpolationSystem:
    """``matrix @ alpha = rhs`` in the natural basis.

    Columns ``[:basis_split]`` hold the linear part ``{1, x_1..x_n}``, the rest
    the quadratic monomials.
    """

    matrix: np.ndarray
    rhs: np.ndarray
    basis_split: int


def basis_matrix(Z, quadratic=True):
    Z = np.ascontiguousarray(Z, dtype=float)
    n = Z.shape[1]
    ncols = quadratic_size(n) if quadratic else linear_size(n)
    return _kernels.basis_matrix(Z, ncols)


def interpolation_system(Y, fvals, quadratic=True):
    """Interpolation system in unscaled coordinates, mostly for inspection."""
    fvals = _check_values(Y, fvals)
    return InterpolationSystem(basis_matrix(Y.points, quadratic), fvals, Y.n + 1)


def hessian_from_coefficients(alpha_q, n):
    """Symmetric matrix from the quadratic-part coefficients of the basis."""
    H = np.zeros((n, n))
    rows, cols = np.triu_indices(n)
    H[rows, cols] = alpha_q
    H[cols, rows] = alpha_q
    return H


def coefficients_from_hessian(H):
    rows, cols = np.triu_indices(H.shape[0])
    return H[rows, cols].copy()


def _check_values(Y, fvals):
    fvals = np.asarray(fvals, dtype=float).ravel()
    if fvals.size != len(Y):
        raise DimensionMismatch(f"{fvals.size} values for {len(Y)} points")
    return fvals


def _guard(A, what):
    with np.errstate(all="ignore"):
        cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise NonPoised(f"{what} system has condition number {cond:.3g} > {COND_LIMIT:.0e}")


def _unscale(alpha, centre, radius, n):
    """Map scaled-coordinate coefficients back to a model about the origin."""
    a_s = alpha[0]
    g_s = alpha[1 : n + 1]
    H = hessian_from_coefficients(alpha[n + 1 :], n) / radius**2 if alpha.size > n + 1 else np.zeros((n, n))
    g_c = g_s / radius
    g = g_c - H @ centre
    a = a_s - g_c @ centre + 0.5 * centre @ H @ centre
    return QuadraticModel(a, g, H)


def _scaled_system(Y, quadratic):
    radius = Y.radius
    if radius <= 0:
        raise NonPoised("sample set has zero radius")
    return basis_matrix(Y.scaled(radius), quadratic), radius


def build_linear_model(Y, fvals):
    """Affine interpolant of ``n + 1`` values; the Hessian is zero."""
    fvals = _check_values(Y, fvals)
    if len(Y) != linear_size(Y.n):
        raise WrongCardinality(f"linear interpolation needs {linear_size(Y.n)} points, got {len(Y)}")
    M, radius = _scaled_system(Y, quadratic=False)
    _guard(M, "linear")
    alpha = np.linalg.solve(M, fvals)
    return _unscale(alpha, Y.centre, radius, Y.n)


def build_quadratic_model(Y, fvals):
    """Unique quadratic interpolant of ``(n+1)(n+2)/2`` values."""
    fvals = _check_values(Y, fvals)
    q = quadratic_size(Y.n)
    if len(Y) != q:
        raise WrongCardinality(f"quadratic interpolation needs {q} points, got {len(Y)}")
    M, radius = _scaled_system(Y, quadratic=True)
    _guard(M, "quadratic")
    alpha = np.linalg.solve(M, fvals)
    return _unscale(alpha, Y.centre, radius, Y.n)


def mfn_kkt_matrix(ML, MQ):
    """``[[MQ MQ^T, ML], [ML^T, 0]]``."""
    p1, n1 = ML.shape
    F = np.zeros((p1 + n1, p1 + n1))
    F[:p1, :p1] = MQ @ MQ.T
    F[:p1, p1:] = ML
    F[p1:, :p1] = ML.T
    return F


def mfn_coefficients(M, n, fvals):
    """Minimum-norm quadratic part: returns the full coefficient vector.

    ``M`` is the full quadratic basis matrix of the (scaled) set; the KKT
    system is solved directly.
    """
    ML, MQ = M[:, : n + 1], M[:, n + 1 :]
    F = mfn_kkt_matrix(ML, MQ)
    _guard(F, "minimum Frobenius norm")
    rhs = np.concatenate([fvals, np.zeros(n + 1)])
    sol = np.linalg.solve(F, rhs)
    lam = sol[: M.shape[0]]
    return np.concatenate([sol[M.shape[0] :], MQ.T @ lam])


def build_mfn_model(Y, fvals):
    """Interpolating quadratic with the smallest quadratic-coefficient norm."""
    fvals = _check_values(Y, fvals)
    n = Y.n
    if not linear_size(n) <= len(Y) <= quadratic_size(n):
        raise WrongCardinality(
            f"minimum Frobenius norm interpolation needs {linear_size(n)}..{quadratic_size(n)} points, got {len(Y)}"
        )
    M, radius = _scaled_system(Y, quadratic=True)
    alpha = mfn_coefficients(M, n, fvals)
    return _unscale(alpha, Y.centre, radius, n)


def model_kind_for(size, n):
    if size == linear_size(n):
        return ModelKind.LINEAR
    if size == quadratic_size(n):
        return ModelKind.QUADRATIC
    if linear_size(n) < size < quadratic_size(n):
        return ModelKind.MIN_FROBENIUS
    raise WrongCardinality(f"no interpolation model uses {size} points in dimension {n}")


_BUILDERS = {
    ModelKind.LINEAR: build_linear_model,
    ModelKind.QUADRATIC: build_quadratic_model,
    ModelKind.MIN_FROBENIUS: build_mfn_model,
}


def build_model(Y, fvals, kind=None):
    """Dispatch on ``kind`` (default: chosen from the size of ``Y``)."""
    if kind is None:
        kind = model_kind_for(len(Y), Y.n)
    return _BUILDERS[ModelKind(kind)](Y, fvals)


def evaluate_model(q, x):
    return q(x)


def model_gradient(q, x):
    return q.gradient(x)


def min_eigenvalue(H):
    """Algebraically smallest eigenvalue of a symmetric matrix."""
    H = np.atleast_2d(np.asarray(H, dtype=float))
    if H.shape[0] != H.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got {H.shape}")
    return float(np.linalg.eigvalsh(0.5 * (H + H.T))[0])
