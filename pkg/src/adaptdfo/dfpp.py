"""Derivative-free proximal point solver with adaptive sample-set sizes."""
import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import GeometryFailure, NonPoised, SingularSystem
from .geometry import (
    DEFAULT_CONFIG,
    IterationOutcome,
    initial_sample_set,
    next_sample_set,
)
from .model_core import build_model
from .problems import CountedObjective, Problem
from .strategy import Strategy, next_size, sample_size_for

log = logging.getLogger(__name__)

__all__ = [
    "IterationOutcome",
    "RunResult",
    "SolverConfig",
    "StopReason",
    "backtracking_line_search",
    "classify_step",
    "prox_feasibility_adjust",
    "prox_trial_point",
    "solve",
]


class StopReason(str, Enum):
    GRADIENT_SUCCESS = "GradientSuccess"
    RADIUS_STOP = "RadiusStop"
    BUDGET_EXHAUSTED = "BudgetExhausted"
    GEOMETRY_FAILURE = "GeometryFailure"


@dataclass(frozen=True)
class SolverConfig:
    r0: float = 1.0
    m: float = 0.1
    gamma: float = 0.5
    rtol: float = 1e-8  # accepted for completeness; no step tests it
    dtol: float = 1e-10
    gtol_grad: float = 1e-6
    gtol_delta: float = 1e-6
    budget_factor: int = 100
    delta0: float | None = None  # default 0.1 * max(1, ||x0||_inf)
    line_search: bool = False
    serious_radius_factor: float = 1.0
    max_expansions: int = 10
    max_iterations: int | None = None  # safety net; default 10 * budget + 100

    def __post_init__(self):
        if not self.r0 > 0:
            raise ValueError("r0 must be positive")
        if not 0 < self.m < 1:
            raise ValueError("m must lie in (0, 1)")
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if not self.rtol > 0:
            raise ValueError("rtol must be positive")
        if not self.dtol >= 0:
            raise ValueError("dtol must be non-negative")
        if not (self.gtol_grad > 0 and self.gtol_delta > 0):
            raise ValueError("gradient tolerances must be positive")
        if self.budget_factor < 0:
            raise ValueError("budget_factor must be non-negative")
        if self.delta0 is not None and not self.delta0 > 0:
            raise ValueError("delta0 must be positive")
        if not 0 < self.serious_radius_factor <= 1:
            raise ValueError("serious_radius_factor must lie in (0, 1]")

    def initial_radius(self, x0):
        if self.delta0 is not None:
            return self.delta0
        return 0.1 * max(1.0, float(np.max(np.abs(x0))))


@dataclass
class RunResult:
    final_x: np.ndarray
    final_f: float
    stop_reason: StopReason
    trace: list  # (call_index, point, value) for every evaluation
    outcome_counts: Counter
    centre_values: list = field(default_factory=list)  # f(x^k) at each model build
    iterations: int = 0

    @property
    def calls(self):
        return len(self.trace)

    @property
    def best_f(self):
        return min((t[2] for t in self.trace), default=np.inf)


FEASIBILITY_REL_MARGIN = 1e-10


def prox_feasibility_adjust(r, H):
    """Raise ``r`` so that ``H + r I`` is positive definite.

    The reset is ``-lambda_min + 1``; for Hessians whose spectral radius
    exceeds 1e10 the unit margin is below eigenvalue roundoff, so it is
    scaled up to ``1e-10 * rho``.
    """
    H = np.atleast_2d(np.asarray(H, dtype=float))
    eig = np.linalg.eigvalsh(H)
    lam = float(eig[0])
    margin = max(1.0, FEASIBILITY_REL_MARGIN * float(np.max(np.abs(eig))))
    if r <= -lam or r + lam < margin - 1.0:
        return -lam + margin
    return r


def prox_trial_point(q, x, r):
    """Minimiser of ``q(y) + r/2 ||y - x||^2`` and the predicted decrease ``q(x) - q(trial)``."""
    x = np.asarray(x, dtype=float)
    A = q.H + r * np.eye(q.n)
    gx = q.gradient(x)
    try:
        c = np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        raise SingularSystem("H + r I is not positive definite") from None
    step = -np.linalg.solve(c.T, np.linalg.solve(c, gx))
    # same value as (H + r I)^{-1} (r x - g) but without the cancellation
    trial = x + step
    delta = -(gx @ step + 0.5 * step @ (q.H @ step))
    return trial, float(delta)


def classify_step(f_trial, f_x, m, delta_pred, trial, x, radius):
    if f_trial <= f_x - m * delta_pred:
        return IterationOutcome.SERIOUS
    if np.linalg.norm(np.asarray(trial) - np.asarray(x)) > radius:
        return IterationOutcome.NULL_TYPE1
    return IterationOutcome.NULL_TYPE2


def backtracking_line_search(f, x, trial, f_trial, budget_left, max_expansions=10):
    """Expand along ``x + t (trial - x)``, ``t = 2, 4, ...``, while ``f`` improves.

    Each call to ``f`` is one evaluation against ``budget_left``; the best
    point seen (``trial`` itself if nothing improves) is returned.
    """
    x = np.asarray(x, dtype=float)
    d = np.asarray(trial, dtype=float) - x
    best_x, best_f = np.asarray(trial, dtype=float), f_trial
    t = 1.0
    for _ in range(max_expansions):
        if budget_left <= 0:
            break
        t *= 2.0
        cand = x + t * d
        if not np.all(np.isfinite(cand)):
            break
        fc = f(cand)
        budget_left -= 1
        if fc < best_f:
            best_x, best_f = cand, fc
        else:
            break
    return best_x, best_f


def _as_counted(problem, x0):
    if isinstance(problem, CountedObjective):
        return problem, np.asarray(x0, dtype=float)
    if isinstance(problem, Problem):
        return CountedObjective.for_problem(problem), (problem.x0 if x0 is None else np.asarray(x0, dtype=float))
    x0 = np.asarray(x0, dtype=float)
    return CountedObjective(problem, x0.size), x0


def solve(problem, strategy, config=None, geometry=None, seed=0, x0=None):
    """Minimise ``problem`` from its start point.

    ``problem`` is a :class:`Problem`, a :class:`CountedObjective`, or a plain
    callable (then ``x0`` is required).  Evaluation stops being requested
    once ``budget_factor * n`` calls have been made; the iteration in flight
    still completes.
    """
    cfg = config or SolverConfig()
    gcfg = geometry or DEFAULT_CONFIG
    strategy = strategy if isinstance(strategy, Strategy) else Strategy.parse(strategy)
    f, x = _as_counted(problem, x0)
    x = np.array(x, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise ValueError("start point must be finite")
    n = x.size
    budget = cfg.budget_factor * n
    max_iter = cfg.max_iterations if cfg.max_iterations is not None else 10 * budget + 100
    rng = np.random.default_rng(seed)

    def geo_seed():
        return int(rng.integers(2**62))

    fx = f(x)
    delta = cfg.initial_radius(x)
    r = cfg.r0
    counts = Counter()
    centre_values = []
    k = 0
    stop = None

    try:
        Y = initial_sample_set(x, delta, sample_size_for(strategy.n_s, n), f.finite_points(), gcfg, geo_seed())
        while True:
            fvals = np.array([f(y) for y in Y.points])
            if not np.all(np.isfinite(fvals)):
                # poisoned sample points: shrink and resample without them
                delta *= cfg.gamma
                if delta < cfg.dtol:
                    stop = StopReason.RADIUS_STOP
                    break
                Y = initial_sample_set(x, delta, len(Y), f.finite_points(), gcfg, geo_seed())
                continue
            try:
                q = build_model(Y, fvals)
            except NonPoised:
                Y = initial_sample_set(x, delta, len(Y), None, gcfg, geo_seed())
                q = build_model(Y, [f(y) for y in Y.points])
            centre_values.append(fx)

            # step 1: stopping tests
            if np.linalg.norm(q.gradient(x)) < cfg.gtol_grad and delta < cfg.gtol_delta:
                stop = StopReason.GRADIENT_SUCCESS
                break
            if delta < cfg.dtol:
                stop = StopReason.RADIUS_STOP
                break
            if f.call_count >= budget or k >= max_iter:
                stop = StopReason.BUDGET_EXHAUSTED
                break

            # steps 2-3
            r = prox_feasibility_adjust(r, q.H)
            trial, dpred = prox_trial_point(q, x, r)
            if not np.all(np.isfinite(trial)):
                trial, dpred = x.copy(), 0.0
            # roundoff can push the predicted decrease a hair below zero
            dpred = max(dpred, 0.0)
            f_trial = f(trial)

            # step 4
            outcome = classify_step(f_trial, fx, cfg.m, dpred, trial, x, delta)
            counts[outcome] += 1
            size = next_size(strategy, outcome, n)
            if outcome is IterationOutcome.SERIOUS:
                if cfg.line_search:
                    x_new, f_new = backtracking_line_search(f, x, trial, f_trial, budget - f.call_count, cfg.max_expansions)
                else:
                    x_new, f_new = trial, f_trial
                factor = cfg.serious_radius_factor
                if np.array_equal(x_new, x):
                    # stationary model: only a more accurate model can help
                    factor = cfg.gamma
                Y = next_sample_set(outcome, Y, x_new, delta, cfg.gamma, size, f.finite_points(), gcfg, geo_seed(), factor)
                x, fx = np.asarray(x_new, dtype=float), f_new
                delta *= factor
            elif outcome is IterationOutcome.NULL_TYPE1:
                r *= 2.0
                Y = next_sample_set(outcome, Y, x, delta, cfg.gamma, size, f.finite_points(), gcfg, geo_seed())
            else:
                Y = next_sample_set(outcome, Y, x, delta, cfg.gamma, size, f.finite_points(), gcfg, geo_seed())
                delta *= cfg.gamma
            k += 1
    except (GeometryFailure, NonPoised) as exc:
        log.warning("run stopped: %s", exc)
        stop = StopReason.GEOMETRY_FAILURE

    return RunResult(x, fx, stop, list(f.trace), counts, centre_values, k)
