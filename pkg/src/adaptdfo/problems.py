"""Unconstrained test problems and a counting, caching objective wrapper.

Sources
-------
MGH  More, Garbow and Hillstrom, "Testing unconstrained optimization
     software", ACM TOMS 7 (1981).  Formulas, start points and optimal values
     follow that article; the number of residuals ``m`` is the
     one given there unless noted.
AKZ  Ali, Khompatraporn and Zabinsky, "A numerical evaluation of several
     stochastic algorithms on selected continuous global optimization test
     problems", J. Global Optim. 31 (2005).  That collection gives search
     boxes but no start points; the start points used here are our own and
     are flagged as such.

Least-squares problems are stored as ``f(x) = sum(r_i(x)**2)``.
"""
import csv
import io
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DimensionMismatch, UnknownProblem


class Group(str, Enum):
    LOW = "low"
    HIGH = "high"


@dataclass(frozen=True, eq=False)
class Problem:
    name: str
    dim: int
    objective: object
    x0: np.ndarray
    fbest: float
    group: Group
    xstar: np.ndarray | None = None
    source: str = ""

    def __post_init__(self):
        x0 = np.asarray(self.x0, dtype=float).copy()
        if x0.shape != (self.dim,):
            raise DimensionMismatch(f"{self.name}: x0 has shape {x0.shape}, dim is {self.dim}")
        x0.setflags(write=False)
        object.__setattr__(self, "x0", x0)
        if self.xstar is not None:
            xs = np.asarray(self.xstar, dtype=float).copy()
            xs.setflags(write=False)
            object.__setattr__(self, "xstar", xs)
        object.__setattr__(self, "group", Group(self.group))

    @property
    def key(self):
        return (slug(self.name), self.dim)

    @property
    def f0(self):
        return float(self.objective(self.x0.copy()))

    def __call__(self, x):
        return float(self.objective(np.asarray(x, dtype=float)))


def slug(name):
    out = []
    for ch in name.strip().lower():
        out.append(ch if ch.isalnum() else "_")
    s = "".join(out)
    while "__" in s:
        s = s.replace("__", "_")
    return s.strip("_")


def _sumsq(r):
    return float(np.dot(r, r))


# --------------------------------------------------------------------------
# MGH least-squares problems


def rosenbrock(x):
    """Chained Rosenbrock; equals MGH #1 for n = 2."""
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))


def freudenstein_roth(x):
    r1 = -13.0 + x[0] + ((5.0 - x[1]) * x[1] - 2.0) * x[1]
    r2 = -29.0 + x[0] + ((x[1] + 1.0) * x[1] - 14.0) * x[1]
    return r1 * r1 + r2 * r2


def powell_badly_scaled(x):
    r1 = 1e4 * x[0] * x[1] - 1.0
    r2 = np.exp(-x[0]) + np.exp(-x[1]) - 1.0001
    return r1 * r1 + r2 * r2


_BEALE_Y = np.array([1.5, 2.25, 2.625])


def beale(x):
    i = np.arange(1, 4)
    return _sumsq(_BEALE_Y - x[0] * (1.0 - x[1] ** i))


def helical_valley(x):
    theta = np.arctan(x[1] / x[0]) / (2 * np.pi) if x[0] != 0 else 0.25 * np.sign(x[1])
    if x[0] < 0:
        theta += 0.5
    r = np.array([10.0 * (x[2] - 10.0 * theta), 10.0 * (np.hypot(x[0], x[1]) - 1.0), x[2]])
    return _sumsq(r)


_BARD_Y = np.array([0.14, 0.18, 0.22, 0.25, 0.29, 0.32, 0.35, 0.39, 0.37, 0.58, 0.73, 0.96, 1.34, 2.10, 4.39])


def bard(x):
    u = np.arange(1.0, 16.0)
    v = 16.0 - u
    w = np.minimum(u, v)
    return _sumsq(_BARD_Y - (x[0] + u / (v * x[1] + w * x[2])))


_GAUSS_Y = np.array(
    [0.0009, 0.0044, 0.0175, 0.0540, 0.1295, 0.2420, 0.3521, 0.3989, 0.3521, 0.2420, 0.1295, 0.0540, 0.0175, 0.0044, 0.0009]
)


def gaussian(x):
    t = (8.0 - np.arange(1.0, 16.0)) / 2.0
    return _sumsq(x[0] * np.exp(-x[1] * (t - x[2]) ** 2 / 2.0) - _GAUSS_Y)


def box3d(x):
    """MGH #12 with m = 10."""
    t = 0.1 * np.arange(1.0, 11.0)
    r = np.exp(-t * x[0]) - np.exp(-t * x[1]) - x[2] * (np.exp(-t) - np.exp(-10.0 * t))
    return _sumsq(r)


def brown_dennis(x):
    """MGH #16 with m = 20."""
    t = np.arange(1.0, 21.0) / 5.0
    r = (x[0] + t * x[1] - np.exp(t)) ** 2 + (x[2] + x[3] * np.sin(t) - np.cos(t)) ** 2
    return _sumsq(r)


def biggs_exp6(x):
    """MGH #18 with m = 13."""
    t = 0.1 * np.arange(1.0, 14.0)
    y = np.exp(-t) - 5.0 * np.exp(-10.0 * t) + 3.0 * np.exp(-4.0 * t)
    r = x[2] * np.exp(-t * x[0]) - x[3] * np.exp(-t * x[1]) + x[5] * np.exp(-t * x[4]) - y
    return _sumsq(r)


def watson(x):
    """MGH #20 with m = 31."""
    n = x.size
    t = np.arange(1.0, 30.0) / 29.0
    j = np.arange(n)
    powers = t[:, None] ** j[None, :]
    s1 = powers[:, : n - 1] @ (j[1:] * x[1:])
    s2 = powers @ x
    r = s1 - s2**2 - 1.0
    return _sumsq(np.concatenate([r, [x[0], x[1] - x[0] ** 2 - 1.0]]))


def wood(x):
    """Chained Wood over overlapping 4-blocks; equals MGH #14 for n = 4."""
    total = 0.0
    for j in range(0, x.size - 3, 2):
        a, b, c, d = x[j : j + 4]
        total += (
            100.0 * (b - a * a) ** 2
            + (1.0 - a) ** 2
            + 90.0 * (d - c * c) ** 2
            + (1.0 - c) ** 2
            + 10.0 * (b + d - 2.0) ** 2
            + 0.1 * (b - d) ** 2
        )
    return total


def powell_singular(x):
    """Extended Powell singular function (MGH #22), n a multiple of 4."""
    a, b, c, d = x[0::4], x[1::4], x[2::4], x[3::4]
    return float(np.sum((a + 10 * b) ** 2 + 5 * (c - d) ** 2 + (b - 2 * c) ** 4 + 10 * (a - d) ** 4))


def variably_dimensional(x):
    """MGH #25."""
    j = np.arange(1.0, x.size + 1)
    s = np.dot(j, x - 1.0)
    return _sumsq(x - 1.0) + s * s + s**4


def brown_badly_scaled(x):
    """MGH #4."""
    r = np.array([x[0] - 1e6, x[1] - 2e-6, x[0] * x[1] - 2.0])
    return _sumsq(r)


def jennrich_sampson(x):
    """MGH #6 with m = 10."""
    i = np.arange(1.0, 11.0)
    return _sumsq(2.0 + 2.0 * i - (np.exp(i * x[0]) + np.exp(i * x[1])))


def meyer(x):
    """MGH #10."""
    t = 45.0 + 5.0 * np.arange(1.0, 17.0)
    return _sumsq(x[0] * np.exp(x[1] / (t + x[2])) - _MEYER_Y)


_MEYER_Y = np.array(
    [34780, 28610, 23650, 19630, 16370, 13720, 11540, 9744, 8261, 7030, 6005, 5147, 4427, 3820, 3307, 2872], dtype=float
)


def gulf(x):
    """MGH #11 with m = 99."""
    t = np.arange(1.0, 100.0) / 100.0
    y = 25.0 + (-50.0 * np.log(t)) ** (2.0 / 3.0)
    return _sumsq(np.exp(-np.abs(y - x[1]) ** x[2] / x[0]) - t)


_KO_Y = np.array([0.1957, 0.1947, 0.1735, 0.1600, 0.0844, 0.0627, 0.0456, 0.0342, 0.0323, 0.0235, 0.0246])
_KO_U = np.array([4.0, 2.0, 1.0, 0.5, 0.25, 0.167, 0.125, 0.1, 0.0833, 0.0714, 0.0625])


def kowalik_osborne(x):
    """MGH #15."""
    u = _KO_U
    return _sumsq(_KO_Y - x[0] * (u * u + u * x[1]) / (u * u + u * x[2] + x[3]))


_OSB1_Y = np.array(
    [
        0.844, 0.908, 0.932, 0.936, 0.925, 0.908, 0.881, 0.850, 0.818, 0.784, 0.751, 0.718, 0.685, 0.658, 0.628, 0.603, 0.580,
        0.558, 0.538, 0.522, 0.506, 0.490, 0.478, 0.467, 0.457, 0.448, 0.438, 0.431, 0.424, 0.420, 0.414, 0.411, 0.406,
    ]
)


def osborne1(x):
    """MGH #17."""
    t = 10.0 * np.arange(33.0)
    return _sumsq(_OSB1_Y - (x[0] + x[1] * np.exp(-t * x[3]) + x[2] * np.exp(-t * x[4])))


def penalty2(x):
    """MGH #24 (m = 2n)."""
    n = x.size
    a = np.sqrt(1e-5)
    i = np.arange(2.0, n + 1)
    y = np.exp(i / 10.0) + np.exp((i - 1) / 10.0)
    r = [np.array([x[0] - 0.2])]
    r.append(a * (np.exp(x[1:] / 10.0) + np.exp(x[:-1] / 10.0) - y))
    r.append(a * (np.exp(x[1:] / 10.0) - np.exp(-0.1)))
    r.append(np.array([np.dot(n - np.arange(n), x * x) - 1.0]))
    return _sumsq(np.concatenate(r))


def _boundary_grid(n):
    h = 1.0 / (n + 1)
    return h, h * np.arange(1.0, n + 1)


def discrete_boundary(x):
    """MGH #28."""
    h, t = _boundary_grid(x.size)
    xp = np.concatenate([[0.0], x, [0.0]])
    r = 2 * x - xp[:-2] - xp[2:] + h * h * (x + t + 1.0) ** 3 / 2.0
    return _sumsq(r)


def discrete_integral(x):
    """MGH #29."""
    h, t = _boundary_grid(x.size)
    c = (x + t + 1.0) ** 3
    lower = np.cumsum(t * c)
    upper = np.concatenate([np.cumsum(((1 - t) * c)[::-1])[::-1][1:], [0.0]])
    r = x + h * ((1 - t) * lower + t * upper) / 2.0
    return _sumsq(r)


def broyden_tridiagonal(x):
    """MGH #30."""
    xp = np.concatenate([[0.0], x, [0.0]])
    return _sumsq((3.0 - 2.0 * x) * x - xp[:-2] - 2.0 * xp[2:] + 1.0)


def broyden_banded(x):
    """MGH #31 (ml = 5, mu = 1)."""
    n = x.size
    r = np.empty(n)
    for i in range(n):
        lo, hi = max(0, i - 5), min(n - 1, i + 1)
        j = np.array([k for k in range(lo, hi + 1) if k != i], dtype=int)
        r[i] = x[i] * (2.0 + 5.0 * x[i] ** 2) + 1.0 - np.sum(x[j] * (1.0 + x[j]))
    return _sumsq(r)


def arrowhead(x):
    """CUTE ARWHEAD."""
    return float(np.sum((x[:-1] ** 2 + x[-1] ** 2) ** 2 - 4.0 * x[:-1] + 3.0))


def trigonometric(x):
    """MGH #26."""
    n = x.size
    i = np.arange(1.0, n + 1)
    r = n - np.sum(np.cos(x)) + i * (1.0 - np.cos(x)) - np.sin(x)
    return _sumsq(r)


def penalty1(x):
    """MGH #23."""
    r = np.sqrt(1e-5) * (x - 1.0)
    s = np.dot(x, x) - 0.25
    return _sumsq(r) + s * s


def brown_almost_linear(x):
    """MGH #27."""
    n = x.size
    r = x + np.sum(x) - (n + 1.0)
    r[-1] = np.prod(x) - 1.0
    return _sumsq(r)


# --------------------------------------------------------------------------
# AKZ global-optimisation problems


def zakharov(x):
    s = np.dot(0.5 * np.arange(1.0, x.size + 1), x)
    return float(np.dot(x, x) + s**2 + s**4)


def exponential(x):
    return float(-np.exp(-0.5 * np.dot(x, x)))


def ackley(x):
    n = x.size
    return float(
        -20.0 * np.exp(-0.2 * np.sqrt(np.dot(x, x) / n)) - np.exp(np.sum(np.cos(2 * np.pi * x)) / n) + 20.0 + np.e
    )


def griewank(x):
    i = np.arange(1.0, x.size + 1)
    return float(1.0 + np.dot(x, x) / 4000.0 - np.prod(np.cos(x / np.sqrt(i))))


def rastrigin(x):
    return float(10.0 * x.size + np.sum(x * x - 10.0 * np.cos(2 * np.pi * x)))


def levy_montalvo1(x):
    y = 1.0 + (x + 1.0) / 4.0
    s = 10.0 * np.sin(np.pi * y[0]) ** 2
    s += np.sum((y[:-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * y[1:]) ** 2))
    s += (y[-1] - 1.0) ** 2
    return float(np.pi / x.size * s)


def levy_montalvo2(x):
    s = np.sin(3 * np.pi * x[0]) ** 2
    s += np.sum((x[:-1] - 1.0) ** 2 * (1.0 + np.sin(3 * np.pi * x[1:]) ** 2))
    s += (x[-1] - 1.0) ** 2 * (1.0 + np.sin(2 * np.pi * x[-1]) ** 2)
    return float(0.1 * s)


def neumaier3(x):
    return float(np.sum((x - 1.0) ** 2) - np.dot(x[1:], x[:-1]))


def sinusoidal(x):
    """Arguments in degrees, as in the source collection (A = 2.5, B = 5, z = 30)."""
    d = np.deg2rad(x - 30.0)
    return float(-(2.5 * np.prod(np.sin(d)) + np.prod(np.sin(5.0 * d))))


# --------------------------------------------------------------------------
# registry

_REGISTRY: dict = {}


def register(problem, replace=False):
    """Add ``problem`` to the registry (keyed by slug of its name and dim)."""
    if problem.key in _REGISTRY and not replace:
        raise ValueError(f"problem {problem.name!r} in dimension {problem.dim} already registered")
    _REGISTRY[problem.key] = problem
    return problem


def get_problem(name, dim):
    try:
        return _REGISTRY[(slug(name), int(dim))]
    except KeyError:
        raise UnknownProblem(f"no problem {name!r} in dimension {dim}") from None


def list_problems(group=None):
    """Registered problems, low-dimensional first, then by name and dim."""
    wanted = None if group in (None, "all") else Group(group)
    probs = [p for p in _REGISTRY.values() if wanted is None or p.group is wanted]
    return sorted(probs, key=lambda p: (p.group is Group.HIGH, slug(p.name), p.dim))


def registry_csv(group=None):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "dim", "group", "f0", "fbest"])
    for p in list_problems(group):
        w.writerow([slug(p.name), p.dim, p.group.value, repr(p.f0), repr(p.fbest)])
    return buf.getvalue()


def _tile(block, n):
    return np.resize(np.asarray(block, dtype=float), n)


def _boundary_start(n):
    _, t = _boundary_grid(n)
    return t * (t - 1.0)


def _nf3_min(n):
    i = np.arange(1.0, n + 1)
    return i * (n + 1 - i)


def _register_defaults():
    # AKZ start points: every coordinate at half the upper bound of the
    # collection's search box
    L, H = Group.LOW, Group.HIGH
    mgh = "MGH"
    akz_start = "AKZ; start point chosen here"
    entries = [
        ("Rosenbrock", 2, rosenbrock, [-1.2, 1.0], 0.0, L, [1.0, 1.0], mgh + " #1"),
        ("Freudenstein & Roth", 2, freudenstein_roth, [0.5, -2.0], 0.0, L, [5.0, 4.0], mgh + " #2"),
        ("Powell badly scaled", 2, powell_badly_scaled, [0.0, 1.0], 0.0, L, None, mgh + " #3"),
        ("Beale", 2, beale, [1.0, 1.0], 0.0, L, [3.0, 0.5], mgh + " #5"),
        ("Helical valley", 3, helical_valley, [-1.0, 0.0, 0.0], 0.0, L, [1.0, 0.0, 0.0], mgh + " #7"),
        ("Bard", 3, bard, [1.0, 1.0, 1.0], 8.214877306578e-3, L, None, mgh + " #8"),
        ("Gaussian", 3, gaussian, [0.4, 1.0, 0.0], 1.127932769618e-8, L, None, mgh + " #9"),
        ("Box 3D", 3, box3d, [0.0, 10.0, 20.0], 0.0, L, [1.0, 10.0, 1.0], mgh + " #12, m=10"),
        ("Brown & Dennis", 4, brown_dennis, [25.0, 5.0, -5.0, -1.0], 85822.20162635628, L, None, mgh + " #16, m=20"),
        ("Wood", 4, wood, [-3.0, -1.0, -3.0, -1.0], 0.0, L, np.ones(4), mgh + " #14"),
        ("Watson", 6, watson, np.zeros(6), 2.287670053552e-3, L, None, mgh + " #20"),
        ("Biggs EXP6", 6, biggs_exp6, [1.0, 2.0, 1.0, 1.0, 1.0, 1.0], 0.0, L, [1.0, 10.0, 1.0, 5.0, 4.0, 3.0], mgh + " #18, m=13"),
        ("Variably dimensional", 3, variably_dimensional, 1 - np.arange(1, 4) / 3, 0.0, L, np.ones(3), mgh + " #25"),
        ("Trigonometric", 3, trigonometric, np.full(3, 1 / 3), 0.0, L, None, mgh + " #26"),
        ("Penalty I", 4, penalty1, np.arange(1.0, 5.0), 2.249977500058e-5, L, None, mgh + " #23"),
        ("Brown almost-linear", 3, brown_almost_linear, np.full(3, 0.5), 0.0, L, np.ones(3), mgh + " #27"),
        ("Brown badly scaled", 2, brown_badly_scaled, [1.0, 1.0], 0.0, L, [1e6, 2e-6], mgh + " #4"),
        ("Jennrich & Sampson", 2, jennrich_sampson, [0.3, 0.4], 124.36218235561478, L, None, mgh + " #6, m=10"),
        ("Meyer", 3, meyer, [0.02, 4000.0, 250.0], 87.9458551704501, L, None, mgh + " #10"),
        ("Gulf research", 3, gulf, [5.0, 2.5, 0.15], 0.0, L, [50.0, 25.0, 1.5], mgh + " #11, m=99"),
        ("Kowalik & Osborne", 4, kowalik_osborne, [0.25, 0.39, 0.415, 0.39], 3.0750560384923707e-4, L, None, mgh + " #15"),
        ("Osborne I", 5, osborne1, [0.5, 1.5, -1.0, 0.01, 0.02], 5.464894697482402e-5, L, None, mgh + " #17"),
        ("Penalty II", 4, penalty2, np.full(4, 0.5), 9.376293007355442e-6, L, None, mgh + " #24"),
        ("Discrete boundary value", 3, discrete_boundary, _boundary_start(3), 0.0, L, None, mgh + " #28"),
        ("Discrete integral equation", 3, discrete_integral, _boundary_start(3), 0.0, L, None, mgh + " #29"),
        ("Broyden tridiagonal", 3, broyden_tridiagonal, -np.ones(3), 0.0, L, None, mgh + " #30"),
        ("Broyden banded", 3, broyden_banded, -np.ones(3), 0.0, L, None, mgh + " #31"),
    ]
    for n in (10, 20):
        entries += [
            ("Rosenbrock", n, rosenbrock, _tile([-1.2, 1.0], n), 0.0, H, np.ones(n), "chained form; MGH start"),
            ("Wood", n, wood, _tile([-3.0, -1.0], n), 0.0, H, np.ones(n), "chained form; MGH start"),
            ("Zakharov", n, zakharov, np.full(n, 5.0), 0.0, H, np.zeros(n), akz_start),
            ("Variably dimensional", n, variably_dimensional, 1 - np.arange(1, n + 1) / n, 0.0, H, np.ones(n), mgh + " #25"),
            ("Ackley", n, ackley, np.full(n, 16.384), 0.0, H, np.zeros(n), akz_start),
            ("Exponential", n, exponential, np.full(n, 0.5), -1.0, H, np.zeros(n), akz_start),
            ("Griewank", n, griewank, np.full(n, 300.0), 0.0, H, np.zeros(n), akz_start),
            ("Rastrigin", n, rastrigin, np.full(n, 2.56), 0.0, H, np.zeros(n), akz_start),
            ("Levy & Montalvo I", n, levy_montalvo1, np.full(n, 5.0), 0.0, H, -np.ones(n), akz_start),
            ("Levy & Montalvo II", n, levy_montalvo2, np.full(n, 2.5), 0.0, H, np.ones(n), akz_start),
            ("Neumaier 3", n, neumaier3, np.full(n, n * n / 2.0), -n * (n + 4) * (n - 1) / 6.0, H, _nf3_min(n), akz_start),
            ("Sinusoidal", n, sinusoidal, np.full(n, 90.0), -3.5, H, np.full(n, 120.0), akz_start),
            ("Arrowhead", n, arrowhead, np.ones(n), 0.0, H, np.r_[np.ones(n - 1), 0.0], "CUTE ARWHEAD"),
        ]
    for n in (12, 20):
        entries.append(("Powell singular", n, powell_singular, _tile([3.0, -1.0, 0.0, 1.0], n), 0.0, H, np.zeros(n), mgh + " #22"))
    for name, n, fun, x0, fbest, group, xstar, src in entries:
        register(Problem(name, n, fun, x0, fbest, group, xstar, src))


_register_defaults()


# --------------------------------------------------------------------------
# counted objective


@dataclass
class CountedObjective:
    """Objective wrapper that caches by exact coordinates and records a trace.

    Non-finite objective values are stored as ``+inf`` and the point is
    listed in ``poisoned``.
    """

    fun: object
    dim: int
    call_count: int = 0
    cache: dict = field(default_factory=dict)
    trace: list = field(default_factory=list)
    poisoned: list = field(default_factory=list)

    @classmethod
    def for_problem(cls, problem):
        return cls(problem.objective, problem.dim)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionMismatch(f"point has shape {x.shape}, objective dimension is {self.dim}")
        if not np.all(np.isfinite(x)):
            raise ValueError("cannot evaluate at a non-finite point")
        key = x.tobytes()
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        with np.errstate(all="ignore"):
            try:
                value = float(self.fun(x.copy()))
            except (OverflowError, ZeroDivisionError, FloatingPointError):
                value = float("nan")
        if not np.isfinite(value):
            self.poisoned.append(x.copy())
            value = float("inf")
        self.call_count += 1
        self.cache[key] = value
        self.trace.append((self.call_count, x.copy(), value))
        return value

    def points(self):
        if not self.trace:
            return np.zeros((0, self.dim))
        return np.array([t[1] for t in self.trace])

    def values(self):
        return np.array([t[2] for t in self.trace])

    def finite_points(self):
        """Evaluated points with finite values, in evaluation order."""
        pts = self.points()
        return pts[np.isfinite(self.values())] if len(pts) else pts


def evaluate_counted(co, x):
    return co(x)
