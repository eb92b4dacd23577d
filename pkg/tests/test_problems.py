import numpy as np
import pytest

from adaptdfo.errors import DimensionMismatch, UnknownProblem
from adaptdfo.problems import CountedObjective, Group, evaluate_counted, get_problem, list_problems, registry_csv

REQUIRED_LOW = [
    ("Rosenbrock", 2), ("Beale", 2), ("Freudenstein & Roth", 2), ("Powell badly scaled", 2), ("Bard", 3),
    ("Box 3D", 3), ("Helical valley", 3), ("Gaussian", 3), ("Brown & Dennis", 4), ("Wood", 4), ("Watson", 6),
    ("Biggs EXP6", 6),
]
REQUIRED_HIGH = [
    ("Rosenbrock", 10), ("Rosenbrock", 20), ("Wood", 10), ("Wood", 20), ("Powell singular", 12),
    ("Powell singular", 20), ("Zakharov", 10), ("Zakharov", 20), ("Exponential", 10), ("Ackley", 10),
]


@pytest.mark.parametrize("name,dim", REQUIRED_LOW + REQUIRED_HIGH)
def test_required_problems_registered(name, dim):
    p = get_problem(name, dim)
    assert p.dim == dim and p.x0.shape == (dim,)
    assert p.group is (Group.LOW if (name, dim) in REQUIRED_LOW else Group.HIGH)


def test_registry_sizes():
    assert len(list_problems("low")) >= 12 and len(list_problems("high")) >= 8


@pytest.mark.parametrize("p", list_problems(), ids=lambda p: f"{p.key[0]}-{p.dim}")
def test_registry_entry_consistent(p):
    f0 = p.f0
    assert np.isfinite(f0) and p.fbest <= f0 and p.source
    if p.xstar is not None:
        assert abs(p(p.xstar) - p.fbest) <= 1e-8


def test_rosenbrock_values():
    p = get_problem("rosenbrock", 2)
    assert np.array_equal(p.x0, [-1.2, 1.0])
    assert p.f0 == pytest.approx(24.2)
    assert p([1.0, 1.0]) == 0.0


def test_beale_and_wood_minimisers():
    assert get_problem("Beale", 2)([3.0, 0.5]) == pytest.approx(0.0, abs=1e-15)
    assert get_problem("wood", 4)(np.ones(4)) == 0.0


@pytest.mark.parametrize(
    "name,dim",
    [("Bard", 3), ("Gaussian", 3), ("Brown & Dennis", 4), ("Watson", 6), ("Penalty I", 4), ("Meyer", 3),
     ("Osborne I", 5), ("Kowalik & Osborne", 4), ("Jennrich & Sampson", 2), ("Penalty II", 4)],
)
def test_literature_fbest_is_locally_optimal(name, dim):
    # an independent local solve from near the literature value must not beat it materially
    from scipy.optimize import minimize

    p = get_problem(name, dim)
    res = minimize(p, p.x0, method="Nelder-Mead", options={"maxiter": 40000, "maxfev": 40000, "xatol": 1e-12, "fatol": 1e-16})
    res = minimize(p, res.x, method="BFGS", options={"gtol": 1e-12})
    assert res.fun >= p.fbest - 1e-8 * max(1.0, abs(p.fbest))


def test_unknown_problem():
    with pytest.raises(UnknownProblem):
        get_problem("nosuch", 2)
    with pytest.raises(UnknownProblem):
        get_problem("rosenbrock", 7)


def test_registry_csv_header_and_rows():
    lines = registry_csv().splitlines()
    assert lines[0] == "name,dim,group,f0,fbest"
    assert len(lines) == 1 + len(list_problems())


def test_counted_cache_semantics():
    co = CountedObjective.for_problem(get_problem("rosenbrock", 2))
    assert evaluate_counted(co, np.array([1.0, 1.0])) == 0.0
    assert co.call_count == 1
    co([1.0, 1.0])
    assert co.call_count == 1
    co([0.0, 0.0])
    assert co.call_count == 2 == len(co.trace) == len(co.cache)
    assert [t[0] for t in co.trace] == [1, 2]


def test_counted_dimension_and_poisoned_values():
    co = CountedObjective(lambda x: np.log(x[0]), 1)
    with pytest.raises(DimensionMismatch):
        co(np.zeros(2))
    assert co(np.array([-1.0])) == np.inf
    assert len(co.poisoned) == 1 and co.call_count == 1
    assert len(co.finite_points()) == 0
