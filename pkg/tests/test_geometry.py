import numpy as np
import pytest

from adaptdfo.errors import NonPoised, WrongCardinality
from adaptdfo.geometry import (
    GeometryConfig,
    IterationOutcome,
    ball_candidates,
    cached_points_near,
    complete_well_poised_set,
    initial_sample_set,
    lagrange_basis,
    next_sample_set,
    passes_safety_check,
    poisedness_constant,
    select_subset,
)
from adaptdfo.model_core import SampleSet, build_linear_model, quadratic_size


def in_ball(Y, centre, radius):
    return np.all(np.linalg.norm(Y.points - centre, axis=1) <= radius * (1 + 1e-9))


def disc_grid(k=801):
    t = np.linspace(-1, 1, k)
    X, Yg = np.meshgrid(t, t)
    P = np.column_stack([X.ravel(), Yg.ravel()])
    return P[np.linalg.norm(P, axis=1) <= 1]


# ---- Lagrange polynomials --------------------------------------------------


def test_linear_lagrange_1d():
    L = lagrange_basis(SampleSet([[0.0], [1.0]]))
    for x in (-0.5, 0.25, 2.0):
        assert L(np.array([x])) == pytest.approx([1 - x, x])


def test_quadratic_lagrange_1d():
    L = lagrange_basis(SampleSet([[0.0], [1.0], [2.0]]))
    for x in (-1.0, 0.5, 3.0):
        assert L(np.array([x]))[0] == pytest.approx((x - 1) * (x - 2) / 2)


@pytest.mark.parametrize("p", [3, 4, 5, 6])
def test_lagrange_cardinal_and_partition_of_unity(p):
    rng = np.random.default_rng(p)
    Y = SampleSet(np.vstack([np.zeros(2), rng.uniform(-1, 1, (p - 1, 2))]))
    L = lagrange_basis(Y)
    assert np.allclose(L(Y.points), np.eye(p), atol=1e-8)
    X = rng.standard_normal((10, 2))
    assert np.allclose(L(X).sum(axis=1), 1.0, atol=1e-8)


def test_lagrange_rejects_collinear():
    with pytest.raises(NonPoised):
        lagrange_basis(SampleSet([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]))


# ---- poisedness constant ---------------------------------------------------


def test_unit_simplex_lambda_matches_grid_oracle():
    Y = SampleSet([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    lam = poisedness_constant(Y, 1.0)
    P = disc_grid()
    oracle = np.abs(np.column_stack([1 - P[:, 0] - P[:, 1], P[:, 0], P[:, 1]])).max()
    assert 1.0 <= lam <= 3.0
    assert lam == pytest.approx(oracle, rel=1e-3)


def test_quadratic_lambda_matches_grid_oracle():
    Y = SampleSet([[0, 0], [1, 0], [0, 1], [-1, 0], [0, -1], [0.6, 0.6]])
    lam = poisedness_constant(Y, 1.0, GeometryConfig(candidate_count=2000), seed=4)
    P = disc_grid(401)
    Z = P
    M = np.column_stack([np.ones(len(Z)), Z, 0.5 * Z[:, 0] ** 2, Z[:, 0] * Z[:, 1], 0.5 * Z[:, 1] ** 2])
    Mi = np.column_stack([np.ones(6), Y.points, 0.5 * Y.points[:, 0] ** 2, Y.points[:, 0] * Y.points[:, 1], 0.5 * Y.points[:, 1] ** 2])
    oracle = np.abs(M @ np.linalg.inv(Mi)).max()
    # both are discrete estimates of the same maximum
    assert lam == pytest.approx(oracle, rel=0.01)


def test_thin_triangle_is_badly_poised():
    Y = SampleSet([[0.0, 0.0], [1.0, 0.0], [1.0, 1e-3]])
    lam = poisedness_constant(Y, Y.radius)
    # l_2(x) = x_2 / 1e-3 in original coordinates, so max over the ball is about 1000
    assert lam > 100
    assert lam == pytest.approx(Y.radius / 1e-3, rel=0.01)


# ---- completion ------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_completion_from_centre_only(n):
    cfg = GeometryConfig()
    c = np.arange(n, dtype=float)
    Y = complete_well_poised_set(None, c, 0.5, cfg, seed=1)
    assert len(Y) == quadratic_size(n)
    assert np.array_equal(Y.points[0], c)
    assert in_ball(Y, c, 0.5)
    assert poisedness_constant(Y, 0.5, cfg, seed=1) <= cfg.lambda_threshold


def test_completion_reuses_seed_point():
    Y = complete_well_poised_set(SampleSet([[0.0], [0.5]]), [0.0], 1.0, seed=0)
    assert len(Y) == 3
    pts = sorted(Y.points[:, 0])
    assert 0.0 in pts and 0.5 in pts
    # direct solve of the 3x3 system succeeds
    M = np.column_stack([np.ones(3), Y.points[:, 0], 0.5 * Y.points[:, 0] ** 2])
    assert np.linalg.cond(M) < 1e8


def test_completion_is_idempotent():
    Y = complete_well_poised_set(None, [1.0, 2.0], 0.3, seed=2)
    again = complete_well_poised_set(Y, [1.0, 2.0], 0.3, seed=2)
    assert np.array_equal(again.points, Y.points)


def test_completion_deterministic_in_seed():
    a = complete_well_poised_set(None, [0.0, 0.0, 0.0], 1.0, seed=7)
    b = complete_well_poised_set(None, [0.0, 0.0, 0.0], 1.0, seed=7)
    assert np.array_equal(a.points, b.points)


def test_completion_rejects_seeds_outside_ball():
    with pytest.raises(ValueError):
        complete_well_poised_set(SampleSet([[0.0], [2.0]]), [0.0], 1.0)


# ---- subset selection ------------------------------------------------------


def test_select_full_count_is_identity():
    full = complete_well_poised_set(None, [0.0, 0.0], 1.0, seed=0)
    assert select_subset(full, 6) is full


def test_select_linear_prefix_is_poised():
    full = complete_well_poised_set(None, [0.0, 0.0], 1.0, seed=0)
    Y = select_subset(full, 3)
    assert np.array_equal(Y.points, full.points[:3])
    M = np.column_stack([np.ones(3), Y.points])
    assert np.linalg.cond(M) < 1e8


def test_select_degenerate_prefix_regenerates():
    pts = [[0, 0], [0.5, 0], [1, 0], [0, 1], [0, -1], [0.5, 0.5]]
    full = SampleSet(np.array(pts, dtype=float))
    Y = select_subset(full, 3, seed=0)
    assert len(Y) == 3
    assert not np.array_equal(Y.points, full.points[:3])
    assert np.array_equal(Y.centre, [0.0, 0.0])
    build_linear_model(Y, np.zeros(3))  # poised: no exception
    assert passes_safety_check(Y, 1.0)


def test_select_bad_count():
    full = complete_well_poised_set(None, [0.0, 0.0], 1.0, seed=0)
    with pytest.raises(WrongCardinality):
        select_subset(full, 2)


# ---- cache reuse -----------------------------------------------------------


def test_cached_points_most_recent_first():
    hist = np.array([[0.1, 0.0], [5.0, 5.0], [0.0, 0.2], [0.0, 0.0], [0.1, 0.0]])
    near = cached_points_near(hist, np.zeros(2), 0.5)
    assert np.array_equal(near, [[0.1, 0.0], [0.0, 0.2]])


# ---- next sample set -------------------------------------------------------


def test_next_serious_empty_cache():
    x = np.array([1.0, -1.0])
    Y = next_sample_set(IterationOutcome.SERIOUS, None, x, 0.4, 0.5, 4, None, seed=0)
    assert len(Y) == 4 and np.array_equal(Y.centre, x) and in_ball(Y, x, 0.4)
    assert passes_safety_check(Y, 0.4)


def test_next_null1_subset_of_previous():
    Yk = complete_well_poised_set(None, [0.0, 0.0], 1.0, seed=3)
    Y = next_sample_set(IterationOutcome.NULL_TYPE1, Yk, Yk.centre, 1.0, 0.5, 3, Yk.points, seed=3)
    assert len(Y) == 3
    assert all(any(np.array_equal(p, q) for q in Yk.points) for p in Y.points)
    M = np.column_stack([np.ones(3), Y.points])
    assert np.linalg.cond(M) < 1e8


def test_next_null1_grows_and_keeps_previous_points():
    Yk = initial_sample_set([0.0, 0.0], 1.0, 3, seed=1)
    Y = next_sample_set(IterationOutcome.NULL_TYPE1, Yk, Yk.centre, 1.0, 0.5, 6, Yk.points, seed=1)
    assert len(Y) == 6
    for p in Yk.points:
        assert any(np.array_equal(p, q) for q in Y.points)


def test_next_null2_shrinks_radius():
    Yk = complete_well_poised_set(None, [0.0, 0.0], 1.0, seed=3)
    Y = next_sample_set(IterationOutcome.NULL_TYPE2, Yk, Yk.centre, 1.0, 0.5, 5, Yk.points, seed=3)
    assert len(Y) == 5 and Y.radius <= 0.5 * (1 + 1e-9)


def test_next_sample_set_reuses_cache_in_ball():
    hist = np.array([[0.05, 0.0], [0.0, 0.05]])
    Y = next_sample_set(IterationOutcome.SERIOUS, None, np.zeros(2), 0.1, 0.5, 3, hist, seed=0)
    assert any(np.array_equal(p, [0.05, 0.0]) for p in Y.points)
    assert any(np.array_equal(p, [0.0, 0.05]) for p in Y.points)


@pytest.mark.parametrize("size", [4, 7, 10])
def test_intermediate_sizes_have_poised_linear_prefix(size):
    Y = initial_sample_set(np.zeros(3), 1.0, size, seed=size)
    assert passes_safety_check(Y, 1.0)
    M = np.column_stack([np.ones(4), Y.points[:4]])
    assert np.linalg.cond(M) < 1e8


def test_ball_candidates_inside_unit_ball():
    Z = ball_candidates(4, 500, seed=0)
    assert Z.shape == (500, 4) and np.all(np.linalg.norm(Z, axis=1) <= 1)


def test_config_validation():
    with pytest.raises(ValueError):
        GeometryConfig(lambda_threshold=1.0)
    with pytest.raises(ValueError):
        GeometryConfig(candidate_count=3).candidates_for(2)
