import io
import math

import numpy as np
import pytest

from adaptdfo import bench
from adaptdfo.bench import RunRecord, aggregate_table, data_profile, improvement_digits, solved_at
from adaptdfo.errors import DegenerateProblem, IncompleteGrid
from adaptdfo.strategy import Strategy

LLL = Strategy.parse("lin/lin/lin")
QQQ = Strategy.parse("quad/quad/quad")


def record(values, strategy=LLL, ls=False, problem="p", dim=1, f0=None, fbest=0.0):
    values = np.asarray(values, dtype=float)
    return RunRecord(problem, dim, strategy, ls, "BudgetExhausted", values, values[0] if f0 is None else f0, fbest)


# ---- imp --------------------------------------------------------------------


def test_imp_examples():
    assert improvement_digits(0.1, 100.0, 0.0) == pytest.approx(3.0)
    assert improvement_digits(100.0, 100.0, 0.0) == 0.0
    assert improvement_digits(0.0, 100.0, 0.0) == 16.0
    assert improvement_digits(1e-30, 1.0, 0.0) == 16.0
    with pytest.raises(DegenerateProblem):
        improvement_digits(1.0, 2.0, 2.0)


def test_imp_uses_absolute_gap():
    # fbest slightly above the true minimum
    assert improvement_digits(0.9e-3, 1.0, 1e-3) == pytest.approx(-math.log10(1e-4 / (1 - 1e-3)))


def test_imp_monotone():
    fs = np.linspace(100, 0, 50)
    d = [improvement_digits(f, 100.0, 0.0) for f in fs]
    assert np.all(np.diff(d) >= 0)


# ---- table --------------------------------------------------------------------


def test_table_single_problem_exact():
    rows = aggregate_table([record([4.0, 0.0])])
    assert len(rows) == 1 and rows[0].imp == 16.0


def test_table_sorted_descending_and_sum():
    recs = [
        record([1.0, 1e-5], LLL, problem="a"),
        record([1.0, 1e-2], LLL, problem="b"),
        record([1.0, 1e-7], QQQ, problem="a"),
        record([1.0, 1e-7], QQQ, problem="b"),
    ]
    rows = aggregate_table(recs)
    assert [r.strategy for r in rows] == [QQQ, LLL]
    assert rows[0].imp == pytest.approx(14.0)
    assert rows[1].imp == pytest.approx(7.0)
    for r in rows:
        assert abs(r.imp - sum(r.per_problem.values())) <= 1e-10


def test_table_uses_best_value_not_last():
    rows = aggregate_table([record([1.0, 1e-3, 0.5])])
    assert rows[0].imp == pytest.approx(3.0)


def test_table_incomplete_grid():
    recs = [record([1.0, 0.1], LLL, problem="a"), record([1.0, 0.1], QQQ, problem="b")]
    with pytest.raises(IncompleteGrid):
        aggregate_table(recs)


def test_table_drops_degenerate_problems():
    recs = [record([1.0, 0.1], problem="a"), record([0.0, 0.0], problem="b")]
    rows = aggregate_table(recs)
    assert rows[0].imp == pytest.approx(1.0) and len(rows[0].per_problem) == 1


# ---- profiles -----------------------------------------------------------------


def test_profile_example_two_problems():
    a = np.ones(30)
    a[9:] = 0.0  # solved at call 10
    b = np.ones(30)
    b[19:] = 0.0  # solved at call 20
    recs = [record(a, problem="a", f0=1.0), record(b, problem="b", f0=1.0)]
    assert solved_at(recs[0], 1e-3) == 10
    prof = data_profile(recs, 1e-3)
    assert prof.curve[5] == 0.5 and prof.curve[10] == 1.0 and prof.curve[4] == 0.0


def test_profile_trivial_cases():
    recs = [record([1.0, 0.9], f0=1.0)]
    assert np.all(data_profile(recs, 1.0).fractions == 1.0)
    assert np.all(data_profile(recs, 1e-3).fractions == 0.0)


def test_profile_properties_on_random_traces():
    rng = np.random.default_rng(0)
    recs = [record(np.exp(-rng.uniform(0, 1) * np.arange(200)), problem=f"p{i}", dim=int(rng.integers(1, 4))) for i in range(15)]
    lo, hi = data_profile(recs, 1e-6), data_profile(recs, 1e-3)
    for prof in (lo, hi):
        assert np.all(np.diff(prof.fractions) >= 0)
        assert np.all((prof.fractions >= 0) & (prof.fractions <= 1))
    assert np.all(hi.fractions >= lo.fractions)


# ---- grid and csv -------------------------------------------------------------


def test_run_benchmark_cardinality_and_determinism():
    probs = [("rosenbrock", 2), ("beale", 2)]
    strats = ["lin/lin/lin", "quad/quad/quad", "lin/2n/lin"]
    a = bench.run_benchmark(probs, strats, line_search="off", seed=3)
    b = bench.run_benchmark(probs, strats, line_search="off", seed=3)
    assert len(a) == 6
    assert all(x.same_as(y) for x, y in zip(a, b))


def test_run_seed_independent_of_line_search_and_order():
    s = bench.run_seed(0, "Rosenbrock", 2, LLL)
    assert s == bench.run_seed(0, "rosenbrock", 2, "lin/lin/lin")
    assert s != bench.run_seed(1, "rosenbrock", 2, LLL)


def test_runs_csv_roundtrip():
    recs = bench.run_benchmark([("beale", 2)], [LLL, QQQ], seed=0)
    buf = io.StringIO()
    bench.write_runs_csv(recs, buf)
    text = buf.getvalue()
    assert text.splitlines()[0] == ",".join(bench.RUNS_HEADER)
    back = bench.read_runs_csv(io.StringIO(text))
    assert len(back) == len(recs)
    for x, y in zip(recs, back):
        assert x.same_as(y) and x.f0 == y.f0


def test_runs_csv_malformed():
    with pytest.raises(ValueError):
        bench.read_runs_csv(io.StringIO("a,b\n1,2\n"))
    bad = ",".join(bench.RUNS_HEADER) + "\nbeale,2,lin/lin/lin,off,2,1.0,BudgetExhausted\n"
    with pytest.raises(ValueError):
        bench.read_runs_csv(io.StringIO(bad))


def test_table_and_profile_csv_layout():
    recs = [record([1.0, 0.01], LLL, ls=True), record([1.0, 0.1], LLL, ls=False)]
    buf = io.StringIO()
    bench.write_table_csv(aggregate_table(recs), buf)
    lines = buf.getvalue().splitlines()
    assert lines == ["n_s,n_n1,n_n2,line_search,imp", "lin,lin,lin,on,2.0000000000", "lin,lin,lin,off,1.0000000000"]
    buf = io.StringIO()
    bench.write_profile_csv(bench.data_profiles(recs, [1e-3]), buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "strategy,line_search,tau,alpha,fraction"
    assert len(lines) == 1 + 2 * 100
