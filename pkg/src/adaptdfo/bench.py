"""Benchmark harness: strategy x problem grids, improvement tables, data profiles.

CSV layouts
-----------
runs.csv     problem,dim,strategy,line_search,call_index,f_value,stop_reason
table.csv    n_s,n_n1,n_n2,line_search,imp
profile.csv  strategy,line_search,tau,alpha,fraction
"""
import csv
import logging
import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .dfpp import SolverConfig, solve
from .errors import DegenerateProblem, IncompleteGrid
from .geometry import DEFAULT_CONFIG
from .problems import get_problem, slug
from .strategy import Strategy

log = logging.getLogger(__name__)

DIGIT_CAP = 16.0
DEFAULT_ALPHAS = tuple(range(1, 101))

RUNS_HEADER = ["problem", "dim", "strategy", "line_search", "call_index", "f_value", "stop_reason"]
TABLE_HEADER = ["n_s", "n_n1", "n_n2", "line_search", "imp"]
PROFILE_HEADER = ["strategy", "line_search", "tau", "alpha", "fraction"]


def ls_code(flag):
    return "on" if flag else "off"


def parse_ls(text):
    t = str(text).strip().lower()
    if t in ("on", "true", "1", "yes"):
        return True
    if t in ("off", "false", "0", "no"):
        return False
    raise ValueError(f"bad line_search value {text!r}")


@dataclass(eq=False)
class RunRecord:
    problem: str
    dim: int
    strategy: Strategy
    line_search: bool
    stop_reason: str
    f_values: np.ndarray  # raw evaluations in call order
    f0: float
    fbest: float
    centre_values: tuple = ()  # f at the prox-centre per iteration; not written to CSV

    @property
    def calls(self):
        return len(self.f_values)

    @property
    def best_f(self):
        return float(np.min(self.f_values))

    @property
    def key(self):
        return (self.problem, self.dim)

    def same_as(self, other):
        return (
            self.key == other.key
            and self.strategy == other.strategy
            and self.line_search == other.line_search
            and self.stop_reason == other.stop_reason
            and np.array_equal(self.f_values, other.f_values)
        )


@dataclass
class ImprovementRow:
    strategy: Strategy
    line_search: bool
    imp: float
    per_problem: dict = field(default_factory=dict)


@dataclass
class DataProfile:
    tau: float
    alphas: tuple
    fractions: np.ndarray

    @property
    def curve(self):
        return dict(zip(self.alphas, self.fractions.tolist()))


def improvement_digits(f, f0, fbest):
    """New digits of accuracy, ``min(-log10(|f - fbest| / |f0 - fbest|), 16)``."""
    if f0 == fbest:
        raise DegenerateProblem("start value equals the best known value")
    gap = abs(f - fbest)
    if gap == 0:
        return DIGIT_CAP
    return min(-math.log10(gap / abs(f0 - fbest)), DIGIT_CAP)


def run_seed(seed, problem, dim, strategy):
    """Per-run seed depending only on the grid seed and the run's identity."""
    words = [int(seed) & 0xFFFFFFFF, zlib.crc32(slug(problem).encode()), int(dim), zlib.crc32(str(strategy).encode())]
    return int(np.random.SeedSequence(words).generate_state(1, dtype=np.uint64)[0] >> 2)


def run_single(problem_name, dim, strategy, line_search, config=None, geometry=None, seed=0):
    problem = get_problem(problem_name, dim)
    strategy = strategy if isinstance(strategy, Strategy) else Strategy.parse(strategy)
    base = config or SolverConfig()
    cfg = replace(base, line_search=bool(line_search))
    res = solve(problem, strategy, cfg, geometry or DEFAULT_CONFIG, seed=run_seed(seed, problem.name, dim, strategy))
    return RunRecord(
        slug(problem.name),
        dim,
        strategy,
        bool(line_search),
        res.stop_reason.value,
        np.array([t[2] for t in res.trace]),
        problem.f0,
        problem.fbest,
        tuple(res.centre_values),
    )


def _run_job(job):
    return run_single(*job)


def _ls_flags(line_search):
    if line_search in ("both", None):
        return (False, True)
    if isinstance(line_search, str):
        return (parse_ls(line_search),)
    if isinstance(line_search, bool):
        return (line_search,)
    return tuple(bool(v) for v in line_search)


def run_benchmark(problems, strategies, config=None, line_search="both", seed=0, workers=1, geometry=None):
    """One record per (problem, strategy, line-search flag), in grid order.

    ``problems`` holds :class:`Problem` objects or ``(name, dim)`` pairs.
    Results do not depend on ``workers``.
    """
    keys = [(p.name, p.dim) if hasattr(p, "dim") else (p[0], int(p[1])) for p in problems]
    strategies = [s if isinstance(s, Strategy) else Strategy.parse(s) for s in strategies]
    if not keys or not strategies:
        raise ValueError("need at least one problem and one strategy")
    jobs = [
        (name, dim, strat, ls, config, geometry, seed)
        for name, dim in keys
        for strat in strategies
        for ls in _ls_flags(line_search)
    ]
    if workers <= 1:
        return [_run_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_job, jobs, chunksize=max(1, len(jobs) // (8 * workers))))


def _nondegenerate(records):
    keep = []
    for rec in records:
        if rec.f0 == rec.fbest:
            log.warning("excluding %s (dim %d): start point already optimal", rec.problem, rec.dim)
            continue
        keep.append(rec)
    return keep


def group_records(records):
    groups = {}
    for rec in records:
        groups.setdefault((rec.strategy, rec.line_search), []).append(rec)
    return groups


def aggregate_table(records):
    """Summed capped digits per (strategy, line-search flag), best first."""
    groups = group_records(_nondegenerate(records))
    problem_sets = {k: sorted(r.key for r in recs) for k, recs in groups.items()}
    reference = None
    for k, keys in problem_sets.items():
        if len(set(keys)) != len(keys):
            raise IncompleteGrid(f"strategy {k[0]} ({ls_code(k[1])}) has repeated problems")
        if reference is None:
            reference = keys
        elif keys != reference:
            raise IncompleteGrid(f"strategy {k[0]} ({ls_code(k[1])}) covers a different problem set")
    rows = []
    for (strat, ls), recs in groups.items():
        per = {r.key: improvement_digits(r.best_f, r.f0, r.fbest) for r in sorted(recs, key=lambda r: r.key)}
        rows.append(ImprovementRow(strat, ls, math.fsum(per.values()), per))
    rows.sort(key=lambda row: (-row.imp, row.strategy, row.line_search))
    return rows


def solved_at(rec, tau):
    """First call index whose running minimum passes the relative-decrease test."""
    target = rec.fbest + tau * (rec.f0 - rec.fbest)
    hits = np.flatnonzero(np.minimum.accumulate(rec.f_values) <= target)
    return int(hits[0]) + 1 if hits.size else None


def data_profile(records, tau, alphas=DEFAULT_ALPHAS):
    """Fraction of problems solved within ``alpha * (n + 1)`` calls."""
    recs = _nondegenerate(records)
    alphas = tuple(alphas)
    if not recs:
        return DataProfile(float(tau), alphas, np.zeros(len(alphas)))
    hits = np.zeros(len(alphas))
    a = np.asarray(alphas, dtype=float)
    for rec in recs:
        c = solved_at(rec, tau)
        if c is not None:
            hits += c <= a * (rec.dim + 1)
    return DataProfile(float(tau), alphas, hits / len(recs))


def data_profiles(records, taus, strategies=None, alphas=DEFAULT_ALPHAS):
    """Profiles keyed by ``(strategy, line_search, tau)`` in a stable order."""
    groups = group_records(records)
    wanted = None if strategies is None else {s if isinstance(s, Strategy) else Strategy.parse(s) for s in strategies}
    out = {}
    for strat, ls in sorted(groups, key=lambda k: (k[0], k[1])):
        if wanted is not None and strat not in wanted:
            continue
        for tau in taus:
            out[(strat, ls, float(tau))] = data_profile(groups[(strat, ls)], tau, alphas)
    return out


# --------------------------------------------------------------------------
# CSV I/O


def _fmt(x):
    return repr(float(x))


def write_runs_csv(records, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(RUNS_HEADER)
    for rec in records:
        for i, v in enumerate(rec.f_values, start=1):
            w.writerow([rec.problem, rec.dim, str(rec.strategy), ls_code(rec.line_search), i, _fmt(v), rec.stop_reason])


def read_runs_csv(fh):
    """Inverse of :func:`write_runs_csv`; problems are looked up in the registry.

    Raises ``ValueError`` on malformed content and ``UnknownProblem`` for
    unregistered names.
    """
    reader = csv.reader(fh)
    header = next(reader, None)
    if header != RUNS_HEADER:
        raise ValueError(f"runs file header {header!r} != {RUNS_HEADER!r}")
    runs = {}
    for lineno, row in enumerate(reader, start=2):
        if len(row) != len(RUNS_HEADER):
            raise ValueError(f"line {lineno}: expected {len(RUNS_HEADER)} fields, got {len(row)}")
        problem, dim, strat, ls, idx, val, stop = row
        key = (problem, int(dim), Strategy.parse(strat), parse_ls(ls))
        entry = runs.setdefault(key, {"values": [], "stop": stop})
        if int(idx) != len(entry["values"]) + 1:
            raise ValueError(f"line {lineno}: call_index {idx} out of sequence")
        entry["values"].append(float(val))
    records = []
    for (problem, dim, strat, ls), entry in runs.items():
        p = get_problem(problem, dim)
        records.append(RunRecord(problem, dim, strat, ls, entry["stop"], np.array(entry["values"]), p.f0, p.fbest))
    return records


def write_table_csv(rows, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(TABLE_HEADER)
    for row in rows:
        s = row.strategy
        w.writerow([s.n_s.code, s.n_n1.code, s.n_n2.code, ls_code(row.line_search), f"{row.imp:.10f}"])


def write_profile_csv(profiles, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(PROFILE_HEADER)
    for (strat, ls, tau), prof in profiles.items():
        for a, frac in zip(prof.alphas, prof.fractions):
            w.writerow([str(strat), ls_code(ls), _fmt(tau), a, f"{frac:.10f}"])
