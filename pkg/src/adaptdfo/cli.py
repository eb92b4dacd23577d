"""Command-line front end.

    adaptdfo list     [--group low|high|all]
    adaptdfo solve    --problem NAME --dim N --strategy lin/2n/quad [...]
    adaptdfo bench    [--group G] [--strategies all|LIST] [--line-search both|on|off] [--workers W]
    adaptdfo table    --input runs.csv
    adaptdfo profile  --input runs.csv [--tau 1e-3,1e-6] [--strategies LIST] [--svg]

Exit codes: 0 success, 2 usage error, 3 unknown problem, 4 malformed input.
"""
import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import bench
from .dfpp import SolverConfig, solve
from .errors import DegenerateProblem, IncompleteGrid, UnknownProblem
from .problems import get_problem, list_problems, registry_csv, slug
from .strategy import PROFILE_STRATEGIES, Strategy, enumerate_strategies

EXIT_USAGE = 2
EXIT_UNKNOWN = 3
EXIT_BAD_INPUT = 4


class UsageError(Exception):
    pass


def _strategy_arg(text):
    try:
        return Strategy.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _strategy_list(text, default=None):
    if text is None:
        return list(default)
    if text.strip().lower() == "all":
        return enumerate_strategies()
    if text.strip().lower() == "profile":
        return list(PROFILE_STRATEGIES)
    try:
        return [Strategy.parse(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _float_list(text):
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals or any(v <= 0 for v in vals):
        raise argparse.ArgumentTypeError("tolerances must be positive")
    return vals


def _solver_args(p):
    p.add_argument("--budget-factor", type=int, default=100)
    p.add_argument("--m", type=float, default=0.1)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--r0", type=float, default=1.0)
    p.add_argument("--delta0", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")


def _solver_config(args, line_search):
    try:
        return SolverConfig(
            r0=args.r0,
            m=args.m,
            gamma=args.gamma,
            budget_factor=args.budget_factor,
            delta0=args.delta0,
            line_search=line_search,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def build_parser():
    parser = argparse.ArgumentParser(prog="adaptdfo", description="Adaptive-sample-size derivative-free proximal point solver")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", help="print the problem registry as CSV")
    p.add_argument("--group", choices=["low", "high", "all"], default="all")

    p = sub.add_parser("solve", help="run one problem with one strategy")
    p.add_argument("--problem", required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--strategy", type=_strategy_arg, required=True)
    p.add_argument("--line-search", action="store_true")
    _solver_args(p)

    p = sub.add_parser("bench", help="run a strategy x problem grid")
    p.add_argument("--group", choices=["low", "high", "all"], default="all")
    p.add_argument("--problems", default=None, help="comma-separated NAME:DIM list (overrides --group)")
    p.add_argument("--strategies", default="all", help="'all', 'profile' or comma-separated list")
    p.add_argument("--line-search", choices=["both", "on", "off"], default="both")
    p.add_argument("--workers", type=int, default=1)
    _solver_args(p)

    p = sub.add_parser("table", help="improvement table from runs.csv")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--out", type=Path, default=Path("."))

    p = sub.add_parser("profile", help="data profiles from runs.csv")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--tau", type=_float_list, default=[1e-3, 1e-6])
    p.add_argument("--strategies", default=None, help="comma-separated list (default: the four profile strategies)")
    p.add_argument("--svg", action="store_true")
    p.add_argument("--out", type=Path, default=Path("."))
    return parser


def _write(path, writer, payload):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer(payload, fh)


def cmd_list(args):
    sys.stdout.write(registry_csv(args.group))
    return 0


def cmd_solve(args):
    problem = get_problem(args.problem, args.dim)
    cfg = _solver_config(args, args.line_search)
    res = solve(problem, args.strategy, cfg, seed=bench.run_seed(args.seed, problem.name, problem.dim, args.strategy))
    rec = bench.RunRecord(
        slug(problem.name),
        problem.dim,
        args.strategy,
        args.line_search,
        res.stop_reason.value,
        np.array([t[2] for t in res.trace]),
        problem.f0,
        problem.fbest,
    )
    _write(args.out / "runs.csv", bench.write_runs_csv, [rec])
    try:
        digits = f"{bench.improvement_digits(rec.best_f, rec.f0, rec.fbest):.4f}"
    except DegenerateProblem:
        digits = "n/a"
    print(f"problem      {problem.name} (n={problem.dim})")
    print(f"strategy     {args.strategy}  line search {bench.ls_code(args.line_search)}")
    print(f"f0           {rec.f0:.10g}")
    print(f"final f      {res.final_f:.10g}")
    print(f"best f       {rec.best_f:.10g}")
    print(f"imp digits   {digits}")
    print(f"stop reason  {res.stop_reason.value}")
    print(f"calls        {res.calls}")
    return 0


def _problem_keys(args):
    if args.problems:
        keys = []
        for item in args.problems.split(","):
            name, _, dim = item.rpartition(":")
            if not name or not dim.isdigit():
                raise UsageError(f"--problems entries must look like NAME:DIM, got {item!r}")
            keys.append(get_problem(name, int(dim)))
        return keys
    return list_problems(args.group)


def cmd_bench(args):
    problems = _problem_keys(args)
    strategies = _strategy_list(args.strategies)
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")
    cfg = _solver_config(args, False)
    records = bench.run_benchmark(problems, strategies, cfg, args.line_search, args.seed, args.workers)
    _write(args.out / "runs.csv", bench.write_runs_csv, records)
    rows = bench.aggregate_table(records)
    _write(args.out / "table.csv", bench.write_table_csv, rows)
    print(f"{len(records)} runs over {len(problems)} problems; best: {rows[0].strategy} ({bench.ls_code(rows[0].line_search)}) imp={rows[0].imp:.2f}")
    return 0


def _read_runs(path):
    try:
        with open(path, newline="") as fh:
            return bench.read_runs_csv(fh)
    except (OSError, ValueError) as exc:
        raise _BadInput(str(exc)) from None


class _BadInput(Exception):
    pass


def cmd_table(args):
    records = _read_runs(args.input)
    try:
        rows = bench.aggregate_table(records)
    except IncompleteGrid as exc:
        raise _BadInput(str(exc)) from None
    _write(args.out / "table.csv", bench.write_table_csv, rows)
    return 0


def cmd_profile(args):
    records = _read_runs(args.input)
    strategies = _strategy_list(args.strategies, PROFILE_STRATEGIES)
    profiles = bench.data_profiles(records, args.tau, strategies)
    _write(args.out / "profile.csv", bench.write_profile_csv, profiles)
    if args.svg:
        for tau in args.tau:
            curves = {(s, ls): p for (s, ls, t), p in profiles.items() if t == float(tau)}
            svg = render_profile_svg(curves, tau)
            (args.out / f"profile_{tau:g}.svg").write_text(svg)
    return 0


_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"]


def render_profile_svg(curves, tau, width=640, height=420):
    """Line chart of data-profile curves, alpha on x, fraction solved on y."""
    left, right, top, bottom = 60, 190, 30, 50
    pw, ph = width - left - right, height - top - bottom

    def px(a):
        return left + pw * a / 100.0

    def py(frac):
        return top + ph * (1.0 - frac)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">',
        f'<text x="{left + pw / 2:.1f}" y="18" text-anchor="middle" font-size="13">data profile, tau = {tau:g}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>',
    ]
    for a in range(0, 101, 20):
        out.append(f'<line x1="{px(a):.1f}" y1="{top + ph}" x2="{px(a):.1f}" y2="{top + ph + 4}" stroke="#000"/>')
        out.append(f'<text x="{px(a):.1f}" y="{top + ph + 16}" text-anchor="middle">{a}</text>')
    for i in range(0, 11, 2):
        frac = i / 10
        out.append(f'<line x1="{left - 4}" y1="{py(frac):.1f}" x2="{left}" y2="{py(frac):.1f}" stroke="#000"/>')
        out.append(f'<text x="{left - 7}" y="{py(frac) + 4:.1f}" text-anchor="end">{frac:.1f}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 12}" text-anchor="middle">alpha (simplex gradients)</text>')
    out.append(
        f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" transform="rotate(-90 16 {top + ph / 2:.1f})">fraction solved</text>'
    )
    for k, ((strat, ls), prof) in enumerate(curves.items()):
        color = _PALETTE[k % len(_PALETTE)]
        dash = "" if ls else ' stroke-dasharray="5,3"'
        pts = [(0.0, 0.0)] + list(zip(prof.alphas, prof.fractions))
        # step function: a curve is constant between grid points
        path = []
        prev = 0.0
        for a, frac in pts:
            path.append(f"{px(a):.1f},{py(prev):.1f}")
            path.append(f"{px(a):.1f},{py(frac):.1f}")
            prev = frac
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{" ".join(path)}"/>')
        ly = top + 14 + 16 * k
        lx = left + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" stroke="{color}" stroke-width="1.5"{dash}/>')
        out.append(f'<text x="{lx + 28}" y="{ly}">{strat} {bench.ls_code(ls)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


_COMMANDS = {"list": cmd_list, "solve": cmd_solve, "bench": cmd_bench, "table": cmd_table, "profile": cmd_profile}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"adaptdfo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnknownProblem as exc:
        print(f"adaptdfo: {exc.args[0]}", file=sys.stderr)
        return EXIT_UNKNOWN
    except _BadInput as exc:
        print(f"adaptdfo: bad input: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
