"""Compare the numba kernels with the pure-numpy fallback.

Each backend runs in its own interpreter because the choice is fixed at
import time by ADAPTDFO_DISABLE_NUMBA.  The numba timings exclude the first
(compiling) call.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, sys, time
import numpy as np
import adaptdfo
from adaptdfo.geometry import complete_well_poised_set, initial_sample_set
from adaptdfo.bench import run_single

repeat = int(sys.argv[1])
out = {"backend": adaptdfo.backend()}

def timed(fn):
    fn()  # warm-up (numba compiles here)
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best

rng = np.random.default_rng(0)
for n in (5, 10, 20):
    c = rng.standard_normal(n)
    seeds = c + 0.5 * rng.uniform(-1, 1, (3 * n, n)) / np.sqrt(n)
    hist = np.vstack([c, seeds])
    out[f"complete n={n}"] = timed(lambda: complete_well_poised_set(None, c, 1.0, seed=1))
    out[f"mean-size set n={n}"] = timed(lambda: initial_sample_set(c, 1.0, (n + 1 + (n + 1) * (n + 2) // 2) // 2, hist, seed=2))
out["solve rosenbrock n=10 quad"] = timed(lambda: run_single("rosenbrock", 10, "quad/quad/quad", False))
print(json.dumps(out))
"""


def run_backend(disable, repeat):
    env = dict(os.environ, ADAPTDFO_DISABLE_NUMBA="1" if disable else "0")
    proc = subprocess.run([sys.executable, "-c", WORKLOAD, str(repeat)], env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    fast = run_backend(False, args.repeat)
    slow = run_backend(True, args.repeat)
    if fast.pop("backend") != "numba":
        print("numba is not importable; both columns use numpy", file=sys.stderr)
    slow.pop("backend")
    width = max(len(k) for k in fast)
    print(f"{'workload':<{width}}  {'numba [ms]':>11}  {'numpy [ms]':>11}  {'speed-up':>8}")
    for key in fast:
        a, b = 1e3 * fast[key], 1e3 * slow[key]
        print(f"{key:<{width}}  {a:11.2f}  {b:11.2f}  {b / a:8.2f}")


if __name__ == "__main__":
    main()
