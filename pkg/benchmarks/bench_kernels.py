"""Compare the compiled and pure-Python kernel backends.

Times root-node relaxation solves for each backend at several sizes, and
optionally a full branch-and-bound solve per backend (each in its own
interpreter, since the backend is picked at import).

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --sizes 50x100 100x200 --repeats 5 --solve
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from l0screen import Node, RelaxationConfig, solve_relaxation
from l0screen.datagen import GenSpec, generate
from l0screen.kernels import available_backends

SOLVE_SNIPPET = """
import json, time
from l0screen import BACKEND, SolverConfig, solve
from l0screen.datagen import GenSpec, generate
inst = generate(GenSpec("gaussian", {m}, {n}, {k}, {seed})).instance
t = time.perf_counter()
sol, stats = solve(inst, SolverConfig(time_limit_seconds={limit}))
print(json.dumps({{"backend": BACKEND, "seconds": time.perf_counter() - t,
                  "nodes": stats.nodes_processed, "objective": sol.objective}}))
"""


def parse_size(text):
    m, _, n = text.partition("x")
    return int(m), int(n)


def time_relaxation(instance, backend, repeats):
    node = Node.root(instance.n)
    cfg = RelaxationConfig(max_iterations=100000)
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        res = solve_relaxation(instance, node, config=cfg, backend=backend)
        times.append(time.perf_counter() - start)
    return float(np.median(times)), res.iterations


def time_solve(backend_name, m, n, k, seed, limit):
    env = dict(os.environ)
    if backend_name == "python":
        env["L0SCREEN_PURE_PYTHON"] = "1"
    else:
        env.pop("L0SCREEN_PURE_PYTHON", None)
    code = SOLVE_SNIPPET.format(m=m, n=n, k=k, seed=seed, limit=limit)
    out = subprocess.run([sys.executable, "-c", code], env=env, check=True,
                         capture_output=True, text=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", nargs="+", type=parse_size,
                        default=[(30, 45), (100, 200), (500, 1000)])
    parser.add_argument("--k", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--solve", action="store_true", help="also time a full solve per backend")
    parser.add_argument("--solve-size", type=parse_size, default=(30, 45))
    parser.add_argument("--time-limit", type=float, default=120.0)
    args = parser.parse_args(argv)

    backends = available_backends()
    print(f"backends: {', '.join(backends)}")
    print(f"{'size':>10} {'backend':>8} {'iters':>7} {'median s':>10} {'us/iter':>9}")
    base = {}
    for m, n in args.sizes:
        inst = generate(GenSpec("gaussian", m, n, args.k, args.seed)).instance
        for name, mod in backends.items():
            secs, iters = time_relaxation(inst, mod, args.repeats)
            base.setdefault((m, n), secs)
            speed = base[(m, n)] / secs
            print(f"{m:>4}x{n:<5} {name:>8} {iters:>7} {secs:>10.4f} {1e6 * secs / max(iters, 1):>9.1f}"
                  f"  ({speed:.2f}x vs {next(iter(backends))})")

    if args.solve:
        m, n = args.solve_size
        print(f"\nfull solve, gaussian {m}x{n}, k={args.k}, seed={args.seed}")
        for name in backends:
            r = time_solve(name, m, n, args.k, args.seed, args.time_limit)
            print(f"{r['backend']:>8}: {r['seconds']:.2f} s, {r['nodes']} nodes, objective {r['objective']:.12g}")


if __name__ == "__main__":
    main()
