"""Command-line front end: ``gen``, ``solve`` and ``bench`` subcommands."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass

import numpy as np

from .bnb import SolverConfig, solve
from .datagen import SETUPS, GenSpec, generate
from .io import read_instance, write_instance

BENCH_COLUMNS = ["setup", "m", "n", "k", "seed", "method", "nodes", "time_seconds", "failed", "objective"]
METHODS = {"bnb": False, "bnb_scr": True}
AGGREGATE_SEED = "mean"


@dataclass
class BenchRecord:
    setup: str
    m: int
    n: int
    k: int
    seed: object
    method: str
    nodes: float
    time_seconds: float
    failed: int
    objective: float


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _k_list(text):
    try:
        ks = [int(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}") from None
    if not ks:
        raise argparse.ArgumentTypeError("empty k list")
    return ks


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="l0screen",
        description="Exact l0-penalized least squares by branch-and-bound with node screening.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate one synthetic instance file")
    gen.add_argument("--setup", choices=SETUPS, required=True)
    gen.add_argument("--m", type=int, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--k", type=int, required=True)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", required=True)
    gen.add_argument("--sinc-width", type=_positive_float, default=None,
                     help="toeplitz only: sinc width in samples (default m/50)")

    sol = sub.add_parser("solve", help="solve an instance file")
    sol.add_argument("--instance", required=True)
    sol.add_argument("--screening", choices=("on", "off"), default="on")
    sol.add_argument("--time-limit", type=_positive_float, default=1000.0)
    sol.add_argument("--tol", type=_positive_float, default=1e-6,
                     help="absolute optimality tolerance on the objective")
    sol.add_argument("--exploration", choices=("depth_first", "best_bound"), default="depth_first")
    sol.add_argument("--trace", action="store_true", help="log one line per node to stderr")

    bench = sub.add_parser("bench", help="run both methods over seeded trials, write CSV")
    bench.add_argument("--setup", choices=SETUPS, required=True)
    bench.add_argument("--m", type=int, required=True)
    bench.add_argument("--n", type=int, required=True)
    bench.add_argument("--k", type=_k_list, required=True, help="comma-separated sparsity levels")
    bench.add_argument("--trials", type=int, required=True)
    bench.add_argument("--seed0", type=int, default=0)
    bench.add_argument("--time-limit", type=_positive_float, default=1000.0)
    bench.add_argument("--out", required=True)
    bench.add_argument("--jobs", type=int, default=1,
                       help="parallel trials (each solve stays single-threaded)")
    return parser


def cmd_gen(args) -> int:
    try:
        spec = GenSpec(args.setup, args.m, args.n, args.k, args.seed, args.sinc_width)
        generated = generate(spec)
        write_instance(args.out, generated)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    inst = generated.instance
    print(f"lambda={inst.lam!r}")
    print(f"M={inst.big_m!r}")
    print(f"sigma={generated.sigma!r}")
    return 0


def cmd_solve(args) -> int:
    try:
        instance, _ = read_instance(args.instance)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    handler = None
    pkg_logger = logging.getLogger("l0screen")
    if args.trace:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(message)s"))
        pkg_logger.addHandler(handler)
        pkg_logger.setLevel(logging.INFO)
    config = SolverConfig(
        exploration=args.exploration,
        screening_enabled=args.screening == "on",
        time_limit_seconds=args.time_limit,
        gap_tolerance=args.tol,
        trace=args.trace,
    )
    try:
        solution, stats = solve(instance, config)
    finally:
        if handler is not None:
            pkg_logger.removeHandler(handler)
    support = np.flatnonzero(np.abs(solution.x) > 1e-10)
    print(f"objective={solution.objective!r}")
    print(f"optimal={str(solution.optimal).lower()}")
    print(f"nodes_processed={stats.nodes_processed}")
    print(f"wall_time_seconds={stats.wall_time_seconds:.6f}")
    print(f"nodes_screened_out={stats.nodes_screened_out}")
    print(f"variables_fixed_by_screening={stats.variables_fixed_by_screening}")
    print(f"support={' '.join(str(i) for i in support)}")
    return 0 if solution.optimal else 2


def _run_trial(setup, m, n, k, seed, time_limit):
    generated = generate(GenSpec(setup, m, n, k, seed))
    records = []
    for method, screening in METHODS.items():
        config = SolverConfig(screening_enabled=screening, time_limit_seconds=time_limit)
        start = time.perf_counter()
        try:
            solution, stats = solve(generated.instance, config)
        except Exception as exc:  # recorded as a failure; the run goes on
            logging.getLogger(__name__).warning("seed %d %s failed: %s", seed, method, exc)
            records.append(BenchRecord(setup, m, n, k, seed, method, 0, time.perf_counter() - start, 1, float("nan")))
            continue
        elapsed = time.perf_counter() - start
        failed = not solution.optimal
        if failed:
            elapsed = max(elapsed, time_limit)
        records.append(
            BenchRecord(setup, m, n, k, seed, method, stats.nodes_processed, elapsed, int(failed), solution.objective)
        )
    return records


def aggregate(records: list[BenchRecord]) -> list[BenchRecord]:
    """One row per ``(k, method)``: mean nodes, mean time and failure count."""
    out = []
    keys = []
    for r in records:
        if (r.k, r.method) not in keys:
            keys.append((r.k, r.method))
    for k, method in keys:
        group = [r for r in records if r.k == k and r.method == method]
        first = group[0]
        out.append(
            BenchRecord(
                first.setup, first.m, first.n, k, AGGREGATE_SEED, method,
                float(np.mean([r.nodes for r in group])),
                float(np.mean([r.time_seconds for r in group])),
                int(sum(r.failed for r in group)),
                float("nan"),
            )
        )
    return out


def write_bench_csv(path, records, aggregates):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(BENCH_COLUMNS)
        for r in list(records) + list(aggregates):
            row = list(astuple(r))
            obj = row[-1]
            row[-1] = "" if obj != obj else repr(float(obj))
            writer.writerow(row)


def run_bench(setup, m, n, ks, trials, seed0, time_limit, jobs=1):
    tasks = [(setup, m, n, k, seed0 + trial, time_limit) for k in ks for trial in range(trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_trial, *zip(*tasks)))
    else:
        chunks = [_run_trial(*task) for task in tasks]
    records = [r for chunk in chunks for r in chunk]
    return records, aggregate(records)


def cmd_bench(args) -> int:
    if args.trials < 1:
        print("error: --trials must be >= 1", file=sys.stderr)
        return 1
    try:
        for k in args.k:
            GenSpec(args.setup, args.m, args.n, k, args.seed0)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    records, aggregates = run_bench(
        args.setup, args.m, args.n, args.k, args.trials, args.seed0, args.time_limit, args.jobs
    )
    write_bench_csv(args.out, records, aggregates)
    for row in aggregates:
        print(
            f"k={row.k} method={row.method} mean_nodes={row.nodes:.1f} "
            f"mean_time={row.time_seconds:.3f}s failed={row.failed}"
        )
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"gen": cmd_gen, "solve": cmd_solve, "bench": cmd_bench}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
