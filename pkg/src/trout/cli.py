"""Command-line interface: simulate, cluster, path and benchmark.

Exit codes: 0 on success, 1 for usage errors, 2 for data errors, 3 for
internal errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from .baselines import LINKAGES
from .benchmark import (
    METHODS,
    BenchmarkConfig,
    run_benchmark,
    run_method,
    write_results_csv,
    write_summary_csv,
)
from .fileio import (
    DataError,
    complex_matrix_to_pairs,
    read_data_csv,
    write_data_csv,
    write_json,
    write_labels_csv,
)
from .graph import knn_gaussian_weights
from .penalties import normalize_q
from .simulate import NoiseSpec, ScenarioSpec, generate_dataset
from .solver import PathConfig, SolverConfig, solve_path
from .spectral import spectral_matrix

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; route through UsageError so
    # the documented exit code (1) applies
    def error(self, message):
        raise UsageError(message)


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _nonnegative_float(text: str) -> float:
    value = float(text)
    if value < 0 or math.isnan(value):
        raise argparse.ArgumentTypeError(f"must be nonnegative: {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="trout",
                     description="Phase-adaptive spectral clustering of time series")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate a benchmark scenario dataset")
    sim.add_argument("--scenario", type=int, choices=(1, 2, 3), default=1)
    sim.add_argument("--snr", type=_positive_float, default=3.0,
                     help="signal power over noise variance; 'inf' for noiseless")
    sim.add_argument("--kappa", type=_nonnegative_float, default=10.0,
                     help="phase noise concentration; 'inf' for none")
    sim.add_argument("--n-per-cluster", type=int, default=20)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--phase-mode", choices=("common", "shift"), default="common")
    sim.add_argument("--out", default="data.csv")
    sim.add_argument("--labels", default="labels.csv")
    sim.set_defaults(func=cmd_simulate)

    clu = sub.add_parser("cluster", help="cluster a data CSV with one method")
    clu.add_argument("--input", required=True)
    clu.add_argument("--method", required=True, choices=METHODS)
    clu.add_argument("--k", required=True, type=int)
    clu.add_argument("--q", default="2", help="fusion norm: 1, 2 or inf")
    clu.add_argument("--rho", type=_positive_float, default=1.0)
    clu.add_argument("--knn", type=int, default=5)
    clu.add_argument("--linkage", choices=LINKAGES, default="average")
    clu.add_argument("--dtw-window", type=_nonnegative_float, default=0.10)
    clu.add_argument("--lambdas", type=int, default=100,
                     help="grid size for the trout path")
    clu.add_argument("--out", default="result.json")
    clu.set_defaults(func=cmd_cluster)

    pth = sub.add_parser("path", help="trace the full fusion path of a data CSV")
    pth.add_argument("--input", required=True)
    pth.add_argument("--lambdas", type=int, default=100)
    pth.add_argument("--mode", choices=("exact", "onestep"), default="exact")
    pth.add_argument("--q", default="2")
    pth.add_argument("--knn", type=int, default=5)
    pth.add_argument("--rho", type=_positive_float, default=1.0)
    pth.add_argument("--out", default="path.json")
    pth.set_defaults(func=cmd_path)

    ben = sub.add_parser("benchmark", help="run the scenario grid benchmark")
    ben.add_argument("--config", required=True, help="JSON benchmark config")
    ben.add_argument("--out", default="results.csv")
    ben.add_argument("--jobs", type=int, default=None,
                     help="worker processes (default: TROUT_JOBS or 1)")
    ben.set_defaults(func=cmd_benchmark)
    return parser


def cmd_simulate(args) -> int:
    if args.n_per_cluster < 1:
        raise UsageError("--n-per-cluster must be at least 1")
    mode = "common_offset" if args.phase_mode == "common" else "circular_shift"
    spec = ScenarioSpec(args.scenario, args.n_per_cluster)
    noise = NoiseSpec(args.snr, args.kappa, mode)
    data = generate_dataset(spec, noise, args.seed)
    write_data_csv(args.out, data.series)
    write_labels_csv(args.labels, data.labels)
    print(f"wrote {len(data.series)} observations to {args.out}, "
          f"labels to {args.labels}")
    return EXIT_OK


def cmd_cluster(args) -> int:
    series = read_data_csv(args.input)
    if not 1 <= args.k <= len(series):
        raise UsageError(f"--k must lie in [1, {len(series)}]")
    try:
        q = normalize_q(args.q)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    t0 = time.perf_counter()
    out = run_method(series, args.method, args.k, q=q, rho=args.rho,
                     knn=args.knn, linkage=args.linkage,
                     dtw_window=args.dtw_window, n_lambdas=args.lambdas)
    elapsed = time.perf_counter() - t0
    doc = {
        "method": args.method,
        "k": args.k,
        "parameters": {
            "q": str(args.q),
            "rho": args.rho,
            "knn": args.knn,
            "linkage": args.linkage,
            "dtw_window": args.dtw_window,
        },
        "assignments": [int(v) for v in out.assignments],
        "n_clusters_found": out.n_clusters,
        "wall_time_seconds": elapsed,
    }
    if args.method == "trout":
        doc["selected_lambda"] = out.selected_lambda
        doc["centroids"] = complex_matrix_to_pairs(out.centroids)
    write_json(args.out, doc)
    print(f"{args.method}: {out.n_clusters} clusters in {elapsed:.2f}s "
          f"-> {args.out}")
    return EXIT_OK


def cmd_path(args) -> int:
    series = read_data_csv(args.input)
    try:
        q = normalize_q(args.q)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.lambdas < 1:
        raise UsageError("--lambdas must be at least 1")
    X = spectral_matrix(series)
    graph = knn_gaussian_weights(X, k=min(args.knn, len(series) - 1))
    mode = "exact" if args.mode == "exact" else "one_step"
    cfg = SolverConfig(rho=args.rho, q=q, mode=mode)
    path = solve_path(X, graph, PathConfig(n_lambdas=args.lambdas), cfg)
    doc = {
        "mode": args.mode,
        "q": str(args.q),
        "lambdas": [pt.lam for pt in path.points],
        "points": [
            {
                "lambda": pt.lam,
                "n_clusters": pt.n_clusters,
                "assignments": [int(v) for v in pt.assignments],
                "objective": pt.objective,
                "iterations": pt.n_iterations,
                "wall_time_seconds": pt.wall_time_seconds,
                "converged": pt.converged,
            }
            for pt in path.points
        ],
    }
    write_json(args.out, doc)
    print(f"path with {len(path)} lambdas "
          f"({path.points[0].n_clusters} -> {path.points[-1].n_clusters} clusters) "
          f"-> {args.out}")
    return EXIT_OK


def cmd_benchmark(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read {args.config}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{args.config}: invalid JSON: {exc}") from exc
    try:
        cfg = BenchmarkConfig.from_mapping(raw)
    except (TypeError, ValueError) as exc:
        raise DataError(f"{args.config}: {exc}") from exc
    jobs = args.jobs
    if jobs is None:
        jobs = int(os.environ.get("TROUT_JOBS", "1"))
    if jobs < 1:
        raise UsageError("--jobs must be at least 1")
    records = run_benchmark(cfg, jobs=jobs)
    write_results_csv(args.out, records)
    summary_path = _summary_path(args.out)
    write_summary_csv(summary_path, records)
    n_failed = sum(1 for r in records if r.error)
    print(f"{len(records)} runs ({n_failed} failed) -> {args.out}; "
          f"summary -> {summary_path}")
    return EXIT_OK


def _summary_path(out_path: str) -> str:
    root, ext = os.path.splitext(out_path)
    return f"{root}.summary{ext or '.csv'}"


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SystemExit as exc:  # argparse -h/--help
        code = exc.code
        return int(code) if code is not None else EXIT_OK
    except Exception as exc:  # noqa: BLE001 - mapped to the documented exit code
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
