"""Command-line interface: run experiments, estimate optima, export tables."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from ..core import load_record
from .config import load_config
from .density import export_density_evolution, write_density_csv
from .experiment import estimate_reference_optimum, run_experiment
from .metrics import format_delta


def _apply_overrides(config, args):
    if getattr(args, "output_dir", None):
        config.output_dir = args.output_dir
    if getattr(args, "seed", None) is not None:
        config.seed = args.seed
    if getattr(args, "workers", None) is not None:
        config.workers = args.workers
    return config


def _cmd_run(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    series, _, artifacts = run_experiment(config)
    print(f"experiment {config.name}: {config.repetitions} runs x "
          f"{series.n_iterations} iterations")
    print(f"final mean_err = {series.mean_err[-1]:.6g}")
    for delta in sorted(series.p_delta, reverse=True):
        print(f"final P_{format_delta(delta)} = {series.p_delta[delta][-1]:.3f}")
    for name, path in artifacts.items():
        print(f"{name}: {path}")
    return 0


def _cmd_estimate(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    coords, value = estimate_reference_optimum(config)
    print(f"reference optimum J* = {value!r}")
    print(f"coords = {np.asarray(coords).tolist()}")
    ref_path = (config.reference or {}).get("path") or os.path.join(
        config.output_dir, "reference.json"
    )
    if os.path.exists(ref_path):
        print(f"cached: {ref_path}")
    return 0


def _cmd_density(args) -> int:
    record, domain, sofa_config = load_record(args.record)
    if sofa_config is None:
        print("record file carries no optimizer settings; cannot rebuild kernels",
              file=sys.stderr)
        return 2
    checkpoints = [int(v) for v in args.checkpoints.split(",") if v.strip()]
    rows, _ = export_density_evolution(
        record, args.coordinate, checkpoints, domain, sofa_config,
        grid_points=args.grid_points,
    )
    out = args.out or "density.csv"
    write_density_csv(rows, out)
    print(f"wrote {len(rows)} rows to {out}")
    return 0


def _cmd_report(args) -> int:
    rows = []
    for directory in args.inputs:
        summary_path = os.path.join(directory, "summary.json")
        with open(summary_path, "r", encoding="utf-8") as fh:
            summary = json.load(fh)
        row = {
            "name": summary["name"],
            "directory": directory,
            "repetitions": summary["repetitions"],
            "iterations": summary["iterations"],
            "j_star": summary["j_star"],
            "final_mean_err": summary["final_mean_err"],
            "mean_unfeasible_frac": summary["mean_unfeasible_frac"],
        }
        for key, value in sorted(summary.get("final_p_delta", {}).items()):
            row[f"final_p_{format_delta(float(key))}"] = value
        rows.append(row)
    fieldnames = []
    for row in rows:
        for key in row:
            if key not in fieldnames:
                fieldnames.append(key)
    out = args.out or "report.csv"
    with open(out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {len(rows)} experiment rows to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sofa",
        description="Survival-of-the-fittest global optimizer experiment harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a configured experiment")
    p_run.add_argument("-c", "--config", required=True, help="YAML experiment config")
    p_run.add_argument("--output-dir", help="override the config output directory")
    p_run.add_argument("--seed", type=int, help="override the master seed")
    p_run.add_argument("--workers", type=int, help="override the worker count")
    p_run.set_defaults(func=_cmd_run)

    p_est = sub.add_parser(
        "estimate-optimum", help="estimate and cache the reference optimum"
    )
    p_est.add_argument("-c", "--config", required=True)
    p_est.add_argument("--output-dir")
    p_est.add_argument("--seed", type=int)
    p_est.add_argument("--workers", type=int)
    p_est.set_defaults(func=_cmd_estimate)

    p_den = sub.add_parser(
        "density", help="export proposal-density evolution from a run record"
    )
    p_den.add_argument("--record", required=True, help="run record file")
    p_den.add_argument("--coordinate", type=int, required=True)
    p_den.add_argument("--checkpoints", required=True,
                       help="comma-separated iteration checkpoints")
    p_den.add_argument("--grid-points", type=int, default=200)
    p_den.add_argument("--out", help="output CSV path (default density.csv)")
    p_den.set_defaults(func=_cmd_density)

    p_rep = sub.add_parser("report", help="aggregate experiment summaries into a CSV")
    p_rep.add_argument("--inputs", nargs="+", required=True,
                       help="experiment output directories")
    p_rep.add_argument("--out", help="output CSV path (default report.csv)")
    p_rep.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
