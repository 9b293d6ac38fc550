"""Command line: ``fpfree run <config> [--seed N] [--out DIR] [--no-svg]`` and ``fpfree list``.

Exit codes: 0 all verdicts pass, 2 a bound is violated, 3 config error or
unknown target, 4 weight solver failure, 5 output directory not writable.
"""
from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError, catalog_rows, load_config
from .experiments import run_experiment
from .flat_construction import SolverError
from .lin_map import ConvergenceError
from .report import svg_lines, write_csv, write_manifest, write_verdicts

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_SOLVER, EXIT_OUTPUT = 0, 2, 3, 4, 5


def _prepare_out(path: Path) -> None:
    path.mkdir(parents=True, exist_ok=True)
    if not os.access(path, os.W_OK | os.X_OK):
        raise PermissionError(f"{path} is not writable")


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.out is not None:
            overrides["output_dir"] = args.out
        if overrides:
            cfg = dataclasses.replace(cfg, **overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(cfg.output_dir)
    try:
        _prepare_out(out)
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    try:
        report = run_experiment(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, ConvergenceError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        # constructors reject out-of-range parameters (e.g. alpha outside (0, 1))
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        write_csv(out / "measurements.csv", report.header, report.rows)
        write_verdicts(out / "verdicts.csv", report.verdicts)
        if report.plot and not args.no_svg:
            (out / "plot.svg").write_text(
                svg_lines(report.plot["series"], report.plot["title"], report.plot["xlabel"],
                          report.plot["ylabel"]), encoding="utf-8")
        write_manifest(out / "manifest.json", {
            "version": __version__,
            "config": cfg.to_dict(),
            "resolved_target": report.extra.get("target"),
            "resolved_params": report.extra.get("params"),
            "passed": report.passed,
            "verdicts": [dataclasses.asdict(v) for v in report.verdicts],
            "files": sorted(p.name for p in out.iterdir() if p.suffix in (".csv", ".svg")),
        })
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    for v in report.verdicts:
        print(f"{'PASS' if v.passed else 'FAIL'}  {v.check}: measured {v.measured:.6g}, bound {v.bound:.6g}")
    return EXIT_OK if report.passed else EXIT_VIOLATION


def cmd_list(args) -> int:
    for name, exps, params, doc in catalog_rows():
        print(f"{name}\n    {doc}\n    experiments: {exps}\n    params: {params}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fpfree", description="Certify fixed-point-free constructions.")
    ap.add_argument("--version", action="version", version=f"fpfree {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one experiment config")
    run.add_argument("config")
    run.add_argument("--seed", type=int, help="override the config seed")
    run.add_argument("--out", help="override the output directory")
    run.add_argument("--no-svg", action="store_true", help="skip the SVG plot")
    run.set_defaults(func=cmd_run)
    ls = sub.add_parser("list", help="list addressable targets")
    ls.set_defaults(func=cmd_list)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
