"""Command-line interface.

Commands:

    simulate <config>        run once, write summary (and optional extras)
    sweep <config>           one run per sweep_eps value, CSV table
    classify <config>        classify the initial profile as-is
    spectrum <config>        stabilize, then report spectral facts
    reproduce-paper          run both reference experiments and check them

Exit codes: 0 success, 1 validation failure, 2 runtime failure,
3 acceptance-check failure (reproduce-paper only).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import harness
from .config import parse_config
from .dynamics import ModelParams, iterate, make_profile
from .errors import ConfigError, VotedynError
from .fixedpoints import classify_fixed_point
from .spectral import (
    build_influence_matrix,
    predict_terminal,
    spectrum_check,
    stabilization_step,
)
from .dynamics import window_bounds

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_ACCEPTANCE = 3


def _load_config(path):
    text = Path(path).read_text(encoding="utf-8")
    return parse_config(text)


def _write(path, text):
    Path(path).write_text(text, encoding="utf-8")


def _cmd_simulate(args) -> int:
    config = _load_config(args.config)
    if args.trajectory or args.figure:
        config = dataclasses.replace(config, record_all=True)
    summary, traj = harness.run(config)
    doc = summary.to_json()
    if args.summary:
        _write(args.summary, doc)
    sys.stdout.write(doc)
    print(f"wall time: {summary.wall_time:.4f}s", file=sys.stderr)
    if args.trajectory:
        harness.export_trajectory(traj, args.trajectory)
    if args.figure:
        from .plots import trajectory_figure

        trajectory_figure(
            traj,
            args.figure,
            eps=config.eps,
            title=f"N={config.n}, h={config.h}, eps={config.eps}",
        )
    return EXIT_OK


def _cmd_sweep(args) -> int:
    config = _load_config(args.config)
    rows = harness.sweep(config)
    csv_text = harness.sweep_csv(rows)
    if args.output:
        _write(args.output, csv_text)
    sys.stdout.write(csv_text)
    if args.figure:
        from .plots import sweep_figure

        sweep_figure(rows, args.figure)
    return EXIT_OK


def _cmd_classify(args) -> int:
    config = _load_config(args.config)
    profile = make_profile(config.initial_values())
    params = ModelParams(config.h, config.eps, config.n)
    cls = classify_fixed_point(profile, params)
    doc = {
        "kind": cls.kind.value,
        "minus_count": cls.minus_count,
        "zero_count": cls.zero_count,
        "plus_count": cls.plus_count,
    }
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def _cmd_spectrum(args) -> int:
    config = _load_config(args.config)
    profile = make_profile(config.initial_values())
    params = ModelParams(config.h, config.eps, config.n)
    traj = iterate(
        profile, params, max_steps=config.max_steps, tol=config.tol, record_all=True
    )
    n2 = stabilization_step(traj, params)
    if n2 is None:
        print("trajectory record never stabilized", file=sys.stderr)
        return EXIT_RUNTIME
    state = traj.states[min(n2, len(traj.states) - 1)]
    matrix = build_influence_matrix(window_bounds(state.values, params.eps))
    report = spectrum_check(matrix, config.h)
    limit = predict_terminal(traj, params)
    doc = {
        "stabilization_step": n2,
        "eigenvalues": [float(x) for x in report.eigenvalues],
        "max_imag_residual": report.max_imag_residual,
        "in_range": report.in_range,
        "has_unit_eigenvalue": report.has_unit_eigenvalue,
        "positivity": report.positivity,
        "predicted_limit": None if limit is None else [float(x) for x in limit],
    }
    text = json.dumps(doc, indent=2) + "\n"
    if args.output:
        _write(args.output, text)
    sys.stdout.write(text)
    if args.matrix_out:
        matrix.export_text(args.matrix_out)
    if args.figure:
        from .plots import spectrum_figure

        spectrum_figure(report.eigenvalues, config.h, args.figure)
    return EXIT_OK


def _cmd_reproduce_paper(args) -> int:
    checks, summaries = harness.reproduce_paper()
    for check in checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"[{status}] {check.name}: {check.detail}")
    if args.outdir:
        outdir = Path(args.outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        names = ("high_interaction", "low_interaction")
        for name, summary in zip(names, summaries):
            _write(outdir / f"{name}.json", summary.to_json())
        config = harness.paper_config(0.45, record_all=True)
        _, traj = harness.run(config)
        harness.export_trajectory(traj, outdir / "high_interaction_trajectory.csv")
        from .plots import trajectory_figure

        trajectory_figure(traj, outdir / "high_interaction.png", eps=0.45)
        config = harness.paper_config(0.05, record_all=True)
        _, traj = harness.run(config)
        harness.export_trajectory(traj, outdir / "low_interaction_trajectory.csv")
        trajectory_figure(traj, outdir / "low_interaction.png", eps=0.05)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_ACCEPTANCE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="votedyn",
        description="Clamped bounded-confidence opinion dynamics toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one experiment")
    p.add_argument("config")
    p.add_argument("--summary", help="write the JSON summary here")
    p.add_argument("--trajectory", help="write the full trajectory CSV here")
    p.add_argument("--figure", help="render the trajectory figure here")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep", help="run once per sweep_eps value")
    p.add_argument("config")
    p.add_argument("--output", help="write the CSV table here")
    p.add_argument("--figure", help="render the sweep figure here")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("classify", help="classify the initial profile as-is")
    p.add_argument("config")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("spectrum", help="stabilize, then report spectral facts")
    p.add_argument("config")
    p.add_argument("--output", help="write the JSON report here")
    p.add_argument("--matrix-out", help="write the influence matrix as text here")
    p.add_argument("--figure", help="render the spectrum figure here")
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser(
        "reproduce-paper", help="run both reference experiments and check them"
    )
    p.add_argument("--outdir", help="write summaries, trajectories, figures here")
    p.set_defaults(func=_cmd_reproduce_paper)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except VotedynError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
