"""Experiment execution: single runs, sweeps, exports, paper reproduction.

Summaries are written as JSON with a fixed key order and shortest
round-trip float formatting, so identical configs produce byte-identical
files (wall time is reported on stderr, never serialized).
"""

from __future__ import annotations

import json
import sys
import time
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .config import ExperimentConfig
from .dynamics import (
    ModelParams,
    OpinionProfile,
    Trajectory,
    TrajectoryStatus,
    iterate,
    make_profile,
)
from .errors import ClassificationGap
from .fixedpoints import (
    FixedPointClass,
    FixedPointKind,
    classify_fixed_point,
    separation_certificate,
    basin_certificate,
)

# Reference block profile of the election-flip experiment: N = 100, h = 0.1,
# five opinion blocks, run at eps = 0.45 (high interaction) and eps = 0.05
# (low interaction).  The source's block boundaries mix 0- and 1-based
# conventions; these sizes follow the stated half-open ranges literally
# (20 + 28 + 12 + 30 + 10 = 100).  Under the 1-based reading the sizes would
# be 19, 28, 12, 30, 11, which shifts the final split by one agent; the
# checks below accept both outcomes.
PAPER_BLOCKS: Tuple[Tuple[float, int], ...] = (
    (-0.6, 20),
    (-0.4, 28),
    (-0.01, 12),
    (0.1, 30),
    (0.2, 10),
)
PAPER_H = 0.1
PAPER_N = 100


def paper_config(eps: float, record_all: bool = False) -> ExperimentConfig:
    return ExperimentConfig(
        h=PAPER_H, eps=eps, n=PAPER_N, blocks=PAPER_BLOCKS, record_all=record_all
    )


@dataclass(frozen=True)
class RunSummary:
    """Result record of one simulation run."""

    n: int
    h: float
    eps: float
    status: str
    step: int
    clusters: Tuple[Tuple[float, int], ...]  # (value, count), ascending value
    majority: str  # "-1", "+1", or "tie"
    classification: FixedPointClass
    certificates: Tuple[str, ...]
    final_values: Tuple[float, ...]  # original agent order
    wall_time: float  # seconds; reported, never serialized

    def to_json(self) -> str:
        doc = {
            "n": self.n,
            "h": self.h,
            "eps": self.eps,
            "status": self.status,
            "step": self.step,
            "clusters": [[v, c] for v, c in self.clusters],
            "majority": self.majority,
            "classification": {
                "kind": self.classification.kind.value,
                "minus_count": self.classification.minus_count,
                "zero_count": self.classification.zero_count,
                "plus_count": self.classification.plus_count,
            },
            "certificates": list(self.certificates),
            "final_values": list(self.final_values),
        }
        return json.dumps(doc, indent=2) + "\n"


def clusters_of(values) -> Tuple[Tuple[float, int], ...]:
    """Distinct final values with multiplicities, in ascending order."""
    vals = np.asarray(values, dtype=np.float64)
    uniq, counts = np.unique(vals, return_counts=True)
    return tuple((float(v), int(c)) for v, c in zip(uniq, counts))


def _majority(values) -> str:
    vals = np.asarray(values, dtype=np.float64)
    neg = int(np.sum(vals < 0))
    pos = int(np.sum(vals > 0))
    if neg > pos:
        return "-1"
    if pos > neg:
        return "+1"
    return "tie"


def run(config: ExperimentConfig) -> Tuple[RunSummary, Trajectory]:
    """Execute one run: iterate, classify the endpoint, attach certificates."""
    start = time.perf_counter()
    profile = make_profile(config.initial_values())
    params = ModelParams(config.h, config.eps, config.n)
    traj = iterate(
        profile,
        params,
        max_steps=config.max_steps,
        tol=config.tol,
        record_all=config.record_all,
    )
    final = traj.final
    try:
        fixed_tol = None
        if traj.status is TrajectoryStatus.TOLERANCE_CONVERGED:
            fixed_tol = max(config.tol * 1e3, 1e-9)
        classification = classify_fixed_point(final, params, fixed_tol=fixed_tol)
    except ClassificationGap:
        raise
    certs = []
    basin = basin_certificate(profile, params)
    if basin is not None:
        certs.append(f"basin(split={basin.split}, rho={basin.rho!r})")
    sep = separation_certificate(profile, params)
    if sep is not None:
        certs.append(f"separation(split={sep.split}, gap={sep.gap!r})")
    elapsed = time.perf_counter() - start
    summary = RunSummary(
        n=config.n,
        h=config.h,
        eps=config.eps,
        status=traj.status.value,
        step=traj.step,
        clusters=clusters_of(final.values),
        majority=_majority(final.values),
        classification=classification,
        certificates=tuple(certs),
        final_values=tuple(float(v) for v in final.original_order()),
        wall_time=elapsed,
    )
    return summary, traj


def sweep(config: ExperimentConfig) -> List[RunSummary]:
    """One run per sweep eps value, same initial profile; independent rows."""
    if not config.sweep_eps:
        raise ValueError("sweep requires at least one sweep_eps value")
    rows = []
    for eps in config.sweep_eps:
        row_config = ExperimentConfig(
            h=config.h,
            eps=eps,
            n=config.n,
            max_steps=config.max_steps,
            tol=config.tol,
            blocks=config.blocks,
            values=config.values,
            seed=config.seed,
            distribution=config.distribution,
            record_all=False,
        )
        summary, _ = run(row_config)
        rows.append(summary)
    return rows


def sweep_csv(rows: List[RunSummary]) -> str:
    lines = ["eps,status,step,majority,minus_cluster,plus_cluster,clusters"]
    for row in rows:
        minus = sum(c for v, c in row.clusters if v == -1.0)
        plus = sum(c for v, c in row.clusters if v == 1.0)
        desc = ";".join(f"{v!r}:{c}" for v, c in row.clusters)
        lines.append(
            f"{row.eps!r},{row.status},{row.step},{row.majority},{minus},{plus},{desc}"
        )
    return "\n".join(lines) + "\n"


def export_trajectory(traj: Trajectory, path) -> None:
    """CSV dump of a fully recorded trajectory in original agent order.

    Decimal formatting uses the shortest representation that round-trips
    to the exact stored binary value.
    """
    n = traj.initial.n
    header = "step," + ",".join(f"agent_{i + 1}" for i in range(n))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for step, state in enumerate(traj.states):
            row = state.to_float().original_order()
            fh.write(str(step) + "," + ",".join(repr(float(v)) for v in row) + "\n")


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def reproduce_paper() -> Tuple[List[CheckResult], List[RunSummary]]:
    """Run both reference experiments and check the reported outcomes.

    High interaction (eps = 0.45): clusters (-1: 47, +1: 53) up to the one-
    agent indexing ambiguity, equilibrium near step 27.  Low interaction
    (eps = 0.05): majority flips to -1 with 59 or 60 agents, near step 49.
    Step counts allow +/-2 because the source's counting convention is
    unstated.
    """
    checks: List[CheckResult] = []
    summaries: List[RunSummary] = []

    def check(name, passed, detail):
        checks.append(CheckResult(name=name, passed=bool(passed), detail=detail))

    high, _ = run(paper_config(0.45))
    summaries.append(high)
    minus = sum(c for v, c in high.clusters if v == -1.0)
    plus = sum(c for v, c in high.clusters if v == 1.0)
    check(
        "high-interaction clusters",
        abs(minus - 47) <= 1 and minus + plus == PAPER_N,
        f"got (-1: {minus}, +1: {plus}), expected (-1: 47, +1: 53) +/- 1 agent",
    )
    check(
        "high-interaction majority",
        high.majority == "+1",
        f"majority {high.majority}, expected +1",
    )
    check(
        "high-interaction step",
        high.status == "exact_fixed_point" and abs(high.step - 27) <= 2,
        f"status {high.status} at step {high.step}, expected exact at 27 +/- 2",
    )
    check(
        "high-interaction runtime",
        high.wall_time < 1.0,
        f"{high.wall_time:.3f}s, expected < 1s",
    )

    low, _ = run(paper_config(0.05))
    summaries.append(low)
    minus = sum(c for v, c in low.clusters if v == -1.0)
    plus = sum(c for v, c in low.clusters if v == 1.0)
    check(
        "low-interaction clusters",
        minus in (59, 60) and minus + plus == PAPER_N,
        f"got (-1: {minus}, +1: {plus}), expected (-1: 59 or 60)",
    )
    check(
        "low-interaction majority flip",
        low.majority == "-1",
        f"majority {low.majority}, expected -1",
    )
    check(
        "low-interaction step",
        low.status == "exact_fixed_point" and abs(low.step - 49) <= 2,
        f"status {low.status} at step {low.step}, expected exact at 49 +/- 2",
    )
    check(
        "low-interaction runtime",
        low.wall_time < 1.0,
        f"{low.wall_time:.3f}s, expected < 1s",
    )
    return checks, summaries
