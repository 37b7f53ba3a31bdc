"""Experiment configuration: flat key = value documents.

Recognized keys:

    n          = <int>            agent count (required for random initials,
                                  otherwise checked against the initial)
    h          = <float in (0,1)> step gain
    eps        = <float in (0,1)> confidence radius
    max_steps  = <int>            iteration cap           (default 1000000)
    tol        = <float>          convergence tolerance   (default 1e-12)
    seed       = <int>            64-bit seed for random initials
    distribution = uniform        random initial family   (default uniform)
    block      = <value>,<count>  repeatable; block initial profile
    values     = v1,v2,...        explicit initial profile
    sweep_eps  = e1,e2,...        eps values for the sweep command
    record_all = true|false       keep every snapshot     (default false)

Exactly one of {values, block lines, seed} selects the initial profile.
Validation reports every problem, not just the first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .errors import ConfigError

_KNOWN_KEYS = {
    "n",
    "h",
    "eps",
    "max_steps",
    "tol",
    "seed",
    "distribution",
    "block",
    "values",
    "sweep_eps",
    "record_all",
}


@dataclass(frozen=True)
class ExperimentConfig:
    h: float
    eps: float
    n: int
    max_steps: int = 10**6
    tol: float = 1e-12
    blocks: Tuple[Tuple[float, int], ...] = ()
    values: Tuple[float, ...] = ()
    seed: Optional[int] = None
    distribution: str = "uniform"
    sweep_eps: Tuple[float, ...] = ()
    record_all: bool = False

    def initial_values(self) -> np.ndarray:
        """The initial opinion vector in original agent order."""
        if self.values:
            return np.array(self.values, dtype=np.float64)
        if self.blocks:
            return np.concatenate(
                [np.full(count, value, dtype=np.float64) for value, count in self.blocks]
            )
        rng = np.random.default_rng(self.seed)
        return rng.uniform(-1.0, 1.0, self.n)


def _parse_float(text, key, line_no, problems):
    try:
        return float(text)
    except ValueError:
        problems.append(f"line {line_no}: {key}: not a number: {text!r}")
        return None


def _parse_int(text, key, line_no, problems):
    try:
        return int(text)
    except ValueError:
        problems.append(f"line {line_no}: {key}: not an integer: {text!r}")
        return None


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a config document; raises ConfigError with the
    full list of problems on any failure."""
    problems: List[str] = []
    seen = {}
    blocks = []
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"line {line_no}: expected 'key = value', got {raw_line!r}")
            continue
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if key not in _KNOWN_KEYS:
            problems.append(f"line {line_no}: unknown key {key!r}")
            continue
        if key == "block":
            parts = [p.strip() for p in value.split(",")]
            if len(parts) != 2:
                problems.append(f"line {line_no}: block needs 'value,count'")
                continue
            bval = _parse_float(parts[0], "block value", line_no, problems)
            bcnt = _parse_int(parts[1], "block count", line_no, problems)
            if bval is not None and bcnt is not None:
                if bcnt < 1:
                    problems.append(f"line {line_no}: block count must be >= 1")
                else:
                    blocks.append((bval, bcnt))
            continue
        if key in seen:
            problems.append(f"line {line_no}: duplicate key {key!r}")
            continue
        seen[key] = (value, line_no)

    def take(key, parser, default=None):
        if key not in seen:
            return default
        value, line_no = seen.pop(key)
        return parser(value, key, line_no, problems)

    h = take("h", _parse_float)
    eps = take("eps", _parse_float)
    n = take("n", _parse_int)
    max_steps = take("max_steps", _parse_int, 10**6)
    tol = take("tol", _parse_float, 1e-12)
    seed = take("seed", _parse_int)

    distribution = "uniform"
    if "distribution" in seen:
        distribution, line_no = seen.pop("distribution")
        if distribution != "uniform":
            problems.append(
                f"line {line_no}: distribution must be 'uniform', got {distribution!r}"
            )

    record_all = False
    if "record_all" in seen:
        text_value, line_no = seen.pop("record_all")
        low = text_value.lower()
        if low in ("true", "1", "yes"):
            record_all = True
        elif low in ("false", "0", "no"):
            record_all = False
        else:
            problems.append(f"line {line_no}: record_all must be true or false")

    values: Tuple[float, ...] = ()
    if "values" in seen:
        text_value, line_no = seen.pop("values")
        parsed = []
        for piece in text_value.split(","):
            v = _parse_float(piece.strip(), "values", line_no, problems)
            if v is not None:
                parsed.append(v)
        values = tuple(parsed)

    sweep_eps: Tuple[float, ...] = ()
    if "sweep_eps" in seen:
        text_value, line_no = seen.pop("sweep_eps")
        parsed = []
        for piece in text_value.split(","):
            v = _parse_float(piece.strip(), "sweep_eps", line_no, problems)
            if v is not None:
                parsed.append(v)
        sweep_eps = tuple(parsed)

    # semantic validation
    if h is None:
        problems.append("h: required")
    elif not 0 < h < 1:
        problems.append(f"h: must be in (0,1), got {h}")
    if eps is None:
        problems.append("eps: required")
    elif not 0 < eps < 1:
        problems.append(f"eps: must be in (0,1), got {eps}")
    for e in sweep_eps:
        if not 0 < e < 1:
            problems.append(f"sweep_eps: every value must be in (0,1), got {e}")

    sources = sum((bool(values), bool(blocks), seed is not None))
    if sources == 0:
        problems.append("initial: need one of values, block lines, or seed")
    elif sources > 1:
        problems.append("initial: values, blocks, and seed are mutually exclusive")

    if values:
        inferred = len(values)
        bad = [v for v in values if not -1 <= v <= 1]
        if bad:
            problems.append(f"values: entries outside [-1,1]: {bad[:3]}")
    elif blocks:
        inferred = sum(c for _, c in blocks)
        bad = [v for v, _ in blocks if not -1 <= v <= 1]
        if bad:
            problems.append(f"block: values outside [-1,1]: {bad[:3]}")
    else:
        inferred = None

    if n is None:
        if inferred is None:
            problems.append("n: required for random initial profiles")
        else:
            n = inferred
    elif inferred is not None and n != inferred:
        problems.append(f"initial: counts sum to {inferred} but n = {n}")
    if n is not None and n < 1:
        problems.append(f"n: must be >= 1, got {n}")

    if max_steps is not None and max_steps < 1:
        problems.append(f"max_steps: must be >= 1, got {max_steps}")
    if tol is not None and not tol > 0:
        problems.append(f"tol: must be positive, got {tol}")

    if problems:
        raise ConfigError(problems)
    return ExperimentConfig(
        h=h,
        eps=eps,
        n=n,
        max_steps=max_steps,
        tol=tol,
        blocks=tuple(blocks),
        values=values,
        seed=seed,
        distribution=distribution,
        sweep_eps=sweep_eps,
        record_all=record_all,
    )


def render_config(config: ExperimentConfig) -> str:
    """Inverse of parse_config: parse(render(c)) == c for every valid c."""
    lines = [
        f"n = {config.n}",
        f"h = {config.h!r}",
        f"eps = {config.eps!r}",
        f"max_steps = {config.max_steps}",
        f"tol = {config.tol!r}",
    ]
    if config.values:
        lines.append("values = " + ",".join(repr(v) for v in config.values))
    for value, count in config.blocks:
        lines.append(f"block = {value!r},{count}")
    if config.seed is not None:
        lines.append(f"seed = {config.seed}")
        lines.append(f"distribution = {config.distribution}")
    if config.sweep_eps:
        lines.append("sweep_eps = " + ",".join(repr(v) for v in config.sweep_eps))
    lines.append(f"record_all = {'true' if config.record_all else 'false'}")
    return "\n".join(lines) + "\n"
