"""Core opinion dynamics: state space, influence structure, and the update map.

The state is a vector of N opinions in [-1, 1], kept in nondecreasing
(canonical) order together with the permutation that recovers the original
agent numbering.  One synchronous update adds to each opinion h times the
average opinion over its confidence window (all agents within eps of it,
itself included) and clamps the result to [-1, 1].

Two numeric backends share every operation: the default 64-bit float backend
(numpy arrays) and an exact-rational backend (tuples of Fraction) used for
small-N verification where exact cancellation matters.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np
from numba import njit

from .errors import (
    EmptyProfile,
    EntryOutOfRange,
    IncrementOrderViolation,
    LengthMismatch,
)

Values = Union[np.ndarray, tuple]


def _is_exact(values) -> bool:
    return not isinstance(values, np.ndarray)


@dataclass(frozen=True)
class ModelParams:
    """Step gain h and confidence radius eps, both in the open interval (0,1)."""

    h: Union[float, Fraction]
    eps: Union[float, Fraction]
    n: int

    def __post_init__(self):
        if not (0 < self.h < 1):
            raise ValueError(f"h must be in (0,1), got {self.h!r}")
        if not (0 < self.eps < 1):
            raise ValueError(f"eps must be in (0,1), got {self.eps!r}")
        if self.n < 1:
            raise ValueError(f"agent count must be >= 1, got {self.n!r}")

    def with_eps(self, eps) -> "ModelParams":
        return ModelParams(self.h, eps, self.n)

    def to_exact(self) -> "ModelParams":
        return ModelParams(Fraction(self.h), Fraction(self.eps), self.n)


@dataclass(frozen=True)
class OpinionProfile:
    """Canonically sorted opinion vector plus the original agent numbering.

    ``agent_perm[k]`` is the original index of the agent sitting at canonical
    slot ``k``.  Float profiles store values as a read-only float64 array;
    exact profiles store a tuple of Fractions.
    """

    values: Values
    agent_perm: tuple

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def is_exact(self) -> bool:
        return _is_exact(self.values)

    def with_values(self, values) -> "OpinionProfile":
        if isinstance(values, np.ndarray):
            values = values.copy()
            values.setflags(write=False)
        return OpinionProfile(values, self.agent_perm)

    def original_order(self):
        """Values in the caller's original agent numbering."""
        if self.is_exact:
            out = [None] * self.n
            for k, orig in enumerate(self.agent_perm):
                out[orig] = self.values[k]
            return tuple(out)
        out = np.empty_like(self.values)
        out[np.asarray(self.agent_perm)] = self.values
        return out

    def to_exact(self) -> "OpinionProfile":
        if self.is_exact:
            return self
        return OpinionProfile(tuple(Fraction(v) for v in self.values), self.agent_perm)

    def to_float(self) -> "OpinionProfile":
        if not self.is_exact:
            return self
        arr = np.array([float(v) for v in self.values], dtype=np.float64)
        arr.setflags(write=False)
        return OpinionProfile(arr, self.agent_perm)


@dataclass(frozen=True)
class InfluenceWindow:
    """Contiguous index range [lo, hi] of agents within eps of agent k.

    Indices are 0-based canonical positions; k always lies inside its own
    window (self-influence).
    """

    k: int
    lo: int
    hi: int

    @property
    def cardinality(self) -> int:
        return self.hi - self.lo + 1

    @property
    def mu(self) -> int:
        return self.k - self.lo

    @property
    def nu(self) -> int:
        return self.hi - self.k


class TrajectoryStatus(Enum):
    EXACT_FIXED_POINT = "exact_fixed_point"
    TOLERANCE_CONVERGED = "tolerance_converged"
    MAX_STEPS_EXCEEDED = "max_steps_exceeded"


@dataclass
class Trajectory:
    """Iteration record: snapshots, termination status, and the step index.

    With ``record_all`` off, only the initial and final snapshots are kept.
    ``step`` is the first n with Phi(V^n) = V^n for exact termination, the
    first n with rho(V^{n+1}, V^n) < tol for tolerance termination, and the
    number of applied steps otherwise.
    """

    states: list
    status: TrajectoryStatus
    step: int
    increments_log: Optional[list] = field(default=None)

    @property
    def initial(self) -> OpinionProfile:
        return self.states[0]

    @property
    def final(self) -> OpinionProfile:
        return self.states[-1]


def make_profile(raw: Sequence, exact: bool = False) -> OpinionProfile:
    """Canonicalize a raw opinion vector: stable-sort and remember the order.

    Raises EntryOutOfRange on any |value| > 1 and EmptyProfile on zero agents.
    """
    if exact or (len(raw) > 0 and isinstance(raw[0], Fraction)):
        vals = [Fraction(v) for v in raw]
        if not vals:
            raise EmptyProfile("profile must contain at least one agent")
        for i, v in enumerate(vals):
            if not (-1 <= v <= 1):
                raise EntryOutOfRange(i, v)
        order = sorted(range(len(vals)), key=lambda i: vals[i])
        return OpinionProfile(tuple(vals[i] for i in order), tuple(order))

    arr = np.asarray(raw, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError("raw opinions must be one-dimensional")
    if arr.size == 0:
        raise EmptyProfile("profile must contain at least one agent")
    bad = np.nonzero(~((arr >= -1.0) & (arr <= 1.0)))[0]
    if bad.size:
        i = int(bad[0])
        raise EntryOutOfRange(i, float(arr[i]))
    order = np.argsort(arr, kind="stable")
    values = arr[order]
    values.setflags(write=False)
    return OpinionProfile(values, tuple(int(i) for i in order))


@njit(cache=True)
def _window_bounds_f64(values, eps):  # pragma: no cover - exercised via wrapper
    n = values.shape[0]
    lo = np.empty(n, np.int64)
    hi = np.empty(n, np.int64)
    lo_p = 0
    hi_p = 0
    for k in range(n):
        while values[k] - values[lo_p] > eps:
            lo_p += 1
        if hi_p < k:
            hi_p = k
        while hi_p + 1 < n and values[hi_p + 1] - values[k] <= eps:
            hi_p += 1
        lo[k] = lo_p
        hi[k] = hi_p
    return lo, hi


def _window_bounds_exact(values, eps):
    n = len(values)
    lo = [0] * n
    hi = [0] * n
    lo_p = 0
    hi_p = 0
    for k in range(n):
        while values[k] - values[lo_p] > eps:
            lo_p += 1
        if hi_p < k:
            hi_p = k
        while hi_p + 1 < n and values[hi_p + 1] - values[k] <= eps:
            hi_p += 1
        lo[k] = lo_p
        hi[k] = hi_p
    return lo, hi


def window_bounds(values: Values, eps):
    """Two-pointer sweep over a sorted vector: per-index window [lo, hi].

    O(N) total; the comparison |v_l - v_k| <= eps is taken exactly on the
    stored values (the sweep compares the one-rounding difference, which for
    sorted input is the same predicate).
    """
    if _is_exact(values):
        return _window_bounds_exact(values, eps)
    return _window_bounds_f64(values, float(eps))


def influence_windows(profile: OpinionProfile, eps) -> list:
    """Per-agent influence windows of a canonical profile, as dataclasses."""
    lo, hi = window_bounds(profile.values, eps)
    return [InfluenceWindow(k, int(lo[k]), int(hi[k])) for k in range(profile.n)]


def prefix_sums(values: Values):
    """Prefix-sum array p with p[0] = 0 and p[i] = sum(values[:i])."""
    if _is_exact(values):
        return [Fraction(0)] + list(itertools.accumulate(values))
    return np.concatenate(([0.0], np.cumsum(values)))


def slice_average(psum, lo: int, hi: int):
    """Average of values[lo..hi] (inclusive) from a prefix-sum array."""
    return (psum[hi + 1] - psum[lo]) / (hi - lo + 1)


def increments(profile: OpinionProfile, params: ModelParams):
    """Per-agent update summand: (h / |window|) * sum of window values.

    The result is nondecreasing for sorted input; this is re-checked after
    computation and raises IncrementOrderViolation on failure.
    """
    values = profile.values
    lo, hi = window_bounds(values, params.eps)
    if profile.is_exact:
        psum = prefix_sums(values)
        delta = tuple(
            params.h * (psum[hi[k] + 1] - psum[lo[k]]) / (hi[k] - lo[k] + 1)
            for k in range(len(values))
        )
        for k in range(len(delta) - 1):
            if delta[k + 1] < delta[k]:
                raise IncrementOrderViolation(f"delta[{k + 1}] < delta[{k}]")
        return delta

    psum = prefix_sums(values)
    wsum = psum[hi + 1] - psum[lo]
    card = (hi - lo + 1).astype(np.float64)
    delta = params.h * wsum / card
    if delta.size > 1 and not np.all(delta[1:] >= delta[:-1]):
        k = int(np.nonzero(delta[1:] < delta[:-1])[0][0])
        raise IncrementOrderViolation(f"delta[{k + 1}] < delta[{k}]")
    return delta


def _clamp_float(w: np.ndarray) -> np.ndarray:
    out = np.where(w < -1.0, -1.0, np.where(w > 1.0, 1.0, w))
    return out


def _clamp_exact(w):
    one = Fraction(1)
    return tuple(-one if x < -1 else (one if x > 1 else x) for x in w)


def phi(profile: OpinionProfile, params: ModelParams) -> OpinionProfile:
    """One synchronous update: add the increments, clamp to [-1, 1].

    Preserves canonical order without re-sorting and carries the agent
    permutation through unchanged.
    """
    delta = increments(profile, params)
    if profile.is_exact:
        w = tuple(v + d for v, d in zip(profile.values, delta))
        return profile.with_values(_clamp_exact(w))
    new = _clamp_float(profile.values + delta)
    new.setflags(write=False)
    return OpinionProfile(new, profile.agent_perm)


def distance(a: OpinionProfile, b: OpinionProfile):
    """Max-norm distance between two profiles of equal length."""
    va, vb = a.values, b.values
    if len(va) != len(vb):
        raise LengthMismatch(f"profile lengths differ: {len(va)} vs {len(vb)}")
    if _is_exact(va) or _is_exact(vb):
        return max(abs(x - y) for x, y in zip(va, vb))
    return float(np.max(np.abs(va - vb)))


def _values_equal(a: Values, b: Values) -> bool:
    if _is_exact(a):
        return tuple(a) == tuple(b)
    return bool(np.array_equal(a, b))


def iterate(
    profile: OpinionProfile,
    params: ModelParams,
    max_steps: int = 10**6,
    tol: float = 1e-12,
    record_all: bool = False,
    log_increments: bool = False,
) -> Trajectory:
    """Apply the update map repeatedly with two-tier convergence detection.

    Stops at the first exact fixed point (Phi(V^n) = V^n with exact
    equality), else at the first step whose max-norm displacement drops
    below ``tol``, else after ``max_steps`` applications.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    if not tol > 0:
        raise ValueError("tol must be positive")

    cur = profile
    states = [profile]
    inc_log = [] if log_increments else None
    for n in range(max_steps):
        nxt = phi(cur, params)
        if log_increments:
            if cur.is_exact:
                inc_log.append(tuple(b - a for a, b in zip(cur.values, nxt.values)))
            else:
                inc_log.append(nxt.values - cur.values)
        if _values_equal(nxt.values, cur.values):
            if not record_all and n > 0:
                states.append(cur)
            return Trajectory(states, TrajectoryStatus.EXACT_FIXED_POINT, n, inc_log)
        if record_all:
            states.append(nxt)
        if distance(nxt, cur) < tol:
            if not record_all:
                states.append(nxt)
            return Trajectory(states, TrajectoryStatus.TOLERANCE_CONVERGED, n, inc_log)
        cur = nxt
    if not record_all:
        states.append(cur)
    return Trajectory(states, TrajectoryStatus.MAX_STEPS_EXCEEDED, max_steps, inc_log)
