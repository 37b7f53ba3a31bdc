"""Fixed-point detection, classification, and stability certificates.

Fixed points of the update map come in three shapes:

* basic: (-1, ..., -1, 1, ..., 1) with L entries at -1 - asymptotically
  stable, attracting the max-norm ball of radius 1 - eps;
* zero-form: (-1, ..., -1, 0, ..., 0, 1, ..., 1) with at least one zero;
* mixed: leading -1 and trailing +1 blocks around an interior block whose
  negatives lie in (-eps, 0), positives in (0, eps), whose window is the
  whole interior block, and whose sum is exactly zero.

The classification is exhaustive for exact fixed points; a verified fixed
point matching no form raises ClassificationGap instead of being absorbed.
Nonbasic points are unstable off the hyperplane of zero interior sum: a
perturbation with interior sum s grows geometrically, s -> s * (1 + h),
until the trajectory escapes and falls into a basic fixed point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .dynamics import (
    ModelParams,
    OpinionProfile,
    Trajectory,
    distance,
    iterate,
    make_profile,
    phi,
    window_bounds,
)
from .errors import (
    ClassificationGap,
    ConstraintViolation,
    DeltaTooLarge,
    OnHyperplane,
)

# Absolute per-agent tolerance for the interior zero-sum condition under
# floats; scaled by N at the use site.  Exact mode requires the rational
# backend, where the condition is checked with arithmetic equality.
INTERIOR_SUM_ATOL = 1e-12


class FixedPointKind(Enum):
    BASIC = "basic"
    NONBASIC_ZERO_FORM = "nonbasic_zero_form"
    NONBASIC_MIXED = "nonbasic_mixed"
    NOT_FIXED = "not_fixed"


@dataclass(frozen=True)
class FixedPointClass:
    """Tagged classification result.

    For basic points ``minus_count`` is the split index L; for nonbasic
    points the three counts partition N.  For mixed points ``a``/``m`` are
    the 0-based bounds of the interior block and ``interior`` its values.
    """

    kind: FixedPointKind
    minus_count: int = 0
    zero_count: int = 0
    plus_count: int = 0
    a: Optional[int] = None
    m: Optional[int] = None
    interior: tuple = ()

    @property
    def is_fixed(self) -> bool:
        return self.kind is not FixedPointKind.NOT_FIXED


@dataclass(frozen=True)
class BasinCertificate:
    """Guarantee of finite-time exact convergence to the basic point ``target``.

    Issued when rho(V0, target) <= 1 - eps.
    """

    target: OpinionProfile
    split: int
    rho: float
    radius: float


@dataclass(frozen=True)
class SeparationCertificate:
    """Sign-straddling gap certificate: agents 1..split converge to -1."""

    split: int
    gap: float


@dataclass(frozen=True)
class InstabilityWitness:
    """Recorded escape of a perturbed nonbasic fixed point.

    ``growth_ratios`` are the per-step interior-sum ratios observed while
    the perturbed interior block still shares one common window and no
    clamping has occurred; each equals 1 + h up to rounding.
    """

    d: float
    delta: float
    perturbed_index: int
    growth_ratios: tuple
    escape_step: int
    terminal: OpinionProfile
    terminal_class: FixedPointClass


def is_fixed_point(
    profile: OpinionProfile, params: ModelParams, mode: Union[str, float] = "exact"
) -> bool:
    """True iff one update leaves the profile unchanged.

    ``mode`` is the string "exact" (componentwise equality of the stored
    values) or a positive max-norm tolerance.
    """
    if profile.is_exact:
        params = params.to_exact()
    nxt = phi(profile, params)
    if mode == "exact":
        if profile.is_exact:
            return tuple(nxt.values) == tuple(profile.values)
        return bool(np.array_equal(nxt.values, profile.values))
    tol = float(mode)
    if not tol > 0:
        raise ValueError("tolerance mode requires a positive tolerance")
    return distance(nxt, profile) < tol


def _interior_sum_ok(values, n: int) -> bool:
    if isinstance(values, np.ndarray):
        return abs(float(np.sum(values))) <= INTERIOR_SUM_ATOL * n
    return sum(values, Fraction(0)) == 0


def classify_fixed_point(
    profile: OpinionProfile,
    params: ModelParams,
    fixed_tol: Optional[float] = None,
) -> FixedPointClass:
    """Classify a profile against the exhaustive fixed-point catalogue.

    Fixedness is checked exactly by default; pass ``fixed_tol`` to accept
    tolerance-level fixed points (asymptotic limits that floats cannot pin
    down exactly).  Returns NOT_FIXED when the fixedness check fails, and
    raises ClassificationGap if a verified fixed point matches no form.
    """
    mode = "exact" if fixed_tol is None else fixed_tol
    if not is_fixed_point(profile, params, mode):
        return FixedPointClass(FixedPointKind.NOT_FIXED)

    vals = profile.values
    n = profile.n
    minus = 0
    while minus < n and vals[minus] == -1:
        minus += 1
    plus = 0
    while plus < n - minus and vals[n - 1 - plus] == 1:
        plus += 1
    interior = vals[minus : n - plus]
    n_int = len(interior)

    if n_int == 0:
        return FixedPointClass(
            FixedPointKind.BASIC, minus_count=minus, plus_count=plus
        )

    if all(v == 0 for v in interior):
        return FixedPointClass(
            FixedPointKind.NONBASIC_ZERO_FORM,
            minus_count=minus,
            zero_count=n_int,
            plus_count=plus,
        )

    a = minus
    m = n - plus - 1
    problems = []
    if not all(-params.eps < v < 0 or v == 0 or 0 < v < params.eps for v in interior):
        problems.append("interior value outside (-eps, eps)")
    negs = sum(1 for v in interior if v < 0)
    poss = sum(1 for v in interior if v > 0)
    if negs == 0 or poss == 0:
        problems.append("interior not mixed-sign")
    lo, hi = window_bounds(vals, params.eps)
    if any(lo[k] != a or hi[k] != m for k in range(a, m + 1)):
        problems.append("interior windows differ from the interior block")
    if not _interior_sum_ok(interior, n):
        problems.append("interior sum not zero")
    if problems:
        raise ClassificationGap(
            f"fixed point matches no known form: {'; '.join(problems)}"
        )
    return FixedPointClass(
        FixedPointKind.NONBASIC_MIXED,
        minus_count=minus,
        zero_count=n_int,
        plus_count=plus,
        a=a,
        m=m,
        interior=tuple(interior),
    )


def construct_nonbasic(
    minus_count: int,
    interior_values: Sequence,
    plus_count: int,
    params: ModelParams,
    exact: bool = False,
) -> OpinionProfile:
    """Assemble a nonbasic fixed point from its interior block.

    Preconditions mirror the catalogue conditions and are reported by name
    through ConstraintViolation.  The result is verified fixed under the
    exact-rational backend regardless of the requested output backend.
    """
    if minus_count < 0 or plus_count < 0:
        raise ConstraintViolation("block counts", "must be nonnegative")
    interior = [Fraction(v) for v in interior_values] if exact else [
        float(v) for v in interior_values
    ]
    if not interior:
        raise ConstraintViolation("interior", "must contain at least one value")
    if any(interior[i] > interior[i + 1] for i in range(len(interior) - 1)):
        raise ConstraintViolation("interior order", "values must be sorted")
    exact_sum = sum(Fraction(v) for v in interior)
    if exact_sum != 0:
        raise ConstraintViolation("interior sum", f"must be exactly zero, got {exact_sum}")
    if not all(-params.eps < v < params.eps for v in interior):
        raise ConstraintViolation("interior range", "values must lie in (-eps, eps)")
    diam = interior[-1] - interior[0]
    if diam > params.eps:
        raise ConstraintViolation(
            "interior diameter", f"{diam} > eps = {params.eps}"
        )
    if minus_count > 0 and not (interior[0] + 1 > params.eps):
        raise ConstraintViolation(
            "minus separation", "need (interior min) + 1 > eps"
        )
    if plus_count > 0 and not (1 - interior[-1] > params.eps):
        raise ConstraintViolation(
            "plus separation", "need 1 - (interior max) > eps"
        )

    raw = [-1] * minus_count + list(interior) + [1] * plus_count
    profile = make_profile(raw, exact=exact)

    check = profile.to_exact()
    if not is_fixed_point(check, params.to_exact(), "exact"):
        raise ConstraintViolation(
            "fixedness", "constructed profile is not exactly fixed"
        )
    return profile


def basic_point(
    split: int, n: int, like: Optional[OpinionProfile] = None
) -> OpinionProfile:
    """The basic fixed point with ``split`` entries at -1, rest at +1.

    When ``like`` is given, its agent permutation (and backend) is carried
    over so the result is directly comparable componentwise.
    """
    if not 0 <= split <= n:
        raise ValueError(f"split must be in [0, {n}]")
    if like is not None and like.is_exact:
        vals = tuple([Fraction(-1)] * split + [Fraction(1)] * (n - split))
        perm = like.agent_perm
    else:
        arr = np.concatenate((np.full(split, -1.0), np.full(n - split, 1.0)))
        arr.setflags(write=False)
        vals = arr
        perm = like.agent_perm if like is not None else tuple(range(n))
    return OpinionProfile(vals, perm)


def basin_certificate(
    profile: OpinionProfile, params: ModelParams
) -> Optional[BasinCertificate]:
    """Find a basic point whose (1 - eps)-ball contains the given profile.

    At most one basic point ever qualifies (two basic points differ by 2 in
    some coordinate); the smallest split is returned on the degenerate ties
    that exact arithmetic cannot produce.  Returns None when no basic point
    is close enough.
    """
    vals = profile.values
    n = profile.n
    if profile.is_exact:
        dist_minus = [abs(v + 1) for v in vals]
        dist_plus = [abs(v - 1) for v in vals]
    else:
        dist_minus = np.abs(vals + 1.0)
        dist_plus = np.abs(vals - 1.0)
    # prefix max of |v+1|, suffix max of |v-1|
    best = None
    pref = 0
    suffix = [0] * (n + 1)
    for k in range(n - 1, -1, -1):
        suffix[k] = max(suffix[k + 1], dist_plus[k])
    for split in range(n + 1):
        r = max(pref, suffix[split])
        if r <= 1 - params.eps:
            best = (split, r)
            break
        if split < n:
            pref = max(pref, dist_minus[split])
    if best is None:
        return None
    split, rho = best
    target = basic_point(split, n, like=profile)
    return BasinCertificate(
        target=target, split=split, rho=float(rho), radius=float(1 - params.eps)
    )


def separation_certificate(
    profile: OpinionProfile, params: ModelParams
) -> Optional[SeparationCertificate]:
    """Sign-straddling gap: negatives and positives farther apart than eps.

    When issued with split L, iteration is guaranteed to terminate at the
    basic point with L entries at -1.
    """
    vals = profile.values
    n = profile.n
    neg = sum(1 for v in vals if v < 0)
    if neg == 0 or neg == n:
        return None
    if not vals[neg] > 0:  # a zero sits between the groups
        return None
    gap = vals[neg] - vals[neg - 1]
    if gap > params.eps:
        return SeparationCertificate(split=neg, gap=float(gap))
    return None


def admissible_perturbation_radius(
    classification: FixedPointClass, params: ModelParams
) -> float:
    """The neighborhood radius d used by the instability construction.

    For zero-form points, d = min(eps/2, (1 - eps)/2) keeps the zero block
    mutually influencing and isolated from the saturated blocks.  For mixed
    points, d is the largest value satisfying the interior-range, window-
    freezing, isolation, and growth conditions, shrunk by a 0.9 safety
    factor.
    """
    eps = float(params.eps)
    h = float(params.h)
    n = params.n
    if classification.kind is FixedPointKind.NONBASIC_ZERO_FORM:
        return min(eps / 2, (1 - eps) / 2)
    if classification.kind is not FixedPointKind.NONBASIC_MIXED:
        raise ValueError("perturbation radius is defined for nonbasic points only")
    interior = [float(v) for v in classification.interior]
    p_a, p_m = interior[0], interior[-1]
    bounds = [
        eps - p_m,  # perturbed interior stays inside (-eps, eps)
        eps + p_a,
        (eps - (p_m - p_a)) / 2,  # interior windows stay the full block
        h * p_m / (2 * n + h),  # growth dominates the neighborhood size
        -h * p_a / (2 * n + h),
    ]
    if classification.minus_count > 0:
        bounds.append(((p_a + 1) - eps) / 2)  # stay uninfluenced by the -1 block
    if classification.plus_count > 0:
        bounds.append(((1 - p_m) - eps) / 2)
    return 0.9 * min(bounds)


def instability_witness(
    profile: OpinionProfile,
    params: ModelParams,
    delta: float,
    max_steps: int = 10**6,
) -> InstabilityWitness:
    """Perturb a nonbasic fixed point off the zero-sum hyperplane and record
    the geometric growth of the interior sum until escape.

    The largest interior coordinate is bumped by ``delta`` (so the interior
    sum starts at exactly delta plus float summation noise).  Per-step sum
    ratios are recorded while the interior block still shares the single
    window [a, m] and nothing clamps; they equal 1 + h up to rounding.
    """
    cls = classify_fixed_point(profile, params)
    if cls.kind not in (
        FixedPointKind.NONBASIC_ZERO_FORM,
        FixedPointKind.NONBASIC_MIXED,
    ):
        raise ValueError(f"need a nonbasic fixed point, got {cls.kind.value}")
    d = admissible_perturbation_radius(cls, params)
    if not 0 < delta < d:
        raise DeltaTooLarge(f"delta must satisfy 0 < delta < {d}, got {delta}")

    a = cls.minus_count
    m = profile.n - cls.plus_count - 1
    base = profile.to_float()
    vals = base.values.copy()
    vals[m] += delta
    if float(np.sum(vals[a : m + 1])) == 0.0:
        raise OnHyperplane("perturbed interior sum is exactly zero")
    cur = base.with_values(vals)

    ref = base
    ratios = []
    escape_step = None
    s_prev = float(np.sum(cur.values[a : m + 1]))
    for n_step in range(max_steps):
        if distance(cur, ref) >= d:
            escape_step = n_step
            break
        lo, hi = window_bounds(cur.values, params.eps)
        in_regime = all(lo[k] == a and hi[k] == m for k in range(a, m + 1))
        nxt = phi(cur, params)
        clamped = bool(np.any(np.abs(nxt.values[a : m + 1]) >= 1.0))
        s_next = float(np.sum(nxt.values[a : m + 1]))
        if in_regime and not clamped and s_prev != 0.0:
            ratios.append(s_next / s_prev)
        cur = nxt
        s_prev = s_next
    if escape_step is None:
        raise RuntimeError("no escape within max_steps; instability not observed")

    tail = iterate(cur, params, max_steps=max_steps)
    terminal = tail.final
    terminal_class = classify_fixed_point(terminal, params)
    return InstabilityWitness(
        d=d,
        delta=float(delta),
        perturbed_index=m,
        growth_ratios=tuple(ratios),
        escape_step=escape_step,
        terminal=terminal,
        terminal_class=terminal_class,
    )
