"""Frozen-regime influence matrix, its spectrum, and the limit predictor.

Once the counts of saturated (+/-1) components and the mutual-influence
structure stop changing, one update step is the linear map V -> (E + hT)V,
where T carries 1/|window| on mutually influencing pairs.  T factors as
S U with S diagonal positive and U the symmetric 0/1 adjacency, so T is
conjugate to the symmetric matrix S^(1/2) U S^(1/2): its spectrum is real,
lies in [-1, 1] (row-stochasticity), and E + hT has positive eigenvalues.
A bounded linear trajectory therefore splits as W1 + W2 with T W1 = 0 and
(E + hT)^n W2 -> 0, so the trajectory limit is the kernel projection W1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import (
    ModelParams,
    OpinionProfile,
    Trajectory,
    TrajectoryStatus,
    distance,
    phi,
    window_bounds,
)
from .errors import AsymmetricInfluence, InsufficientRecord, NotStabilized


@dataclass(frozen=True)
class InfluenceMatrix:
    """Row-stochastic matrix T = S U of the frozen influence structure.

    ``t`` has entries 1/I(k) on row k over the window of k; ``inv_card`` is
    the diagonal of S; ``u`` the symmetric 0/1 adjacency.
    """

    t: np.ndarray
    inv_card: np.ndarray
    u: np.ndarray

    @property
    def n(self) -> int:
        return self.t.shape[0]

    def symmetrized(self) -> np.ndarray:
        """The symmetric conjugate S^(1/2) U S^(1/2), sharing T's spectrum."""
        root = np.sqrt(self.inv_card)
        return self.u * np.outer(root, root)

    def export_text(self, path) -> None:
        """Dense plain-text dump, one row per line, space-separated."""
        with open(path, "w", encoding="utf-8") as fh:
            for row in self.t:
                fh.write(" ".join(repr(float(x)) for x in row) + "\n")


@dataclass(frozen=True)
class SpectralReport:
    """Verified spectral facts about T for a given gain h."""

    eigenvalues: np.ndarray  # sorted descending
    max_imag_residual: float
    in_range: bool
    has_unit_eigenvalue: bool
    positivity: bool  # all eigenvalues of E + hT positive
    limit: Optional[np.ndarray] = None


def _windows_of(windows):
    """Normalize a window argument to (lo, hi) integer arrays."""
    if isinstance(windows, tuple) and len(windows) == 2:
        lo, hi = windows
        return np.asarray(lo, dtype=np.int64), np.asarray(hi, dtype=np.int64)
    lo = np.array([w.lo for w in windows], dtype=np.int64)
    hi = np.array([w.hi for w in windows], dtype=np.int64)
    return lo, hi


def build_influence_matrix(windows) -> InfluenceMatrix:
    """Build T, S, U from per-agent windows, checking mutual consistency.

    Accepts either a list of InfluenceWindow or a raw (lo, hi) pair.
    Raises AsymmetricInfluence if l lies in window(k) but k not in
    window(l), which can only happen when the windows were not produced
    from a single sorted profile.
    """
    lo, hi = _windows_of(windows)
    n = lo.shape[0]
    idx = np.arange(n)
    if np.any(lo > idx) or np.any(hi < idx):
        raise ValueError("every window must contain its own index")
    u = (idx[None, :] >= lo[:, None]) & (idx[None, :] <= hi[:, None])
    asym = u != u.T
    if np.any(asym):
        k, l = np.argwhere(asym)[0]
        raise AsymmetricInfluence(int(k), int(l))
    card = (hi - lo + 1).astype(np.float64)
    inv_card = 1.0 / card
    t = u * inv_card[:, None]
    return InfluenceMatrix(t=t, inv_card=inv_card, u=u.astype(np.float64))


def spectrum_check(matrix: InfluenceMatrix, h: float) -> SpectralReport:
    """Compute T's spectrum via the symmetric conjugate and verify theory.

    The symmetric eigenproblem guarantees real output; a general
    eigensolve on raw T is retained as a cross-check and its largest
    imaginary magnitude reported.  Violation of realness/range/positivity
    would contradict the convergence theory, so they are reported as flags
    rather than raised.
    """
    eig = np.linalg.eigvalsh(matrix.symmetrized())
    eig = np.sort(eig)[::-1]
    raw = np.linalg.eigvals(matrix.t)
    max_imag = float(np.max(np.abs(raw.imag))) if raw.size else 0.0
    in_range = bool(np.all(eig >= -1 - 1e-9) and np.all(eig <= 1 + 1e-9))
    has_unit = bool(np.any(np.abs(eig - 1.0) <= 1e-9))
    positivity = bool(np.all(1.0 + h * eig > 0))
    return SpectralReport(
        eigenvalues=eig,
        max_imag_residual=max_imag,
        in_range=in_range,
        has_unit_eigenvalue=has_unit,
        positivity=positivity,
    )


def _signature(profile: OpinionProfile, eps):
    vals = profile.values
    lo, hi = window_bounds(vals, eps)
    n_minus = int(np.sum(vals == -1)) if not profile.is_exact else sum(
        1 for v in vals if v == -1
    )
    n_plus = int(np.sum(vals == 1)) if not profile.is_exact else sum(
        1 for v in vals if v == 1
    )
    return (n_minus, n_plus, tuple(int(x) for x in lo), tuple(int(x) for x in hi))


def stabilization_step(traj: Trajectory, params: ModelParams) -> Optional[int]:
    """First recorded step from which the saturated counts and the
    noninfluence structure stay constant for the rest of the record.

    Returns None when the record never stabilizes.  A single-state record
    is accepted only when the trajectory terminated at an exact fixed
    point (the structure is then trivially frozen); otherwise at least two
    states are required.
    """
    states = traj.states
    exact_end = traj.status is TrajectoryStatus.EXACT_FIXED_POINT
    if len(states) < 2 and not exact_end:
        raise InsufficientRecord("need at least two recorded states")
    sigs = [_signature(s, params.eps) for s in states]
    first = len(sigs) - 1
    while first > 0 and sigs[first - 1] == sigs[first]:
        first -= 1
    if first == len(sigs) - 1 and not exact_end:
        # constant suffix of length one proves nothing unless the final
        # state is exactly fixed
        return None
    return first


def interior_block(profile: OpinionProfile):
    """Indices (a, b) of the non-saturated middle, or None if all saturated."""
    vals = profile.values
    n = profile.n
    a = 0
    while a < n and vals[a] == -1:
        a += 1
    b = n - 1
    while b >= a and vals[b] == 1:
        b -= 1
    if b < a:
        return None
    return a, b


def predict_limit(
    profile: OpinionProfile,
    matrix: InfluenceMatrix,
    params: ModelParams,
    probe_tol: float = 1e-12,
    target_tol: float = 1e-8,
    kernel_tol: float = 1e-10,
    max_validation_steps: int = 200_000,
) -> np.ndarray:
    """Project a stabilized clamp-free state onto the kernel of T.

    The caller asserts (via stabilization_step) that the actual dynamics
    from ``profile`` coincide with V -> (E + hT)V.  Every validation step
    re-checks that claim and raises NotStabilized on deviation beyond
    ``probe_tol``; the returned kernel projection W is cross-checked
    against direct iteration to within ``target_tol``.
    """
    v = np.asarray(profile.to_float().values, dtype=np.float64)
    h = float(params.h)
    n = v.shape[0]
    if matrix.n != n:
        raise ValueError("matrix size does not match profile length")

    sym = matrix.symmetrized()
    lam, q = np.linalg.eigh(sym)
    root = np.sqrt(matrix.inv_card)
    # T = R sym R^{-1} with R = diag(root); expand R^{-1} v in sym's basis
    coeff = q.T @ (v / root)
    kernel = np.abs(lam) <= kernel_tol
    w1 = root * (q[:, kernel] @ coeff[kernel])
    w2 = v - w1

    # decay rate of the discarded part: slowest factor |1 + h*lam| among
    # non-kernel modes actually present
    scale = max(1.0, float(np.max(np.abs(coeff))) if coeff.size else 1.0)
    present = ~kernel & (np.abs(coeff) > 1e-13 * scale)
    cur = profile.to_float()
    w2_norm = float(np.max(np.abs(w2))) if w2.size else 0.0
    if np.any(present) and w2_norm > target_tol:
        rate = float(np.max(np.abs(1.0 + h * lam[present])))
        rate = min(rate, 1.0 - 1e-15)
        cond = math.sqrt(float(np.max(matrix.inv_card) / np.min(matrix.inv_card)))
        c0 = 10.0 * cond * float(np.linalg.norm(w2))
        n_star = int(math.ceil(math.log(0.1 * target_tol / c0) / math.log(rate)))
        n_star = max(1, min(n_star, max_validation_steps))
    else:
        n_star = 1

    lin = np.eye(n) + h * matrix.t
    for _ in range(n_star):
        x = np.asarray(cur.values, dtype=np.float64)
        linear_next = lin @ x
        cur = phi(cur, params)
        dev = float(np.max(np.abs(np.asarray(cur.values) - linear_next)))
        if dev > probe_tol:
            raise NotStabilized(
                f"update deviates from the frozen linear model by {dev:.3e}"
            )
    resid = float(np.max(np.abs(np.asarray(cur.values) - w1)))
    if resid > target_tol:
        raise NotStabilized(
            f"direct iteration disagrees with the kernel projection by {resid:.3e}"
        )
    return w1


def predict_terminal(
    traj: Trajectory, params: ModelParams
) -> Optional[np.ndarray]:
    """Predict the trajectory limit from its stabilization state.

    Extracts the non-saturated middle block at stabilization (saturated
    rows clamp every step and are not linear), predicts its limit via the
    kernel projection, and re-embeds the +/-1 blocks.  Returns None when
    the record never stabilizes.
    """
    n2 = stabilization_step(traj, params)
    if n2 is None:
        return None
    state = traj.states[min(n2, len(traj.states) - 1)].to_float()
    vals = np.asarray(state.values, dtype=np.float64)
    block = interior_block(state)
    if block is None:
        return vals.copy()
    a, b = block
    sub_vals = vals[a : b + 1].copy()
    lo, hi = window_bounds(state.values, params.eps)
    if lo[a] < a or hi[b] > b:
        raise NotStabilized("interior block interacts with saturated blocks")
    sub_prof = OpinionProfile(sub_vals, tuple(range(b - a + 1)))
    sub_params = ModelParams(params.h, params.eps, b - a + 1)
    sub_matrix = build_influence_matrix(
        (np.asarray(lo[a : b + 1]) - a, np.asarray(hi[a : b + 1]) - a)
    )
    w = predict_limit(sub_prof, sub_matrix, sub_params)
    out = vals.copy()
    out[a : b + 1] = w
    return out
