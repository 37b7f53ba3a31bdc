"""Influence matrix construction, spectrum checks, and the limit predictor."""

import numpy as np
import pytest

from votedyn import (
    AsymmetricInfluence,
    InsufficientRecord,
    ModelParams,
    NotStabilized,
    OpinionProfile,
    Trajectory,
    TrajectoryStatus,
    build_influence_matrix,
    influence_windows,
    interior_block,
    iterate,
    make_profile,
    predict_limit,
    predict_terminal,
    spectrum_check,
    stabilization_step,
    window_bounds,
)
from votedyn.harness import paper_config


def chain_matrix():
    # windows: agent 0 sees {0,1}, agent 1 sees all, agent 2 sees {1,2}
    return build_influence_matrix(((0, 0, 1), (1, 2, 2)))


# ---------------------------------------------------------------------------
# build_influence_matrix


def test_build_chain():
    m = chain_matrix()
    expected = np.array(
        [[0.5, 0.5, 0.0], [1 / 3, 1 / 3, 1 / 3], [0.0, 0.5, 0.5]]
    )
    assert np.allclose(m.t, expected, atol=1e-15)
    assert np.allclose(m.t.sum(axis=1), 1.0, atol=1e-15)
    assert np.array_equal(m.u, m.u.T)
    assert np.all(np.diag(m.t) > 0)


def test_build_full_and_singleton():
    full = build_influence_matrix(((0, 0, 0), (2, 2, 2)))
    assert np.allclose(full.t, 1 / 3)
    single = build_influence_matrix(((0, 1, 2), (0, 1, 2)))
    assert np.array_equal(single.t, np.eye(3))


def test_build_from_influence_windows():
    prof = make_profile([-0.4, 0.0, 0.4])
    wins = influence_windows(prof, 0.5)
    m = build_influence_matrix(wins)
    assert np.allclose(m.t, chain_matrix().t)


def test_build_asymmetry_detected():
    with pytest.raises(AsymmetricInfluence):
        build_influence_matrix(((0, 1, 2), (1, 1, 2)))


def test_build_window_must_contain_self():
    with pytest.raises(ValueError):
        build_influence_matrix(((1, 1, 2), (1, 1, 2)))


def test_export_text(tmp_path):
    m = chain_matrix()
    path = tmp_path / "t.txt"
    m.export_text(path)
    back = np.loadtxt(path)
    assert np.array_equal(back, m.t)


# ---------------------------------------------------------------------------
# spectrum_check


def test_spectrum_chain():
    # characteristic polynomial of the non-unit pair: x^2 - x/3 - 1/12
    rep = spectrum_check(chain_matrix(), h=0.1)
    assert np.allclose(rep.eigenvalues, [1.0, 0.5, -1 / 6], atol=1e-12)
    assert rep.max_imag_residual < 1e-9
    assert rep.in_range and rep.has_unit_eigenvalue and rep.positivity


def test_spectrum_identity_and_rank_one():
    rep = spectrum_check(build_influence_matrix(((0, 1, 2), (0, 1, 2))), 0.5)
    assert np.allclose(rep.eigenvalues, 1.0)
    rep = spectrum_check(build_influence_matrix(((0, 0, 0), (2, 2, 2))), 0.5)
    assert np.allclose(rep.eigenvalues, [1.0, 0.0, 0.0], atol=1e-12)


def test_spectrum_random_windows(rng):
    # random sorted profiles induce valid window structures
    for _ in range(50):
        n = int(rng.integers(2, 40))
        eps = float(rng.uniform(0.05, 0.95))
        h = float(rng.uniform(0.05, 0.95))
        prof = make_profile(rng.uniform(-1, 1, n))
        m = build_influence_matrix(window_bounds(prof.values, eps))
        rep = spectrum_check(m, h)
        assert rep.max_imag_residual < 1e-9
        assert rep.in_range
        assert rep.has_unit_eigenvalue
        assert rep.positivity
        assert np.min(1.0 + h * rep.eigenvalues) > 1 - h - 1e-9


# ---------------------------------------------------------------------------
# stabilization_step


def test_stabilization_at_fixed_point():
    params = ModelParams(0.1, 0.5, 3)
    traj = iterate(make_profile([-1.0, 0.0, 1.0]), params, record_all=True)
    assert stabilization_step(traj, params) == 0


def test_stabilization_paper_profiles():
    for eps, expected in ((0.45, 28), (0.05, 49)):
        cfg = paper_config(eps)
        params = ModelParams(cfg.h, cfg.eps, cfg.n)
        traj = iterate(
            make_profile(cfg.initial_values()), params, record_all=True
        )
        assert traj.status is TrajectoryStatus.EXACT_FIXED_POINT
        assert stabilization_step(traj, params) == expected


def test_stabilization_never():
    # two-state record with differing saturated counts proves nothing
    params = ModelParams(0.5, 0.5, 2)
    states = (make_profile([0.9, 0.9]), make_profile([1.0, 1.0]))
    traj = Trajectory(states, TrajectoryStatus.MAX_STEPS_EXCEEDED, 1, None)
    assert stabilization_step(traj, params) is None


def test_stabilization_insufficient_record():
    params = ModelParams(0.5, 0.5, 2)
    traj = Trajectory(
        (make_profile([0.2, 0.3]),), TrajectoryStatus.MAX_STEPS_EXCEEDED, 5, None
    )
    with pytest.raises(InsufficientRecord):
        stabilization_step(traj, params)


# ---------------------------------------------------------------------------
# predict_limit


def test_predict_limit_fixed_point_is_identity():
    params = ModelParams(0.1, 0.5, 3)
    prof = make_profile([-1.0, 0.0, 1.0])
    # saturated rows are not linear; use the interior-aware wrapper
    traj = iterate(prof, params, record_all=True)
    w = predict_terminal(traj, params)
    assert np.array_equal(w, [-1.0, 0.0, 1.0])


def test_predict_limit_zero_sum_pair():
    params = ModelParams(0.5, 0.5, 2)
    prof = make_profile([-0.1, 0.1])
    m = build_influence_matrix(window_bounds(prof.values, params.eps))
    w = predict_limit(prof, m, params)
    assert np.allclose(w, [-0.1, 0.1], atol=1e-12)


def test_predict_limit_not_stabilized_path():
    # nonzero mean under a full window drifts until clamping breaks the
    # linear model; the kernel projection (-0.15, 0.15) is never reached
    params = ModelParams(0.5, 0.5, 2)
    prof = make_profile([-0.1, 0.2])
    m = build_influence_matrix(window_bounds(prof.values, params.eps))
    with pytest.raises(NotStabilized):
        predict_limit(prof, m, params)


def test_predict_limit_kernel_membership(rng):
    # returned W satisfies T W = 0 (fixed point of E + hT)
    for _ in range(20):
        n = int(rng.integers(2, 20))
        vals = rng.uniform(-0.05, 0.05, n)
        vals -= vals.mean()  # zero-sum keeps the full window frozen
        prof = make_profile(vals)
        params = ModelParams(0.3, 0.5, n)
        m = build_influence_matrix(window_bounds(prof.values, params.eps))
        w = predict_limit(prof, m, params)
        assert float(np.max(np.abs(m.t @ w))) < 1e-10


# ---------------------------------------------------------------------------
# predict_terminal


def test_interior_block():
    assert interior_block(make_profile([-1.0, -0.2, 0.3, 1.0])) == (1, 2)
    assert interior_block(make_profile([-1.0, 1.0])) is None
    assert interior_block(make_profile([0.1, 0.2])) == (0, 1)


def test_predict_terminal_paper_profiles():
    for eps in (0.45, 0.05):
        cfg = paper_config(eps)
        params = ModelParams(cfg.h, cfg.eps, cfg.n)
        traj = iterate(
            make_profile(cfg.initial_values()), params, record_all=True
        )
        w = predict_terminal(traj, params)
        assert float(np.max(np.abs(w - np.asarray(traj.final.values)))) < 1e-8


def test_predict_terminal_interior_limit(rng):
    # clustered zero-mean starts converge to a nonbasic limit; the
    # predictor must match the long direct iteration
    for _ in range(10):
        n = int(rng.integers(3, 15))
        vals = rng.uniform(-0.04, 0.04, n)
        vals -= vals.mean()
        raw = np.concatenate(([-1.0, -1.0], vals, [1.0, 1.0]))
        params = ModelParams(0.2, 0.4, n + 4)
        traj = iterate(make_profile(raw), params, record_all=True)
        w = predict_terminal(traj, params)
        assert w is not None
        assert float(np.max(np.abs(w - np.asarray(traj.final.values)))) < 1e-8


def test_predict_terminal_random_trajectories(rng):
    checked = 0
    for _ in range(60):
        n = int(rng.integers(2, 40))
        eps = float(rng.uniform(0.05, 0.5))
        h = float(rng.uniform(0.05, 0.9))
        params = ModelParams(h, eps, n)
        traj = iterate(make_profile(rng.uniform(-1, 1, n)), params, record_all=True)
        w = predict_terminal(traj, params)
        if w is None:
            continue
        checked += 1
        assert float(np.max(np.abs(w - np.asarray(traj.final.values)))) < 1e-8
    assert checked > 0
