import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uzawa_contact import diagnostics, solvers
from uzawa_contact.linalg import cholesky_factorize
from uzawa_contact.oracle import active_set_solve, random_instance
from uzawa_contact.problem import ContactQP
from uzawa_contact.solvers import (
    DualState,
    Method,
    SolverConfig,
    Status,
    accelerated_solve,
    default_step_size,
    dual_gradient,
    project_nonpositive,
    solve,
    step_size_validity_check,
    tau_update,
    uzawa_solve,
)


@pytest.mark.parametrize(
    "K, N, alpha",
    [([[2.0]], [[1.0]], 2.0), (np.eye(2), np.eye(2), 1.0), (np.diag([2.0, 8.0]), [[0.0, 2.0]], 0.5)],
)
def test_default_step_size(K, N, alpha):
    K = np.asarray(K, dtype=float)
    N = np.asarray(N, dtype=float)
    qp = ContactQP(K, np.zeros(K.shape[0]), N, np.zeros(N.shape[0]))
    assert default_step_size(qp) == pytest.approx(alpha, rel=1e-8)


@pytest.mark.parametrize("alpha, valid", [(1.0, True), (2.0, False), (-1.0, False), (0.0, False), (1.999, True)])
def test_step_size_validity(alpha, valid):
    qp = ContactQP([[1.0]], [0.0], [[1.0]], [0.0])
    assert step_size_validity_check(qp, alpha) is valid


def test_dual_gradient_spring(spring):
    F = cholesky_factorize(spring.stiffness)
    u, g = dual_gradient(F, spring, np.array([0.0]))
    np.testing.assert_allclose(u, [2.0])
    np.testing.assert_allclose(g, [-0.5])
    u, g = dual_gradient(F, spring, np.array([-1.0]))
    np.testing.assert_allclose(u, [1.5])
    np.testing.assert_allclose(g, [0.0], atol=1e-15)


def test_dual_gradient_at_zero_is_unconstrained_gap(bench30):
    qp, F, _ = bench30
    _, g = dual_gradient(F, qp, np.zeros(qp.ncon))
    expected = qp.gap_offset - qp.constraint_matrix @ np.linalg.solve(qp.stiffness, qp.load)
    np.testing.assert_allclose(g, expected, rtol=1e-9, atol=1e-9 * np.abs(expected).max())


def test_dual_gradient_dimension_check(spring):
    F = cholesky_factorize(spring.stiffness)
    with pytest.raises(ValueError):
        dual_gradient(F, spring, np.zeros(2))


@pytest.mark.parametrize(
    "y, expected", [([1.0, -2.0, 0.0], [0.0, -2.0, 0.0]), ([-1.0, -3.0], [-1.0, -3.0]), ([0.3], [0.0])]
)
def test_project_nonpositive(y, expected):
    np.testing.assert_array_equal(project_nonpositive(np.array(y)), expected)


def test_tau_update_first_step():
    tau, omega = tau_update(1.0)
    assert tau == pytest.approx((1 + math.sqrt(5)) / 2, rel=1e-15)
    assert omega == 0.0


def test_tau_update_second_step():
    tau, omega = tau_update(1.618034)
    # tau_next is the positive root of t^2 - t - tau^2 = 0
    root = max(np.roots([1.0, -1.0, -(1.618034**2)]))
    assert tau == pytest.approx(root, rel=1e-12)
    assert tau == pytest.approx(2.193527, abs=1e-6)
    assert omega == pytest.approx(0.618034 / root, rel=1e-12)
    assert omega == pytest.approx(0.281754, abs=1e-6)


def test_tau_update_asymptotics():
    tau, prev_omega = 1.0, -1.0
    for _ in range(200):
        nxt, omega = tau_update(tau)
        assert nxt > tau
        assert prev_omega < omega < 1.0
        tau, prev_omega = nxt, omega
    for tau in np.logspace(0, 8, 50):
        nxt, omega = tau_update(tau)
        assert 0.0 <= omega < 1.0
    nxt, _ = tau_update(1e8)
    assert nxt / 1e8 == pytest.approx(1.0, abs=1e-7)


def test_uzawa_first_step_spring(spring):
    res = uzawa_solve(spring, SolverConfig(alpha=0.5, max_iter=1, record_history=True))
    np.testing.assert_allclose(res.r, [-0.25])
    assert res.status is Status.MAX_ITER_REACHED
    assert res.iterations == 1


def test_single_uzawa_step_arithmetic():
    assert project_nonpositive(np.array([-1.0]) + 0.5 * np.array([0.4]))[0] == pytest.approx(-0.8)


@pytest.mark.parametrize("method", list(Method))
def test_spring_converges(spring, method):
    res = solve(spring, SolverConfig(alpha=0.5, epsilon=1e-12, method=method))
    assert res.status is Status.CONVERGED
    assert res.u[0] == pytest.approx(1.5, abs=1e-9)
    assert res.r[0] == pytest.approx(-1.0, abs=1e-9)


def test_accelerated_not_slower_on_spring(spring):
    cfg = SolverConfig(alpha=0.5, epsilon=1e-10)
    plain = uzawa_solve(spring, cfg)
    fast = accelerated_solve(spring, cfg, restart=True)
    assert fast.u[0] == pytest.approx(1.5, abs=1e-9)
    assert fast.iterations <= plain.iterations


@pytest.mark.parametrize("method", list(Method))
def test_inactive_constraint_converges_immediately(loose_spring, method):
    res = solve(loose_spring, SolverConfig(method=method))
    assert res.status is Status.CONVERGED
    assert res.iterations == 1
    np.testing.assert_array_equal(res.r, [0.0])
    np.testing.assert_allclose(res.u, [2.0])


@pytest.mark.parametrize("seed", range(5))
def test_first_accelerated_step_is_uzawa_step(seed):
    qp = random_instance(np.random.default_rng(seed))
    r0 = -np.random.default_rng(seed + 100).uniform(0, 1, qp.ncon)
    cfg = SolverConfig(max_iter=1)
    a = uzawa_solve(qp, cfg, r0=r0)
    for restart in (False, True):
        b = accelerated_solve(qp, cfg, r0=r0, restart=restart)
        np.testing.assert_array_equal(a.r, b.r)


def test_initial_reactions_must_be_nonpositive(spring):
    with pytest.raises(ValueError):
        uzawa_solve(spring, SolverConfig(), r0=np.array([0.1]))


@pytest.mark.parametrize("kwargs", [dict(epsilon=0.0), dict(max_iter=0), dict(alpha=-1.0)])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        SolverConfig(**kwargs)


def test_config_accepts_method_names():
    assert SolverConfig(method="uzawa").method is Method.UZAWA


def test_step_outside_interval_warns(spring, caplog):
    with caplog.at_level("WARNING"):
        uzawa_solve(spring, SolverConfig(alpha=5.0, max_iter=3))
    assert "convergence interval" in caplog.text


def test_max_iter_reports_status(bench30):
    qp, F, alpha = bench30
    res = uzawa_solve(qp, SolverConfig(alpha=alpha, max_iter=5, record_history=True), factor=F)
    assert res.status is Status.MAX_ITER_REACHED
    assert res.iterations == 5
    assert len(res.history) == 5


def test_restart_resets_momentum(bench30_runs):
    history = bench30_runs["restart-history"].history
    assert any(rec.restarted for rec in history)
    state = bench30_runs[Method.ACCELERATED_RESTART, 1e-6].state
    assert isinstance(state, DualState)
    assert state.tau >= 1.0


@pytest.mark.parametrize("method", list(Method))
def test_iterates_stay_feasible(bench30, method):
    qp, F, alpha = bench30
    seen = []
    real = solvers.project_nonpositive

    def spy(y):
        out = real(y)
        seen.append(out.copy())
        return out

    solvers.project_nonpositive = spy
    try:
        solve(qp, SolverConfig(alpha=alpha, method=method, max_iter=300), factor=F)
    finally:
        solvers.project_nonpositive = real
    assert len(seen) == 300
    assert all(np.all(r <= 0.0) for r in seen)


@pytest.mark.parametrize("method", list(Method))
def test_converged_point_is_fixed_point(bench30, bench30_runs, method):
    qp, F, alpha = bench30
    res = bench30_runs[method, 1e-6]
    assert res.status is Status.CONVERGED
    _, g = dual_gradient(F, qp, res.r)
    residual = np.linalg.norm(res.r - project_nonpositive(res.r + alpha * g))
    assert residual <= 10 * 1e-6


def test_uzawa_dual_ascent_is_monotone(bench30, spring):
    qp, F, alpha = bench30
    res = uzawa_solve(qp, SolverConfig(alpha=alpha, max_iter=2000, record_history=True), factor=F)
    psi = [diagnostics.dual_objective(F, qp, np.zeros(qp.ncon))] + [h.dual_obj for h in res.history]
    for a, b in zip(psi, psi[1:]):
        assert b >= a - 1e-12 * abs(a)
    Fs = cholesky_factorize(spring.stiffness)
    res = uzawa_solve(spring, SolverConfig(epsilon=1e-12, record_history=True), factor=Fs)
    psi = [h.dual_obj for h in res.history]
    assert all(b >= a - 1e-12 * abs(a) for a, b in zip(psi, psi[1:]))


def test_methods_agree_on_displacements(bench30_runs):
    ref = bench30_runs[Method.ACCELERATED_RESTART, 1e-8]
    for method in Method:
        assert np.max(np.abs(bench30_runs[method, 1e-8].u - ref.u)) <= 1e-5


@pytest.mark.xfail(
    strict=True,
    reason="a step-length test of 1e-8 leaves reaction errors near 5e-5 N on this "
    "instance (error ~ step x dual condition number)",
)
def test_methods_agree_on_reactions_at_1e8(bench30_runs):
    ref = bench30_runs[Method.ACCELERATED_RESTART, 1e-8]
    for method in Method:
        assert np.max(np.abs(bench30_runs[method, 1e-8].r - ref.r)) <= 1e-5


def test_methods_agree_on_reactions_at_1e10(bench30):
    qp, F, alpha = bench30
    runs = [solve(qp, SolverConfig(alpha=alpha, epsilon=1e-10, method=m), factor=F) for m in Method]
    for res in runs[1:]:
        assert np.max(np.abs(res.r - runs[0].r)) <= 1e-6
        assert np.max(np.abs(res.u - runs[0].u)) <= 1e-6


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), method=st.sampled_from(list(Method)))
def test_matches_oracle_on_random_instances(seed, method):
    qp = random_instance(np.random.default_rng(seed))
    ref = active_set_solve(qp)
    res = solve(qp, SolverConfig(epsilon=1e-10, method=method))
    assert res.status is Status.CONVERGED
    assert np.max(np.abs(res.u - ref.u)) <= 1e-6
    assert np.all(res.r <= 0.0)


def test_shared_factor_is_not_modified(bench30):
    qp, F, alpha = bench30
    before = F.lower.copy()
    solve(qp, SolverConfig(alpha=alpha, max_iter=10), factor=F)
    assert np.array_equal(before, F.lower)
    assert not F.lower.flags.writeable
