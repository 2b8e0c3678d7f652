import numpy as np
import pytest

from uzawa_contact.diagnostics import kkt_residual, primal_objective
from uzawa_contact.errors import TooManyConstraints
from uzawa_contact.fem import build_benchmark, paper_spec
from uzawa_contact.linalg import min_eigenvalue
from uzawa_contact.oracle import DEFAULT_SEED, active_set_solve, jacobi_eigenvalues, random_instance
from uzawa_contact.problem import ContactQP
from uzawa_contact.solvers import SolverConfig, accelerated_solve


def test_spring(spring):
    sol = active_set_solve(spring)
    assert sol.active_set == (0,)
    np.testing.assert_allclose(sol.u, [1.5])
    np.testing.assert_allclose(sol.r, [-1.0])
    assert sol.optimal_value == pytest.approx(-3.75)


def test_inactive(loose_spring):
    sol = active_set_solve(loose_spring)
    assert sol.active_set == ()
    np.testing.assert_allclose(sol.u, [2.0])
    np.testing.assert_array_equal(sol.r, [0.0])


@pytest.mark.parametrize("restart", [False, True])
def test_small_benchmark_matches_accelerated(restart):
    qp = build_benchmark(paper_spec(3))
    assert (qp.dim, qp.ncon) == (12, 3)
    sol = active_set_solve(qp)
    res = accelerated_solve(qp, SolverConfig(epsilon=1e-10), restart=restart)
    assert np.max(np.abs(res.u - sol.u)) <= 1e-8
    # reactions here are O(1-10) N
    assert np.max(np.abs(res.r - sol.r)) <= 1e-8 * np.max(np.abs(sol.r))


def test_enumeration_limit():
    qp = ContactQP(np.eye(13), np.zeros(13), np.eye(13), np.ones(13))
    with pytest.raises(TooManyConstraints):
        active_set_solve(qp)


def test_dependent_rows_are_skipped():
    # duplicated constraint: subsets containing both rows give a singular system
    qp = ContactQP([[2.0]], [4.0], [[1.0], [1.0]], [1.5, 1.5])
    sol = active_set_solve(qp)
    np.testing.assert_allclose(sol.u, [1.5])
    assert sol.r.sum() == pytest.approx(-1.0)


def test_random_instances_have_unique_certificate():
    rng = np.random.default_rng(DEFAULT_SEED)
    for _ in range(200):
        qp = random_instance(rng)
        assert qp.ncon <= qp.dim <= 6
        sol = active_set_solve(qp)
        assert sol.n_accepted == 1
        assert kkt_residual(qp, sol.u, sol.r).total <= 1e-9
        assert np.all(sol.r <= 1e-12)
        g = qp.gap(sol.u)
        assert np.all(g >= -1e-10)
        assert np.all(np.abs(g[list(sol.active_set)]) <= 1e-10)
        inactive = np.setdiff1d(np.arange(qp.ncon), sol.active_set)
        np.testing.assert_array_equal(sol.r[inactive], 0.0)
        assert sol.optimal_value == pytest.approx(primal_objective(qp, sol.u), rel=1e-12)


def test_random_instance_is_seeded():
    a = random_instance(np.random.default_rng(5))
    b = random_instance(np.random.default_rng(5))
    assert np.array_equal(a.stiffness, b.stiffness) and np.array_equal(a.load, b.load)


@pytest.mark.parametrize(
    "A, expected",
    [
        (np.diag([3.0, 1.0, 2.0]), [1.0, 2.0, 3.0]),
        (np.eye(5), [1.0] * 5),
        ([[4.0, 2.0], [2.0, 5.0]], [(9 - np.sqrt(17)) / 2, (9 + np.sqrt(17)) / 2]),
    ],
)
def test_jacobi_examples(A, expected):
    np.testing.assert_allclose(jacobi_eigenvalues(A), expected, rtol=1e-12)


@pytest.mark.parametrize("d", [3, 10, 30])
def test_jacobi_against_lapack(d):
    G = np.random.default_rng(d).standard_normal((d, d))
    A = G + G.T
    np.testing.assert_allclose(jacobi_eigenvalues(A), np.linalg.eigvalsh(A), atol=1e-10 * np.abs(A).max())


def test_jacobi_on_benchmark_stiffness():
    qp = build_benchmark(paper_spec(3))
    assert jacobi_eigenvalues(qp.stiffness)[0] == pytest.approx(min_eigenvalue(qp.stiffness), rel=1e-6)
