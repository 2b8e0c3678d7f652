import numpy as np
import pytest

from uzawa_contact.fem import build_benchmark, paper_spec
from uzawa_contact.linalg import cholesky_factorize
from uzawa_contact.problem import ContactQP, spring_instance
from uzawa_contact.solvers import Method, SolverConfig, default_step_size, solve


@pytest.fixture
def spring():
    return spring_instance()


@pytest.fixture
def loose_spring():
    # stop far away: the unconstrained optimum u = 2 is feasible
    return ContactQP([[2.0]], [4.0], [[1.0]], [100.0])


@pytest.fixture(scope="session")
def bench30():
    qp = build_benchmark(paper_spec(30))
    factor = cholesky_factorize(qp.stiffness)
    return qp, factor, default_step_size(qp, factor)


@pytest.fixture(scope="session")
def bench30_runs(bench30):
    """Solves of the (30, 10) block shared by several test modules."""
    qp, factor, alpha = bench30
    runs = {}
    for method in Method:
        runs[method, 1e-6] = solve(qp, SolverConfig(alpha=alpha, epsilon=1e-6, method=method), factor=factor)
        runs[method, 1e-8] = solve(qp, SolverConfig(alpha=alpha, epsilon=1e-8, method=method), factor=factor)
    runs["restart-history"] = solve(
        qp, SolverConfig(alpha=alpha, epsilon=1e-6, record_history=True), factor=factor
    )
    return runs


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
