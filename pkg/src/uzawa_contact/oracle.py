"""Brute-force reference solvers used to check the fast paths.

Nothing here shares code with :mod:`uzawa_contact.linalg` or
:mod:`uzawa_contact.solvers`; systems are solved with ``numpy.linalg``.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import NoFeasibleSubset, TooManyConstraints
from .problem import ContactQP

__all__ = [
    "OracleSolution",
    "active_set_solve",
    "jacobi_eigenvalues",
    "random_instance",
    "DEFAULT_SEED",
]

MAX_CONSTRAINTS = 12
DEFAULT_SEED = 20170412


@dataclass(frozen=True)
class OracleSolution:
    u: np.ndarray
    r: np.ndarray
    active_set: tuple
    optimal_value: float
    n_accepted: int


def active_set_solve(qp, tol=1e-10):
    """Solve the contact QP exactly by enumerating all active sets.

    For each subset ``A`` the equality-constrained KKT system

        [[K, N_A'], [N_A, 0]] (u, -r_A) = (p, h_A)

    is solved; a subset is accepted when ``r_A <= tol`` and ``g(u) >= -tol``.
    Singular systems are skipped. Subsets are visited by increasing size and
    the first accepted one is returned; ``n_accepted`` counts all of them.
    """
    m, d = qp.ncon, qp.dim
    if m > MAX_CONSTRAINTS:
        raise TooManyConstraints(f"m = {m} exceeds the enumeration limit {MAX_CONSTRAINTS}")
    K, p, N, h = qp.stiffness, qp.load, qp.constraint_matrix, qp.gap_offset
    best = None
    n_accepted = 0
    for size in range(m + 1):
        for A in itertools.combinations(range(m), size):
            A = list(A)
            NA = N[A]
            kkt = np.zeros((d + size, d + size))
            kkt[:d, :d] = K
            kkt[:d, d:] = NA.T
            kkt[d:, :d] = NA
            rhs = np.concatenate([p, h[A]])
            try:
                sol = np.linalg.solve(kkt, rhs)
            except np.linalg.LinAlgError:
                continue
            if not np.all(np.isfinite(sol)):
                continue
            u = sol[:d]
            r = np.zeros(m)
            r[A] = -sol[d:]
            if np.all(r <= tol) and np.all(h - N @ u >= -tol):
                n_accepted += 1
                if best is None:
                    best = (u, r, tuple(A))
    if best is None:
        raise NoFeasibleSubset("no active set satisfies the KKT conditions")
    u, r, A = best
    value = float(0.5 * u @ K @ u - p @ u)
    return OracleSolution(u=u, r=r, active_set=A, optimal_value=value, n_accepted=n_accepted)


def jacobi_eigenvalues(A, rtol=1e-12, max_sweeps=100):
    """All eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending."""
    A = np.array(A, dtype=float)
    n = A.shape[0]
    scale = np.linalg.norm(A)
    if scale == 0.0:
        return np.zeros(n)
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= rtol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(A[p, q]) <= 1e-18 * scale:
                    # negligible next to the stopping threshold
                    A[p, q] = A[q, p] = 0.0
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * A[p, q])
                t = np.sign(theta) / (abs(theta) + math.hypot(theta, 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # A <- J' A J with J the (p, q) rotation
                Ap = A[:, p].copy()
                Aq = A[:, q].copy()
                A[:, p] = c * Ap - s * Aq
                A[:, q] = s * Ap + c * Aq
                Ap = A[p, :].copy()
                Aq = A[q, :].copy()
                A[p, :] = c * Ap - s * Aq
                A[q, :] = s * Ap + c * Aq
    return np.sort(np.diag(A))


def random_instance(rng, max_dim=6, max_con=6):
    """Random strictly convex contact QP with a strictly feasible point.

    ``K`` has eigenvalues in [1, 10] and ``N`` full row rank with singular
    values in [0.5, 2], so the dual is strongly concave with a bounded
    condition number. ``h > 0`` makes ``u = 0`` strictly feasible; the load
    is large enough that some constraints are typically active. Requires
    ``m <= d`` so the optimal reactions are unique.
    """
    d = int(rng.integers(1, max_dim + 1))
    m = int(rng.integers(1, min(d, max_con) + 1))
    Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    K = Q @ np.diag(rng.uniform(1.0, 10.0, d)) @ Q.T
    K = 0.5 * (K + K.T)
    U, _ = np.linalg.qr(rng.standard_normal((m, m)))
    V, _ = np.linalg.qr(rng.standard_normal((d, m)))
    N = U @ np.diag(rng.uniform(0.5, 2.0, m)) @ V.T
    h = rng.uniform(0.1, 1.0, m)
    p = 3.0 * rng.standard_normal(d)
    return ContactQP(K, p, N, h, meta={"name": "random"})
