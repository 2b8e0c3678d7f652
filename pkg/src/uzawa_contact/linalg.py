"""Dense linear algebra kernel.

Matrices are plain ``numpy`` arrays in C (row-major) order. A symmetric
matrix is stored as the full square array; only its lower triangle is read
by :func:`cholesky_factorize`.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DimensionMismatch, NoConvergence, NotPositiveDefinite, ZeroMatrix

__all__ = [
    "CholeskyFactor",
    "as_sym_matrix",
    "as_dense_matrix",
    "cholesky_factorize",
    "cholesky_solve",
    "min_eigenvalue",
    "max_singular_value",
    "matvec",
    "matvec_transpose",
]

PIVOT_RTOL = 1e-14
_BLOCK = 64


def _frozen(a):
    a = np.array(a, dtype=float, order="C")
    a.flags.writeable = False
    return a


def as_sym_matrix(A):
    """Validate and return ``A`` as an immutable square symmetric array."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {A.shape}")
    if not np.array_equal(A, A.T):
        raise ValueError("matrix is not exactly symmetric")
    return _frozen(A)


def as_dense_matrix(M):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] < 1 or M.shape[1] < 1:
        raise DimensionMismatch(f"expected a non-empty 2-D matrix, got shape {M.shape}")
    return _frozen(M)


@dataclass(frozen=True)
class CholeskyFactor:
    """Lower-triangular factor ``L`` with ``A = L @ L.T``."""

    lower: np.ndarray

    @property
    def dim(self):
        return self.lower.shape[0]


def _factor_block(A, offset, tol):
    # Unblocked left-looking Cholesky of a small diagonal block, in place.
    n = A.shape[0]
    for j in range(n):
        row = A[j, :j]
        pivot = A[j, j] - row @ row
        if pivot <= tol:
            raise NotPositiveDefinite(offset + j, pivot)
        A[j, j] = np.sqrt(pivot)
        if j + 1 < n:
            A[j + 1:, j] = (A[j + 1:, j] - A[j + 1:, :j] @ row) / A[j, j]
        A[j, j + 1:] = 0.0


def cholesky_factorize(A):
    """Factor a symmetric positive definite matrix as ``L L^T``.

    Blocked right-looking variant: diagonal blocks are factored column by
    column, panels by triangular solves and the trailing matrix by a
    rank-``b`` update, so the bulk of the work runs as matrix products.

    Raises
    ------
    NotPositiveDefinite
        If a pivot is ``<= 1e-14 * max(diag(A))``.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {A.shape}")
    n = A.shape[0]
    tol = PIVOT_RTOL * max(float(np.max(np.diag(A))), 0.0)
    L = np.tril(A).copy()
    for k in range(0, n, _BLOCK):
        e = min(k + _BLOCK, n)
        _factor_block(L[k:e, k:e], k, tol)
        if e < n:
            # panel: L21 = A21 L11^{-T}
            L[e:, k:e] = solve_triangular(
                L[k:e, k:e], L[e:, k:e].T, lower=True, check_finite=False
            ).T
            panel = L[e:, k:e]
            L[e:, e:] -= np.tril(panel @ panel.T)
    return CholeskyFactor(_frozen(L))


def cholesky_solve(F, b):
    """Solve ``L L^T x = b`` by forward then backward substitution."""
    b = np.asarray(b, dtype=float)
    if b.shape[0] != F.dim:
        raise DimensionMismatch(f"rhs has length {b.shape[0]}, factor has dim {F.dim}")
    y = solve_triangular(F.lower, b, lower=True, check_finite=False)
    return solve_triangular(F.lower, y, lower=True, trans="T", check_finite=False)


def matvec(M, x):
    M = np.asarray(M)
    x = np.asarray(x, dtype=float)
    if M.shape[1] != x.shape[0]:
        raise DimensionMismatch(f"cannot multiply {M.shape} matrix by vector of length {x.shape[0]}")
    return M @ x


def matvec_transpose(N, y):
    N = np.asarray(N)
    y = np.asarray(y, dtype=float)
    if N.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"cannot multiply transpose of {N.shape} matrix by vector of length {y.shape[0]}")
    return N.T @ y


def _start_vector(n, perturb=False):
    x = np.ones(n)
    if perturb:
        x[0] += 1e-3
    return x / np.linalg.norm(x)


def _dominant_rayleigh(apply, rayleigh, n, tol, max_iter):
    """Power iteration for the dominant eigenvalue of a symmetric operator.

    ``apply`` maps the iterate forward; ``rayleigh`` turns a unit vector into
    the eigenvalue estimate being returned. Stops once two successive
    estimates agree to ``tol`` relative.
    """
    for perturb in (False, True):
        x = _start_vector(n, perturb)
        lam = None
        stalled = False
        for _ in range(max_iter):
            y = apply(x)
            ny = np.linalg.norm(y)
            if ny == 0.0:
                stalled = True
                break
            x = y / ny
            lam_new = rayleigh(x)
            if lam is not None and abs(lam_new - lam) <= tol * abs(lam_new):
                return lam_new
            lam = lam_new
        if not stalled:
            raise NoConvergence(max_iter)
    raise NoConvergence(max_iter)


def min_eigenvalue(A, tol=1e-8, max_iter=10000, factor=None):
    """Smallest eigenvalue of an SPD matrix by inverse power iteration.

    Each step is one :func:`cholesky_solve`; ``factor`` may be supplied to
    reuse an existing factorization of ``A``.
    """
    A = np.asarray(A, dtype=float)
    if factor is None:
        factor = cholesky_factorize(A)
    return _dominant_rayleigh(
        lambda x: cholesky_solve(factor, x),
        lambda x: float(x @ (A @ x)),
        A.shape[0],
        tol,
        max_iter,
    )


def max_singular_value(N, tol=1e-8, max_iter=10000):
    """Largest singular value of ``N`` via power iteration on ``N N^T``."""
    N = np.asarray(N, dtype=float)
    if N.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {N.shape}")
    if not np.any(N):
        raise ZeroMatrix("constraint matrix is identically zero")
    G = N @ N.T
    lam = _dominant_rayleigh(
        lambda x: G @ x,
        lambda x: float(x @ (G @ x)),
        G.shape[0],
        tol,
        max_iter,
    )
    return float(np.sqrt(lam))
