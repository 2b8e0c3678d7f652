"""Dual ascent solvers for the contact QP.

All three methods work on the Lagrange dual ``max psi(r) s.t. r <= 0``,
whose gradient at ``r`` is the gap ``h - N u_r`` of the equilibrium
``K u_r = p + N' r``. ``K`` is factored once per solve (or once by the
caller, who may pass ``factor=``) and every iteration costs two triangular
solves.
"""

import enum
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import diagnostics
from .errors import DimensionMismatch
from .linalg import cholesky_factorize, cholesky_solve, max_singular_value, min_eigenvalue

__all__ = [
    "Method",
    "Status",
    "SolverConfig",
    "DualState",
    "SolveResult",
    "default_step_size",
    "step_size_validity_check",
    "dual_gradient",
    "project_nonpositive",
    "tau_update",
    "uzawa_solve",
    "accelerated_solve",
    "solve",
]

log = logging.getLogger(__name__)


class Method(enum.Enum):
    UZAWA = "uzawa"
    ACCELERATED = "accel"
    ACCELERATED_RESTART = "accel-restart"


class Status(enum.Enum):
    CONVERGED = "converged"
    MAX_ITER_REACHED = "max_iter_reached"


@dataclass(frozen=True)
class SolverConfig:
    """Solver parameters. ``alpha=None`` selects :func:`default_step_size`."""

    alpha: float | None = None
    epsilon: float = 1e-6
    max_iter: int = 100000
    method: Method = Method.ACCELERATED_RESTART
    record_history: bool = False

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.alpha is not None and not self.alpha > 0:
            raise ValueError("alpha must be positive")
        object.__setattr__(self, "method", Method(self.method))


@dataclass(frozen=True)
class DualState:
    r: np.ndarray
    rho: np.ndarray
    tau: float
    k: int


@dataclass
class SolveResult:
    u: np.ndarray
    r: np.ndarray
    status: Status
    iterations: int
    method: Method
    alpha: float
    history: list = field(default_factory=list)
    state: DualState | None = None
    wall_time: float = 0.0

    @property
    def converged(self):
        return self.status is Status.CONVERGED


def project_nonpositive(y):
    """Euclidean projection onto the nonpositive orthant."""
    return np.minimum(y, 0.0)


def tau_update(tau):
    """Momentum recursion: returns ``(tau_next, omega_next)``."""
    tau_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * tau * tau))
    return tau_next, (tau - 1.0) / tau_next


def dual_gradient(factor, qp, rho):
    """Equilibrium ``u`` at multipliers ``rho`` and the dual gradient ``h - N u``."""
    rho = np.asarray(rho, dtype=float)
    if rho.shape != (qp.ncon,):
        raise DimensionMismatch(f"multiplier vector has shape {rho.shape}, expected ({qp.ncon},)")
    u = cholesky_solve(factor, qp.load + qp.constraint_matrix.T @ rho)
    return u, qp.gap_offset - qp.constraint_matrix @ u


def _step_bound(qp, factor=None):
    lam = min_eigenvalue(qp.stiffness, tol=1e-8, factor=factor)
    sigma = max_singular_value(qp.constraint_matrix, tol=1e-8)
    return lam / sigma**2


def default_step_size(qp, factor=None):
    """``lambda_min(K) / sigma_max(N)**2``, half the convergence bound."""
    return _step_bound(qp, factor)


def step_size_validity_check(qp, alpha, factor=None):
    """True iff ``0 < alpha < 2 lambda_min(K) / sigma_max(N)**2``."""
    if not alpha > 0:
        return False
    return alpha < 2.0 * _step_bound(qp, factor)


def _prepare(qp, cfg, r0, factor):
    if factor is None:
        factor = cholesky_factorize(qp.stiffness)
    if r0 is None:
        r0 = np.zeros(qp.ncon)
    r0 = np.array(r0, dtype=float)
    if r0.shape != (qp.ncon,):
        raise DimensionMismatch(f"r0 has shape {r0.shape}, expected ({qp.ncon},)")
    if np.any(r0 > 0):
        raise ValueError("initial reactions must be nonpositive")
    if cfg.alpha is None:
        alpha = default_step_size(qp, factor)
    else:
        alpha = float(cfg.alpha)
        if not step_size_validity_check(qp, alpha, factor):
            log.warning("step size %g lies outside the guaranteed convergence interval", alpha)
    return factor, r0, alpha


def uzawa_solve(qp, cfg, r0=None, factor=None):
    """Classic Uzawa iteration (projected dual gradient ascent).

    Stops when ``||r_k - r_{k+1}|| <= cfg.epsilon``.
    """
    t0 = time.perf_counter()
    factor, r, alpha = _prepare(qp, cfg, r0, factor)
    history = []
    status = Status.MAX_ITER_REACHED
    k = 0
    for k in range(cfg.max_iter):
        _, gamma = dual_gradient(factor, qp, r)
        r_next = project_nonpositive(r + alpha * gamma)
        step = float(np.linalg.norm(r - r_next))
        r = r_next
        if cfg.record_history:
            history.append(diagnostics.record_iteration(factor, qp, k, r, step))
        if step <= cfg.epsilon:
            status = Status.CONVERGED
            break
    u = cholesky_solve(factor, qp.load + qp.constraint_matrix.T @ r)
    return SolveResult(
        u=u, r=r, status=status, iterations=k + 1, method=Method.UZAWA, alpha=alpha,
        history=history, state=DualState(r=r, rho=r, tau=1.0, k=k + 1),
        wall_time=time.perf_counter() - t0,
    )


def accelerated_solve(qp, cfg, r0=None, restart=True, factor=None):
    """Accelerated Uzawa iteration, optionally with adaptive restart.

    Momentum is reset whenever the dual gradient at the extrapolated point
    makes an obtuse angle with the step just taken. Stops when
    ``||rho_k - r_{k+1}|| <= cfg.epsilon``.
    """
    t0 = time.perf_counter()
    factor, r, alpha = _prepare(qp, cfg, r0, factor)
    rho = r.copy()
    tau = 1.0
    history = []
    status = Status.MAX_ITER_REACHED
    k = 0
    for k in range(cfg.max_iter):
        _, gamma = dual_gradient(factor, qp, rho)
        r_next = project_nonpositive(rho + alpha * gamma)
        tau_next, omega = tau_update(tau)
        step = float(np.linalg.norm(rho - r_next))
        delta = r_next - r
        restarted = restart and float(gamma @ delta) < 0.0
        if restarted:
            rho = r_next
            tau = 1.0
        else:
            rho = r_next + omega * delta
            tau = tau_next
        r = r_next
        if cfg.record_history:
            history.append(diagnostics.record_iteration(factor, qp, k, r, step, restarted))
        if step <= cfg.epsilon:
            status = Status.CONVERGED
            break
    u = cholesky_solve(factor, qp.load + qp.constraint_matrix.T @ r)
    method = Method.ACCELERATED_RESTART if restart else Method.ACCELERATED
    return SolveResult(
        u=u, r=r, status=status, iterations=k + 1, method=method, alpha=alpha,
        history=history, state=DualState(r=r, rho=rho, tau=tau, k=k + 1),
        wall_time=time.perf_counter() - t0,
    )


def solve(qp, cfg, r0=None, factor=None):
    """Dispatch on ``cfg.method``."""
    if cfg.method is Method.UZAWA:
        return uzawa_solve(qp, cfg, r0, factor)
    restart = cfg.method is Method.ACCELERATED_RESTART
    return accelerated_solve(qp, cfg, r0, restart=restart, factor=factor)
