"""Objective values, KKT residuals and per-iteration records."""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .linalg import cholesky_solve

__all__ = [
    "KktResidual",
    "IterationRecord",
    "HISTORY_FIELDS",
    "primal_objective",
    "dual_response",
    "dual_objective",
    "kkt_residual",
    "record_iteration",
]

HISTORY_FIELDS = ("k", "dual_obj", "primal_obj", "residual_total", "step_norm", "restarted")


@dataclass(frozen=True)
class KktResidual:
    """Residual blocks of the KKT system at a primal-dual pair ``(u, r)``.

    e1 = K u - p - N' r          (force balance)
    e2 = min(g(u), 0)            (penetration)
    e3 = max(r, 0)               (adhesion)
    e4 = -diag(g(u)) r           (complementarity)
    """

    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray
    e4: np.ndarray

    @property
    def total(self):
        return float(np.linalg.norm(np.concatenate([self.e1, self.e2, self.e3, self.e4])))

    def norms(self):
        return {
            "e1": float(np.linalg.norm(self.e1)),
            "e2": float(np.linalg.norm(self.e2)),
            "e3": float(np.linalg.norm(self.e3)),
            "e4": float(np.linalg.norm(self.e4)),
            "total": self.total,
        }


@dataclass(frozen=True)
class IterationRecord:
    k: int
    dual_obj: float
    primal_obj: float
    residual_total: float
    step_norm: float
    restarted: bool

    def as_row(self):
        return (self.k, self.dual_obj, self.primal_obj, self.residual_total,
                self.step_norm, int(self.restarted))


def _check(qp, u=None, r=None):
    if u is not None and np.shape(u) != (qp.dim,):
        raise DimensionMismatch(f"u has shape {np.shape(u)}, expected ({qp.dim},)")
    if r is not None and np.shape(r) != (qp.ncon,):
        raise DimensionMismatch(f"r has shape {np.shape(r)}, expected ({qp.ncon},)")


def primal_objective(qp, u):
    u = np.asarray(u, dtype=float)
    _check(qp, u=u)
    return float(0.5 * u @ (qp.stiffness @ u) - qp.load @ u)


def dual_response(factor, qp, r):
    """Minimizer of the Lagrangian in ``u`` at fixed multipliers ``r``."""
    r = np.asarray(r, dtype=float)
    _check(qp, r=r)
    return cholesky_solve(factor, qp.load + qp.constraint_matrix.T @ r)


def _lagrangian(qp, u, r):
    return primal_objective(qp, u) + float(r @ qp.gap(u))


def dual_objective(factor, qp, r):
    """Lagrange dual function ``psi(r) = pi(u_r) + r' g(u_r)``."""
    r = np.asarray(r, dtype=float)
    return _lagrangian(qp, dual_response(factor, qp, r), r)


def kkt_residual(qp, u, r):
    u = np.asarray(u, dtype=float)
    r = np.asarray(r, dtype=float)
    _check(qp, u=u, r=r)
    g = qp.gap(u)
    return KktResidual(
        e1=qp.stiffness @ u - qp.load - qp.constraint_matrix.T @ r,
        e2=np.minimum(g, 0.0),
        e3=np.maximum(r, 0.0),
        e4=-g * r,
    )


def record_iteration(factor, qp, k, r, step_norm, restarted=False):
    """Snapshot of dual iterate ``r``, evaluated from scratch.

    The primal point is the exact Lagrangian minimizer at ``r``, not whatever
    the solver used internally, so records do not depend on solver state.
    """
    r = np.asarray(r, dtype=float)
    u = dual_response(factor, qp, r)
    return IterationRecord(
        k=int(k),
        dual_obj=_lagrangian(qp, u, r),
        primal_obj=primal_objective(qp, u),
        residual_total=kkt_residual(qp, u, r).total,
        step_norm=float(step_norm),
        restarted=bool(restarted),
    )
