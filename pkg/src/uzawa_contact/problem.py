"""The contact QP: minimize ``u'Ku/2 - p'u`` subject to ``h - N u >= 0``."""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch
from .linalg import as_dense_matrix, as_sym_matrix

__all__ = ["ContactQP", "spring_instance"]


@dataclass(frozen=True)
class ContactQP:
    """Discretized frictionless contact problem.

    Attributes
    ----------
    stiffness : (d, d) ndarray
        Symmetric positive definite stiffness matrix ``K``.
    load : (d,) ndarray
        External nodal force vector ``p``.
    constraint_matrix : (m, d) ndarray
        ``N`` in the linearized gap ``g(u) = h - N u``.
    gap_offset : (m,) ndarray
        ``h``.
    meta : dict
        Free-form provenance (e.g. the generating benchmark parameters).
    """

    stiffness: np.ndarray
    load: np.ndarray
    constraint_matrix: np.ndarray
    gap_offset: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        K = as_sym_matrix(self.stiffness)
        N = as_dense_matrix(self.constraint_matrix)
        p = np.array(self.load, dtype=float).reshape(-1)
        h = np.array(self.gap_offset, dtype=float).reshape(-1)
        d, m = K.shape[0], N.shape[0]
        if p.shape[0] != d:
            raise DimensionMismatch(f"load has length {p.shape[0]}, expected d = {d}")
        if N.shape[1] != d:
            raise DimensionMismatch(f"constraint matrix has {N.shape[1]} columns, expected d = {d}")
        if h.shape[0] != m:
            raise DimensionMismatch(f"gap offset has length {h.shape[0]}, expected m = {m}")
        p.flags.writeable = False
        h.flags.writeable = False
        object.__setattr__(self, "stiffness", K)
        object.__setattr__(self, "constraint_matrix", N)
        object.__setattr__(self, "load", p)
        object.__setattr__(self, "gap_offset", h)

    @property
    def dim(self):
        return self.stiffness.shape[0]

    @property
    def ncon(self):
        return self.constraint_matrix.shape[0]

    def gap(self, u):
        return self.gap_offset - self.constraint_matrix @ u


def spring_instance():
    """One spring of stiffness 2 loaded by 4 against a stop at 1.5.

    Exact solution: ``u = 1.5``, reaction ``r = -1``.
    """
    return ContactQP([[2.0]], [4.0], [[1.0]], [1.5], meta={"name": "spring"})
