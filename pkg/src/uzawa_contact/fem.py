"""Plane-stress Q4 benchmark: a rectangular block on a rigid floor.

Units are N, mm and MPa throughout.

Mesh layout
-----------
Nodes sit on a regular ``(nx + 1) x (ny + 1)`` grid. Node ``(i, j)`` is at
``x = i * width / nx``, ``y = j * height / ny`` and has global number
``i * (ny + 1) + j`` (x-major: all nodes of column ``i = 0`` first, bottom to
top). Each node carries two DOFs, horizontal then vertical.

The left column ``i = 0`` is clamped and removed from the system, so the free
DOFs are those of nodes ``i >= 1`` in the same order:
``free_dof(i, j, c) = 2 * ((i - 1) * (ny + 1) + j) + c``.

Contact candidates are the bottom nodes ``(i, 0)`` for ``i = 1..nx``; row
``i - 1`` of ``N`` holds ``-1`` at their vertical DOF and ``h = 0``, so the
gap equals the vertical displacement.
"""

from dataclasses import asdict, dataclass

import numpy as np

from .errors import DegenerateElement, InvalidMeshRatio
from .problem import ContactQP

__all__ = [
    "BenchmarkSpec",
    "paper_spec",
    "plane_stress_matrix",
    "q4_element_stiffness",
    "free_dof",
    "free_node_coords",
    "edge_loads",
    "build_benchmark",
]

_G = 1.0 / np.sqrt(3.0)
GAUSS_2X2 = ((-_G, -_G), (_G, -_G), (_G, _G), (-_G, _G))


@dataclass(frozen=True)
class BenchmarkSpec:
    """Geometry, material and loading of the block.

    ``top_traction`` acts downward on the top edge. ``right_traction`` acts
    on the right edge along ``right_traction_axis``: ``"x"`` pulls the edge
    outward (+x), ``"y"`` pushes it upward (+y). Tractions are in MPa.
    """

    nx: int
    ny: int
    width: float = 60.0
    height: float = 20.0
    thickness: float = 5.0
    youngs_modulus: float = 200000.0
    poisson_ratio: float = 0.3
    top_traction: float = 0.05
    right_traction: float = 0.5
    right_traction_axis: str = "x"

    def __post_init__(self):
        if int(self.nx) != self.nx or int(self.ny) != self.ny or self.nx < 1 or self.ny < 1:
            raise ValueError(f"nx and ny must be positive integers, got ({self.nx}, {self.ny})")
        for name in ("width", "height", "thickness", "youngs_modulus"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.right_traction_axis not in ("x", "y"):
            raise ValueError("right_traction_axis must be 'x' or 'y'")
        if not 0.0 <= self.poisson_ratio < 0.5:
            raise ValueError("poisson_ratio must lie in [0, 0.5)")


def paper_spec(nx):
    """Reference block with ``ny = nx / 3`` elements in height."""
    if nx < 3 or nx % 3:
        raise InvalidMeshRatio(f"nx must be a positive multiple of 3, got {nx}")
    return BenchmarkSpec(nx=nx, ny=nx // 3)


def plane_stress_matrix(E, nu):
    return E / (1.0 - nu**2) * np.array(
        [[1.0, nu, 0.0], [nu, 1.0, 0.0], [0.0, 0.0, 0.5 * (1.0 - nu)]]
    )


def _shape_derivatives(xi, eta):
    dxi = 0.25 * np.array([-(1 - eta), (1 - eta), (1 + eta), -(1 + eta)])
    deta = 0.25 * np.array([-(1 - xi), -(1 + xi), (1 + xi), (1 - xi)])
    return np.vstack([dxi, deta])


def q4_element_stiffness(E, nu, t, node_coords):
    """8x8 stiffness of a bilinear quadrilateral, 2x2 Gauss quadrature.

    ``node_coords`` is (4, 2), corners counterclockwise. DOF order is
    ``(u1, v1, u2, v2, u3, v3, u4, v4)``.
    """
    xy = np.asarray(node_coords, dtype=float)
    D = plane_stress_matrix(E, nu)
    Ke = np.zeros((8, 8))
    for xi, eta in GAUSS_2X2:
        dN = _shape_derivatives(xi, eta)
        J = dN @ xy
        detJ = np.linalg.det(J)
        if detJ <= 0.0:
            raise DegenerateElement(f"non-positive Jacobian {detJ:.3e} for corners {xy.tolist()}")
        dNdx = np.linalg.solve(J, dN)
        B = np.zeros((3, 8))
        B[0, 0::2] = dNdx[0]
        B[1, 1::2] = dNdx[1]
        B[2, 0::2] = dNdx[1]
        B[2, 1::2] = dNdx[0]
        Ke += t * detJ * (B.T @ D @ B)
    return 0.5 * (Ke + Ke.T)


def _node(spec, i, j):
    return i * (spec.ny + 1) + j


def free_dof(spec, i, j, c):
    """Index of component ``c`` (0 horizontal, 1 vertical) of node ``(i, j)``."""
    if i < 1:
        raise ValueError("left-edge nodes are clamped and have no free DOF")
    return 2 * ((i - 1) * (spec.ny + 1) + j) + c


def free_node_coords(spec):
    """(nx * (ny + 1), 2) coordinates of the unclamped nodes in DOF order."""
    i, j = np.meshgrid(np.arange(1, spec.nx + 1), np.arange(spec.ny + 1), indexing="ij")
    return np.column_stack(
        [i.ravel() * spec.width / spec.nx, j.ravel() * spec.height / spec.ny]
    )


def edge_loads(spec):
    """Nodal forces of each loaded edge on the full (unreduced) DOF set.

    Returns ``{"top": f_top, "right": f_right}``. A uniform traction on a
    straight two-node edge puts half of the edge resultant on each node.
    """
    ndof = 2 * (spec.nx + 1) * (spec.ny + 1)
    top = np.zeros(ndof)
    dx = spec.width / spec.nx
    for i in range(spec.nx):
        share = 0.5 * spec.top_traction * spec.thickness * dx
        for a in (i, i + 1):
            top[2 * _node(spec, a, spec.ny) + 1] -= share
    right = np.zeros(ndof)
    c = 0 if spec.right_traction_axis == "x" else 1
    dy = spec.height / spec.ny
    for j in range(spec.ny):
        share = 0.5 * spec.right_traction * spec.thickness * dy
        for b in (j, j + 1):
            right[2 * _node(spec, spec.nx, b) + c] += share
    return {"top": top, "right": right}


def build_benchmark(spec):
    """Assemble the contact QP for ``spec`` (see module docstring for layout)."""
    nx, ny = spec.nx, spec.ny
    ndof = 2 * (nx + 1) * (ny + 1)
    dx, dy = spec.width / nx, spec.height / ny

    # every element is the same rectangle
    Ke = q4_element_stiffness(
        spec.youngs_modulus,
        spec.poisson_ratio,
        spec.thickness,
        [[0.0, 0.0], [dx, 0.0], [dx, dy], [0.0, dy]],
    )
    K = np.zeros((ndof, ndof))
    for i in range(nx):
        for j in range(ny):
            nodes = [_node(spec, i, j), _node(spec, i + 1, j),
                     _node(spec, i + 1, j + 1), _node(spec, i, j + 1)]
            dofs = np.array([[2 * n, 2 * n + 1] for n in nodes]).ravel()
            K[np.ix_(dofs, dofs)] += Ke

    loads = edge_loads(spec)
    f = loads["top"] + loads["right"]

    free = np.arange(2 * (ny + 1), ndof)
    Kf = K[np.ix_(free, free)]
    Kf = 0.5 * (Kf + Kf.T)
    d = free.size

    N = np.zeros((nx, d))
    for i in range(1, nx + 1):
        N[i - 1, free_dof(spec, i, 0, 1)] = -1.0
    h = np.zeros(nx)

    return ContactQP(Kf, f[free], N, h, meta={"spec": asdict(spec)})
