"""Conforming finite element spaces on the structured meshes.

Supported families:

* ``P1``/``P2`` Lagrange on intervals and triangles. P2 uses vertex and
  edge-midpoint nodes. Dirichlet nodes are removed from the numbering, never
  penalized.
* ``RT0`` lowest-order Raviart-Thomas on triangles. One DOF per edge: the
  flux through the edge along its global normal (the low -> high tangent
  rotated clockwise). No boundary constraint.

Basis values are always returned on the physical cell (affine Piola map for
RT0).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .mesh import Mesh1D, Mesh2D, locate
from .quadrature import gauss_interval

BOUNDARY_CONDITIONS = ("none", "left-dirichlet", "both-dirichlet", "full-dirichlet")
_BC_DIM = {"left-dirichlet": 1, "both-dirichlet": 1, "full-dirichlet": 2}


@dataclass(frozen=True, eq=False)
class FunctionSpace:
    mesh: Mesh1D | Mesh2D
    family: str
    bc: str
    cell_nodes: np.ndarray  # (ncells, nloc) node/edge ids before elimination
    cell_signs: np.ndarray  # (ncells, nloc) orientation signs (all +1 for Lagrange)
    node_coords: np.ndarray | None  # Lagrange node locations
    free_index: np.ndarray  # node id -> DOF index, -1 if constrained
    ndof: int

    @property
    def degree(self) -> int:
        return {"P1": 1, "P2": 2, "RT0": 1}[self.family]

    @property
    def nloc(self) -> int:
        return self.cell_nodes.shape[1]

    @property
    def is_vector(self) -> bool:
        return self.family == "RT0"

    @property
    def cell_dofs(self) -> np.ndarray:
        return self.free_index[self.cell_nodes]

    def expand(self, coeffs) -> np.ndarray:
        """Coefficients on every node/edge, zero on constrained ones."""
        coeffs = np.asarray(coeffs, dtype=np.float64)
        if coeffs.shape != (self.ndof,):
            raise InvalidArgumentError(f"expected {self.ndof} coefficients, got {coeffs.shape}")
        full = np.zeros(self.free_index.shape[0])
        mask = self.free_index >= 0
        full[mask] = coeffs[self.free_index[mask]]
        return full


@dataclass(frozen=True, eq=False)
class ProductSpace:
    """Ordered tuple of spaces sharing one mesh; DOFs are stacked block by block."""

    components: tuple
    offsets: tuple

    @classmethod
    def of(cls, *spaces) -> "ProductSpace":
        offsets, total = [], 0
        for s in spaces:
            offsets.append(total)
            total += s.ndof
        return cls(components=tuple(spaces), offsets=tuple(offsets))

    @property
    def ndof(self) -> int:
        return sum(s.ndof for s in self.components)

    @property
    def mesh(self):
        return self.components[0].mesh

    def block(self, x, i) -> np.ndarray:
        x = np.asarray(x)
        start = self.offsets[i]
        return x[start:start + self.components[i].ndof]


@dataclass(frozen=True)
class BasisEval:
    """Local shape functions at one point.

    Lagrange: ``values`` (nloc,), ``derivatives`` gradients (nloc, dim).
    RT0: ``values`` (nloc, 2), ``derivatives`` divergences (nloc,).
    """

    values: np.ndarray
    derivatives: np.ndarray


@dataclass(frozen=True, eq=False)
class Tabulation:
    values: np.ndarray  # (ncells, nloc, nq, vdim)
    derivs: np.ndarray  # (ncells, nloc, nq, ddim)
    detj: np.ndarray  # (ncells,)
    points: np.ndarray  # (ncells, nq, dim) physical quadrature points


# ---------------------------------------------------------------- reference basis

def _ref_lagrange(dim, degree, xi):
    """Values (npts, nloc) and reference gradients (npts, nloc, dim)."""
    xi = np.atleast_2d(xi)
    if dim == 1:
        t = xi[:, 0]
        if degree == 1:
            val = np.column_stack([1.0 - t, t])
            grad = np.column_stack([-np.ones_like(t), np.ones_like(t)])
        else:
            val = np.column_stack([(1 - t) * (1 - 2 * t), t * (2 * t - 1), 4 * t * (1 - t)])
            grad = np.column_stack([4 * t - 3, 4 * t - 1, 4 - 8 * t])
        return val, grad[:, :, None]
    lam = np.column_stack([1.0 - xi[:, 0] - xi[:, 1], xi[:, 0], xi[:, 1]])
    dlam = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])
    if degree == 1:
        grad = np.broadcast_to(dlam, (xi.shape[0], 3, 2)).copy()
        return lam, grad
    vals = np.empty((xi.shape[0], 6))
    grad = np.empty((xi.shape[0], 6, 2))
    for k in range(3):
        vals[:, k] = lam[:, k] * (2 * lam[:, k] - 1)
        grad[:, k] = (4 * lam[:, k] - 1)[:, None] * dlam[k]
        a, b = (k + 1) % 3, (k + 2) % 3
        vals[:, 3 + k] = 4 * lam[:, a] * lam[:, b]
        grad[:, 3 + k] = 4 * (lam[:, a, None] * dlam[b] + lam[:, b, None] * dlam[a])
    return vals, grad


def _affine(space, cells):
    """Origin (nc, dim), Jacobian (nc, dim, dim) and |det J| for the given cells."""
    mesh = space.mesh
    if mesh.dim == 1:
        x0 = mesh.vertices[mesh.cells[cells, 0]]
        x1 = mesh.vertices[mesh.cells[cells, 1]]
        jac = (x1 - x0)[:, None, None]
        return x0[:, None], jac, np.abs(x1 - x0)
    p = mesh.vertices[mesh.triangles[cells]]
    jac = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=2)
    det = jac[:, 0, 0] * jac[:, 1, 1] - jac[:, 0, 1] * jac[:, 1, 0]
    return p[:, 0], jac, np.abs(det)


def tabulate(space: FunctionSpace, ref_points, cells=None) -> Tabulation:
    """Physical basis values and derivatives at mapped reference points, per cell."""
    mesh = space.mesh
    ref = np.atleast_2d(np.asarray(ref_points, dtype=np.float64))
    if cells is None:
        cells = np.arange(mesh.num_cells)
    cells = np.asarray(cells, dtype=np.int64)
    x0, jac, detj = _affine(space, cells)
    phys = x0[:, None, :] + np.einsum("cij,qj->cqi", jac, ref)
    signs = space.cell_signs[cells]

    if space.family == "RT0":
        tri = mesh.triangles[cells]
        verts = mesh.vertices[tri]  # (nc, 3, 2)
        area = detj / 2.0
        scale = signs / (2.0 * area[:, None])  # (nc, 3)
        diff = phys[:, None, :, :] - verts[:, :, None, :]  # (nc, 3, nq, 2)
        values = scale[:, :, None, None] * diff
        divs = np.broadcast_to(
            (signs / area[:, None])[:, :, None, None], (len(cells), 3, ref.shape[0], 1)
        ).copy()
        return Tabulation(values=values, derivs=divs, detj=detj, points=phys)

    vals, rgrad = _ref_lagrange(mesh.dim, space.degree, ref)  # (nq, nloc), (nq, nloc, dim)
    jinv_t = np.linalg.inv(jac).transpose(0, 2, 1)
    grads = np.einsum("cij,qlj->clqi", jinv_t, rgrad)
    values = np.broadcast_to(vals.T[None, :, :, None], (len(cells),) + vals.T.shape + (1,))
    return Tabulation(values=values.copy(), derivs=grads, detj=detj, points=phys)


# ---------------------------------------------------------------- constructors

def lagrange_space(mesh, degree: int, bc: str = "none") -> FunctionSpace:
    """Continuous P1 or P2 space with Dirichlet nodes removed according to ``bc``."""
    if degree not in (1, 2):
        raise InvalidArgumentError(f"Lagrange degree must be 1 or 2, got {degree!r}")
    _check_bc(mesh, bc)
    if mesh.dim == 1:
        n = mesh.n
        if degree == 1:
            coords = mesh.vertices.copy()
            cell_nodes = mesh.cells.copy()
        else:
            coords = np.arange(2 * n + 1, dtype=np.float64) / (2 * n)
            i = np.arange(n)
            cell_nodes = np.column_stack([2 * i, 2 * i + 2, 2 * i + 1])
        coords = coords[:, None]
        last = coords.shape[0] - 1
        constrained = np.zeros(coords.shape[0], dtype=bool)
        if bc in ("left-dirichlet", "both-dirichlet"):
            constrained[0] = True
        if bc == "both-dirichlet":
            constrained[last] = True
    else:
        nv = mesh.vertices.shape[0]
        if degree == 1:
            coords = mesh.vertices.copy()
            cell_nodes = mesh.triangles.copy()
            on_bnd = mesh.boundary_vertices.copy()
        else:
            mids = 0.5 * (mesh.vertices[mesh.edges[:, 0]] + mesh.vertices[mesh.edges[:, 1]])
            coords = np.vstack([mesh.vertices, mids])
            cell_nodes = np.hstack([mesh.triangles, nv + mesh.cell_edges])
            on_bnd = np.concatenate([mesh.boundary_vertices, mesh.boundary_edges])
        constrained = on_bnd if bc == "full-dirichlet" else np.zeros(coords.shape[0], bool)

    free_index = -np.ones(coords.shape[0], dtype=np.int64)
    free = np.flatnonzero(~constrained)
    free_index[free] = np.arange(free.size)
    return FunctionSpace(
        mesh=mesh,
        family=f"P{degree}",
        bc=bc,
        cell_nodes=cell_nodes.astype(np.int64),
        cell_signs=np.ones(cell_nodes.shape),
        node_coords=coords,
        free_index=free_index,
        ndof=int(free.size),
    )


def raviart_thomas_space(mesh) -> FunctionSpace:
    """Lowest-order Raviart-Thomas space on a triangle mesh, one flux DOF per edge."""
    if not isinstance(mesh, Mesh2D):
        raise InvalidArgumentError("Raviart-Thomas elements need a 2D mesh")
    tri = mesh.triangles
    # local edge k runs from vertex k+1 to k+2 (counterclockwise); +1 if that is low -> high
    a = tri[:, [1, 2, 0]]
    b = tri[:, [2, 0, 1]]
    signs = np.where(a < b, 1.0, -1.0)
    ne = mesh.edges.shape[0]
    return FunctionSpace(
        mesh=mesh,
        family="RT0",
        bc="none",
        cell_nodes=mesh.cell_edges.astype(np.int64),
        cell_signs=signs,
        node_coords=None,
        free_index=np.arange(ne, dtype=np.int64),
        ndof=ne,
    )


def _check_bc(mesh, bc):
    if bc not in BOUNDARY_CONDITIONS:
        raise InvalidArgumentError(f"unknown boundary condition {bc!r}")
    need = _BC_DIM.get(bc)
    if need is not None and need != mesh.dim:
        raise InvalidArgumentError(f"boundary condition {bc!r} does not apply to a {mesh.dim}D mesh")


# ---------------------------------------------------------------- evaluation

def eval_basis(space: FunctionSpace, cell: int, point) -> BasisEval:
    """Local shape functions of ``cell`` at a reference-cell ``point``."""
    if not 0 <= int(cell) < space.mesh.num_cells:
        raise InvalidArgumentError(f"cell {cell} out of range")
    point = np.asarray(point, dtype=np.float64).reshape(1, -1)
    if point.shape[1] != space.mesh.dim:
        raise InvalidArgumentError("reference point has the wrong dimension")
    tab = tabulate(space, point, cells=[int(cell)])
    if space.family == "RT0":
        return BasisEval(values=tab.values[0, :, 0, :], derivatives=tab.derivs[0, :, 0, 0])
    return BasisEval(values=tab.values[0, :, 0, 0], derivatives=tab.derivs[0, :, 0, :])


def _stack_field(result, npts, ncomp):
    arr = np.asarray(result, dtype=np.float64)
    if ncomp == 1:
        return np.broadcast_to(arr, (npts,)).astype(np.float64)
    if arr.shape == (ncomp, npts):
        return arr.T
    return np.broadcast_to(arr, (npts, ncomp)).astype(np.float64)


def interpolate(space, func) -> np.ndarray:
    """Coefficient vector of the canonical interpolant of ``func``.

    ``func`` takes coordinate arrays (``f(x)`` in 1D, ``f(x, y)`` in 2D). For
    RT0 it returns the two components ``(fx, fy)``. For a
    :class:`ProductSpace` pass one function per component.
    """
    if isinstance(space, ProductSpace):
        if len(func) != len(space.components):
            raise InvalidArgumentError("one function per product component is required")
        return np.concatenate([interpolate(s, f) for s, f in zip(space.components, func)])
    if space.family == "RT0":
        mesh = space.mesh
        rule = gauss_interval(5)
        t = rule.points[:, 0]
        p0 = mesh.vertices[mesh.edges[:, 0]]
        p1 = mesh.vertices[mesh.edges[:, 1]]
        pts = p0[:, None, :] + t[None, :, None] * (p1 - p0)[:, None, :]
        flat = pts.reshape(-1, 2)
        vals = _stack_field(func(flat[:, 0], flat[:, 1]), flat.shape[0], 2)
        vals = vals.reshape(pts.shape)
        normals = mesh.edge_normals()
        flux = np.einsum("eqi,ei->eq", vals, normals) @ rule.weights
        return flux * mesh.edge_lengths()
    coords = space.node_coords
    vals = _stack_field(func(*coords.T), coords.shape[0], 1)
    free = space.free_index >= 0
    out = np.empty(space.ndof)
    out[space.free_index[free]] = vals[free]
    return out


def evaluate(space: FunctionSpace, coeffs, points):
    """Values and derivatives of a discrete function at physical points.

    Returns ``(values, derivatives)`` shaped like :class:`BasisEval` fields
    with a leading point axis.
    """
    mesh = space.mesh
    pts = np.asarray(points, dtype=np.float64).reshape(-1, mesh.dim)
    cells = locate(mesh, pts)
    x0, jac, _ = _affine(space, cells)
    ref = np.einsum("cij,cj->ci", np.linalg.inv(jac), pts - x0)
    full = space.expand(coeffs)
    vals, ders = [], []
    for p in range(pts.shape[0]):
        tab = tabulate(space, ref[p], cells=[cells[p]])
        c = full[space.cell_nodes[cells[p]]]
        vals.append(np.einsum("l,l...->...", c, tab.values[0, :, 0]))
        ders.append(np.einsum("l,l...->...", c, tab.derivs[0, :, 0]))
    vals, ders = np.array(vals), np.array(ders)
    if space.family != "RT0":
        vals = vals[:, 0]
    else:
        ders = ders[:, 0]
    return vals, ders
