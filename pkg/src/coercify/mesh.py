"""Structured meshes of the unit interval and the unit square.

Meshes are immutable after construction. Refinement halves ``h`` and yields
the mesh a direct call with ``2n`` would produce, so discrete spaces built on
successive levels are nested.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError


def _frozen(a, dtype):
    a = np.ascontiguousarray(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Mesh1D:
    """Uniform partition of [0, 1] into ``n`` cells.

    ``boundary`` maps ``"left"``/``"right"`` to the vertex index at x=0/x=1.
    """

    n: int
    vertices: np.ndarray
    cells: np.ndarray
    boundary: dict = field(default_factory=dict)

    dim = 1

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def num_cells(self) -> int:
        return self.cells.shape[0]

    def cell_measures(self) -> np.ndarray:
        return self.vertices[self.cells[:, 1]] - self.vertices[self.cells[:, 0]]

    def to_dict(self) -> dict:
        return {
            "dim": 1,
            "n": self.n,
            "h": self.h,
            "vertices": self.vertices.tolist(),
            "cells": self.cells.tolist(),
            "boundary_vertices": {k: int(v) for k, v in self.boundary.items()},
        }


@dataclass(frozen=True, eq=False)
class Mesh2D:
    """Uniform right-triangle mesh of the unit square.

    Each of the ``n x n`` squares is cut along the diagonal from its lower-left
    to its upper-right corner. Triangles are counterclockwise. ``edges`` hold
    vertex pairs ordered low -> high index; ``cell_edges[t, k]`` is the edge
    opposite local vertex ``k`` of triangle ``t``.
    """

    n: int
    vertices: np.ndarray
    triangles: np.ndarray
    edges: np.ndarray
    cell_edges: np.ndarray
    boundary_vertices: np.ndarray
    boundary_edges: np.ndarray

    dim = 2

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def cells(self) -> np.ndarray:
        return self.triangles

    @property
    def num_cells(self) -> int:
        return self.triangles.shape[0]

    def signed_areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def cell_measures(self) -> np.ndarray:
        return self.signed_areas()

    def edge_lengths(self) -> np.ndarray:
        d = self.vertices[self.edges[:, 1]] - self.vertices[self.edges[:, 0]]
        return np.hypot(d[:, 0], d[:, 1])

    def edge_normals(self) -> np.ndarray:
        """Unit normals: the edge tangent (low -> high) rotated clockwise."""
        d = self.vertices[self.edges[:, 1]] - self.vertices[self.edges[:, 0]]
        length = np.hypot(d[:, 0], d[:, 1])
        return np.column_stack([d[:, 1], -d[:, 0]]) / length[:, None]

    def to_dict(self) -> dict:
        return {
            "dim": 2,
            "n": self.n,
            "h": self.h,
            "vertices": self.vertices.tolist(),
            "triangles": self.triangles.tolist(),
            "edges": self.edges.tolist(),
            "boundary_vertices": np.flatnonzero(self.boundary_vertices).tolist(),
            "boundary_edges": np.flatnonzero(self.boundary_edges).tolist(),
        }


def uniform_interval_mesh(n: int) -> Mesh1D:
    """Mesh of [0, 1] with ``n`` equal cells; vertex ``i`` sits at ``i/n``."""
    n = _check_n(n)
    vertices = np.arange(n + 1, dtype=np.float64) / n
    cells = np.column_stack([np.arange(n), np.arange(1, n + 1)])
    return Mesh1D(
        n=n,
        vertices=_frozen(vertices, np.float64),
        cells=_frozen(cells, np.int64),
        boundary={"left": 0, "right": n},
    )


def uniform_triangle_mesh(n: int) -> Mesh2D:
    """Mesh of the unit square with ``2 n**2`` triangles and ``(n+1)**2`` vertices.

    Vertex ``(i, j)`` (column ``i``, row ``j``) has index ``j*(n+1) + i``.
    """
    n = _check_n(n)
    ticks = np.arange(n + 1, dtype=np.float64) / n
    xx, yy = np.meshgrid(ticks, ticks)
    vertices = np.column_stack([xx.ravel(), yy.ravel()])

    i, j = np.meshgrid(np.arange(n), np.arange(n))
    i, j = i.ravel(), j.ravel()
    v00 = j * (n + 1) + i
    v10 = v00 + 1
    v01 = v00 + n + 1
    v11 = v01 + 1
    lower = np.column_stack([v00, v10, v11])
    upper = np.column_stack([v00, v11, v01])
    triangles = np.empty((2 * n * n, 3), dtype=np.int64)
    triangles[0::2] = lower
    triangles[1::2] = upper

    local = np.stack(
        [triangles[:, [1, 2]], triangles[:, [2, 0]], triangles[:, [0, 1]]], axis=1
    )
    pairs = np.sort(local.reshape(-1, 2), axis=1)
    keys = pairs[:, 0] * vertices.shape[0] + pairs[:, 1]
    uniq, first, inverse, counts = np.unique(
        keys, return_index=True, return_inverse=True, return_counts=True
    )
    edges = pairs[first]
    cell_edges = inverse.reshape(-1, 3)

    on_bnd = (
        (vertices[:, 0] == 0.0)
        | (vertices[:, 0] == 1.0)
        | (vertices[:, 1] == 0.0)
        | (vertices[:, 1] == 1.0)
    )
    return Mesh2D(
        n=n,
        vertices=_frozen(vertices, np.float64),
        triangles=_frozen(triangles, np.int64),
        edges=_frozen(edges, np.int64),
        cell_edges=_frozen(cell_edges, np.int64),
        boundary_vertices=_frozen(on_bnd, bool),
        boundary_edges=_frozen(counts == 1, bool),
    )


def refine(mesh):
    """Uniform refinement: every cell is split so that ``h`` halves."""
    if isinstance(mesh, Mesh1D):
        return uniform_interval_mesh(2 * mesh.n)
    if isinstance(mesh, Mesh2D):
        return uniform_triangle_mesh(2 * mesh.n)
    raise InvalidArgumentError(f"not a mesh: {type(mesh).__name__}")


def unit_mesh(dim: int, n: int):
    """Interval mesh for ``dim == 1``, triangle mesh for ``dim == 2``."""
    if dim == 1:
        return uniform_interval_mesh(n)
    if dim == 2:
        return uniform_triangle_mesh(n)
    raise InvalidArgumentError(f"unsupported dimension {dim}")


def locate(mesh, points) -> np.ndarray:
    """Index of a cell containing each point (closed cells; ties go to the lower index)."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    n = mesh.n
    if mesh.dim == 1:
        x = pts.reshape(-1)
        return np.clip(np.floor(x * n).astype(np.int64), 0, n - 1)
    x, y = pts[:, 0], pts[:, 1]
    i = np.clip(np.floor(x * n).astype(np.int64), 0, n - 1)
    j = np.clip(np.floor(y * n).astype(np.int64), 0, n - 1)
    upper = (y * n - j) > (x * n - i)
    return 2 * (j * n + i) + upper.astype(np.int64)


def write_json(mesh, path) -> None:
    """Dump a mesh for debugging (schema in the README)."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(mesh.to_dict(), fh)


def _check_n(n) -> int:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidArgumentError(f"cell count must be a positive integer, got {n!r}")
    return int(n)
