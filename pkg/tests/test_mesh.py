import json

import numpy as np
import pytest

from coercify.errors import InvalidArgumentError
from coercify.mesh import (
    locate,
    refine,
    uniform_interval_mesh,
    uniform_triangle_mesh,
    unit_mesh,
    write_json,
)


@pytest.mark.parametrize("n", [1, 3, 8])
def test_interval_counts(n):
    m = uniform_interval_mesh(n)
    assert m.vertices.shape == (n + 1,)
    assert m.num_cells == n
    assert m.h == 1.0 / n
    assert m.boundary == {"left": 0, "right": n}
    assert np.allclose(m.cell_measures(), 1.0 / n)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_triangle_counts(n):
    m = uniform_triangle_mesh(n)
    assert m.vertices.shape == ((n + 1) ** 2, 2)
    assert m.num_cells == 2 * n * n
    # Euler: V - E + F = 1 for a disk
    assert m.vertices.shape[0] - m.edges.shape[0] + m.num_cells == 1
    assert m.boundary_edges.sum() == 4 * n
    assert m.boundary_vertices.sum() == 4 * n


def test_triangles_positively_oriented_and_cover_square():
    m = uniform_triangle_mesh(4)
    areas = m.signed_areas()
    assert np.all(areas > 0)
    assert areas.sum() == pytest.approx(1.0, abs=1e-15)


def test_cell_edges_are_opposite_vertices():
    m = uniform_triangle_mesh(3)
    for t, tri in enumerate(m.triangles):
        for k in range(3):
            e = m.edges[m.cell_edges[t, k]]
            assert tri[k] not in e
            assert set(e) == {tri[(k + 1) % 3], tri[(k + 2) % 3]}


def test_edge_normals_are_unit_and_clockwise():
    m = uniform_triangle_mesh(2)
    nrm = m.edge_normals()
    assert np.allclose(np.hypot(nrm[:, 0], nrm[:, 1]), 1.0)
    t = m.vertices[m.edges[:, 1]] - m.vertices[m.edges[:, 0]]
    assert np.allclose(np.einsum("ij,ij->i", nrm, t), 0.0)
    # clockwise rotation: cross(t, n) < 0
    assert np.all(t[:, 0] * nrm[:, 1] - t[:, 1] * nrm[:, 0] < 0)


def test_boundary_edges_lie_on_boundary():
    m = uniform_triangle_mesh(3)
    mid = 0.5 * (m.vertices[m.edges[:, 0]] + m.vertices[m.edges[:, 1]])
    on = np.isclose(mid, 0.0).any(axis=1) | np.isclose(mid, 1.0).any(axis=1)
    assert np.array_equal(on, m.boundary_edges)


def test_refine_halves_h_and_nests_vertices():
    for m in (uniform_interval_mesh(3), uniform_triangle_mesh(3)):
        f = refine(m)
        assert f.h == m.h / 2
        coarse = {tuple(np.atleast_1d(v)) for v in m.vertices}
        fine = {tuple(np.atleast_1d(v)) for v in f.vertices}
        assert coarse <= fine


def test_refined_triangles_lie_inside_coarse_ones():
    m = uniform_triangle_mesh(2)
    f = refine(m)
    centroids = f.vertices[f.triangles].mean(axis=1)
    parent = locate(m, centroids)
    for c, p in zip(centroids, parent):
        tri = m.vertices[m.triangles[p]]
        # barycentric coordinates of the child centroid in the parent
        mat = np.column_stack([tri[1] - tri[0], tri[2] - tri[0]])
        lam = np.linalg.solve(mat, c - tri[0])
        assert lam.min() > 0 and lam.sum() < 1


def test_locate_returns_containing_cell():
    m = uniform_triangle_mesh(5)
    rng = np.random.default_rng(0)
    pts = rng.uniform(0, 1, (200, 2))
    cells = locate(m, pts)
    for p, c in zip(pts, cells):
        tri = m.vertices[m.triangles[c]]
        mat = np.column_stack([tri[1] - tri[0], tri[2] - tri[0]])
        lam = np.linalg.solve(mat, p - tri[0])
        assert lam.min() >= -1e-12 and lam.sum() <= 1 + 1e-12
    m1 = uniform_interval_mesh(4)
    assert list(locate(m1, np.array([[0.0], [0.3], [1.0]]))) == [0, 1, 3]


@pytest.mark.parametrize("bad", [0, -2, 1.5, True])
def test_invalid_n_rejected(bad):
    with pytest.raises(InvalidArgumentError):
        uniform_interval_mesh(bad)
    with pytest.raises(InvalidArgumentError):
        uniform_triangle_mesh(bad)


def test_unit_mesh_dimension_checked():
    with pytest.raises(InvalidArgumentError):
        unit_mesh(3, 2)
    with pytest.raises(InvalidArgumentError):
        refine("mesh")


def test_mesh_arrays_are_read_only():
    m = uniform_triangle_mesh(2)
    with pytest.raises(ValueError):
        m.vertices[0, 0] = 5.0


def test_json_dump(tmp_path):
    m = uniform_triangle_mesh(2)
    path = tmp_path / "mesh.json"
    write_json(m, path)
    data = json.loads(path.read_text())
    assert data["dim"] == 2 and data["n"] == 2
    assert len(data["triangles"]) == 8
    assert len(data["boundary_edges"]) == 8
    d1 = uniform_interval_mesh(3).to_dict()
    assert d1["boundary_vertices"] == {"left": 0, "right": 3}
