"""Mesh generation and boundary data tests."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from nematic_orient import degree, geometry


def signed_area(pts):
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)


@pytest.mark.parametrize(
    "name,kwargs,n_holes",
    [
        ("disk", {}, 0),
        ("square", {}, 0),
        ("annulus", {}, 1),
        ("horseshoe", {}, 1),
        ("stadium", {"delta": 2.0}, 2),
        ("offset_annulus", {"hole_radius": 0.1}, 2),
        ("stadium_asym", {"rho": 0.1}, 2),
    ],
)
def test_preset_meshes_are_sound(name, kwargs, n_holes):
    mesh = geometry.triangulate(geometry.preset(name, **kwargs), 0.1)
    assert mesh.n_holes == n_holes
    assert len(mesh.loops) == n_holes + 1
    assert mesh.min_angle() >= 20.0
    # all triangles positively oriented
    p = mesh.nodes[mesh.triangles]
    u, v = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
    assert np.all(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0] > 0.0)
    # material on the left: outer loop counterclockwise, holes clockwise
    assert signed_area(mesh.nodes[mesh.loops[0]]) > 0.0
    for loop in mesh.loops[1:]:
        assert signed_area(mesh.nodes[loop]) < 0.0


def test_mesh_resolution_tracks_h():
    for h in (0.2, 0.1, 0.05):
        mesh = geometry.triangulate(geometry.preset("annulus"), h)
        tri = mesh.nodes[mesh.triangles]
        edges = np.concatenate(
            [tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 1], tri[:, 0] - tri[:, 2]]
        )
        assert np.max(np.linalg.norm(edges, axis=1)) < 1.75 * h


def test_stadium_mirror_symmetry():
    """Stadium meshes are exactly symmetric under y -> -y, which is what
    pins the two fluxes to a common value."""
    mesh = geometry.triangulate(geometry.preset("stadium", delta=2.0), 0.08)
    flipped = mesh.nodes * np.array([1.0, -1.0])
    order = np.lexsort((mesh.nodes[:, 1], mesh.nodes[:, 0]))
    order_f = np.lexsort((flipped[:, 1], flipped[:, 0]))
    assert_allclose(mesh.nodes[order], flipped[order_f], atol=1e-12)


def test_preset_parameter_validation():
    with pytest.raises(ValueError):
        geometry.preset("stadium", delta=1.0)
    with pytest.raises(ValueError):
        geometry.preset("offset_annulus", hole_radius=0.3)
    with pytest.raises(ValueError):
        geometry.preset("stadium_asym", rho=0.0)
    with pytest.raises(ValueError):
        geometry.preset("nosuch")
    with pytest.raises(geometry.MeshError):
        geometry.triangulate(geometry.preset("disk"), 0.0)


def test_write_read_roundtrip(tmp_path):
    mesh = geometry.triangulate(geometry.preset("stadium", delta=1.5), 0.12)
    base = str(tmp_path / "m")
    geometry.write_mesh(mesh, base)
    back = geometry.read_mesh(base)
    assert_allclose(back.nodes, mesh.nodes)
    np.testing.assert_array_equal(back.triangles, mesh.triangles)
    assert len(back.loops) == len(mesh.loops)
    for a, b in zip(back.loops, mesh.loops):
        np.testing.assert_array_equal(a, b)


def test_annulus_curvature_and_tangents():
    mesh = geometry.triangulate(geometry.preset("annulus"), 0.06)
    outer = mesh.loops[0]
    r = np.linalg.norm(mesh.nodes[outer], axis=1)
    assert_allclose(r, 1.0, atol=1e-9)
    # tangent angles: direction orthogonal to the radius on the circle
    phi = mesh.node_tangent[outer]
    t = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
    dots = np.abs(np.sum(t * mesh.nodes[outer], axis=1))
    assert np.max(dots) < 1e-9
    # signed curvature 1/r on the outer circle, -1/r on the (clockwise) hole
    assert_allclose(mesh.node_curvature[outer], 1.0, atol=1e-9)
    inner = mesh.loops[1]
    assert_allclose(mesh.node_curvature[inner], -2.0, atol=1e-9)


def test_tangential_boundary_data():
    mesh = geometry.triangulate(geometry.preset("stadium", delta=2.0), 0.08)
    g = geometry.tangential_boundary_data(mesh, 1.0)
    assert g.outer_degree == 2
    assert_allclose(np.abs(g.a), 1.0, atol=1e-9)
    # degree of A along the outer loop is exactly 2 (tangent turns once)
    outer_len = len(mesh.loops[0])
    assert degree.winding_number(g.a[:outer_len]) == 2
    # straight sides carry zero angular density
    straight = np.abs(np.abs(mesh.nodes[mesh.loops[0], 0]) - 1.0) < 1e-9
    mid = straight & (np.abs(mesh.nodes[mesh.loops[0], 1]) < 1.9)
    assert np.max(np.abs(g.density[mid])) < 1e-9


def test_boundary_data_from_file(tmp_path):
    mesh = geometry.triangulate(geometry.preset("annulus"), 0.08)
    path = tmp_path / "g.csv"
    ts = np.linspace(0.0, 1.0, 400, endpoint=False)
    a = np.exp(2j * np.pi * 3.0 * ts)  # degree 3 auxiliary data
    rows = ["t,q11,q12"]
    for t, z in zip(ts, a):
        rows.append(f"{t:.10g},{0.5 * (z.real + 1 / 3):.12g},{0.5 * z.imag:.12g}")
    path.write_text("\n".join(rows) + "\n")
    g = geometry.boundary_data_from_file(mesh, str(path), 1.0)
    assert g.outer_degree == 3
    outer = mesh.loops[0]
    theta = np.arctan2(mesh.nodes[outer, 1], mesh.nodes[outer, 0])
    assert_allclose(g.a[: len(outer)], np.exp(3j * theta), atol=0.02)
