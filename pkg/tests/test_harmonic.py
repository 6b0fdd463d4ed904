"""P1 finite element tests: manufactured solutions, fluxes, the D matrix."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from nematic_orient import geometry, harmonic


def log_r_field(h):
    """u = log r on the annulus 1/2 < r < 1 via per-loop Dirichlet data."""
    mesh = geometry.triangulate(geometry.preset("annulus"), h)
    field = harmonic.solve_laplace(mesh, {0: 0.0, 1: np.log(0.5)})
    return mesh, field


def test_log_r_nodal_errors_decrease():
    errs = []
    for h in (0.08, 0.04, 0.02):
        mesh, field = log_r_field(h)
        exact = np.log(np.linalg.norm(mesh.nodes, axis=1))
        errs.append(np.max(np.abs(field.values - exact)))
    assert errs[0] < 2e-3
    assert errs[1] < errs[0] / 3.0
    assert errs[2] < errs[1] / 3.0


def test_log_r_energy():
    """Dirichlet energy of log r over the annulus is 2 pi log 2."""
    _, field = log_r_field(0.04)
    assert abs(harmonic.field_energy(field) - 2.0 * np.pi * np.log(2.0)) < 0.02


def test_log_r_flux():
    """Normalized flux of log r through the hole loop is exactly -1."""
    fluxes = []
    for h in (0.08, 0.04, 0.02):
        _, field = log_r_field(h)
        fluxes.append(harmonic.conormal_flux(field, 1))
    errs = np.abs(np.array(fluxes) + 1.0)
    assert errs[-1] < 1e-3
    # at least linear decrease over the refinements
    assert errs[1] < 0.6 * errs[0]
    assert errs[2] < 0.6 * errs[1]


def test_linear_functions_are_exact():
    mesh = geometry.triangulate(geometry.preset("square"), 0.15)
    exact = 0.7 * mesh.nodes[:, 0] - 1.3 * mesh.nodes[:, 1] + 0.25
    field = harmonic.solve_laplace(mesh, {0: exact[mesh.loops[0]]})
    assert_allclose(field.values, exact, atol=1e-10)
    grads = harmonic.field_gradient(mesh, field.values)
    assert_allclose(grads, np.tile([0.7, -1.3], (len(mesh.triangles), 1)), atol=1e-9)


def test_stiffness_matrix_structure():
    mesh = geometry.triangulate(geometry.preset("annulus"), 0.1)
    K = harmonic.stiffness_matrix(mesh)
    assert (abs(K - K.T) > 1e-12).nnz == 0
    # constants are in the nullspace
    assert np.max(np.abs(K @ np.ones(K.shape[0]))) < 1e-12
    w = np.linalg.eigvalsh(K.toarray())
    assert w[0] > -1e-12


def test_indicator_fields_bounds_and_bcs():
    mesh = geometry.triangulate(geometry.preset("stadium", delta=2.0), 0.1)
    h1, h2 = harmonic.indicator_fields(mesh)
    for field, own in ((h1, 1), (h2, 2)):
        assert_allclose(field.values[mesh.loops[own]], 1.0, atol=1e-12)
        assert_allclose(field.values[mesh.loops[3 - own]], 0.0, atol=1e-12)
        # discrete maximum principle (P1, Delaunay-quality mesh)
        assert field.values.min() > -1e-9 and field.values.max() < 1.0 + 1e-9


def test_assemble_D_structure():
    mesh = geometry.triangulate(geometry.preset("stadium", delta=2.0), 0.08)
    D = harmonic.assemble_D(mesh)
    assert D.shape == (2, 2)
    assert_allclose(D, D.T, atol=1e-14)
    assert np.linalg.norm(D @ np.ones(2)) < 1e-6 * np.linalg.norm(D)
    assert D[0, 0] > 0.0
    assert abs(D[0, 1] / D[0, 0] + 1.0) < 1e-2
    w = np.linalg.eigvalsh(D)
    assert w[0] > -1e-12


def test_flux_sum_identity_and_symmetry():
    """Sum of hole fluxes equals minus the outer degree; the symmetric
    stadium pins both components to the common value."""
    mesh = geometry.triangulate(geometry.preset("stadium", delta=2.0), 0.08)
    g = geometry.tangential_boundary_data(mesh, 1.0)
    flux = harmonic.compute_J(mesh, g)
    assert abs(np.sum(flux.J) + flux.outer_degree) < 0.01
    assert abs(flux.J[0] - flux.J[1]) < 1e-9
    assert flux.mismatch < 0.01
    assert_allclose(flux.J, flux.J_alt, atol=3.0 * max(flux.mismatch, 1e-12))


def test_hg_energy_positive_and_converged():
    mesh = geometry.triangulate(geometry.preset("stadium", delta=2.0), 0.08)
    g = geometry.tangential_boundary_data(mesh, 1.0)
    hg = harmonic.solve_hg(mesh, g)
    e1 = harmonic.field_energy(hg)
    assert e1 > 0.0
    mesh2 = geometry.triangulate(geometry.preset("stadium", delta=2.0), 0.04)
    g2 = geometry.tangential_boundary_data(mesh2, 1.0)
    e2 = harmonic.field_energy(harmonic.solve_hg(mesh2, g2))
    # energies converge: refinement changes the value by little
    assert abs(e1 - e2) / e2 < 0.02


def test_flux_linear_in_data():
    """J is linear in the boundary data: scaling the angular velocity of
    A(g) by an integer multiplies every flux accordingly."""
    mesh = geometry.triangulate(geometry.preset("annulus"), 0.06)
    path_t = np.linspace(0.0, 1.0, 600, endpoint=False)
    Js = []
    for k in (1, 2):
        import csv
        import io

        rows = io.StringIO()
        w = csv.writer(rows)
        w.writerow(["t", "q11", "q12"])
        for t in path_t:
            z = np.exp(2j * np.pi * (2 * k) * t)
            w.writerow([f"{t:.10g}", f"{0.5 * (z.real + 1 / 3):.12g}", f"{0.5 * z.imag:.12g}"])
        import tempfile
        import os

        fd, path = tempfile.mkstemp(suffix=".csv")
        with os.fdopen(fd, "w") as fh:
            fh.write(rows.getvalue())
        try:
            g = geometry.boundary_data_from_file(mesh, path, 1.0)
            Js.append(harmonic.compute_J(mesh, g).J.copy())
        finally:
            os.unlink(path)
    assert_allclose(Js[1], 2.0 * Js[0], atol=5e-3)


def test_compute_J_detects_broken_solve():
    mesh = geometry.triangulate(geometry.preset("annulus"), 0.1)
    g = geometry.tangential_boundary_data(mesh, 1.0)
    hg = harmonic.solve_hg(mesh, g)
    # corrupt the solution with a field carrying hole flux; the conormal
    # extraction shifts while the boundary-integral one does not
    logr = np.log(np.linalg.norm(mesh.nodes, axis=1))
    bad = harmonic.HarmonicField(
        mesh, hg.values + 5.0 * logr, hg.dirichlet_tags, hg.load, hg.residual
    )
    with pytest.raises(harmonic.FluxInconsistencyError):
        harmonic.compute_J(mesh, g, bad)
