"""Shared fixtures: the expensive meshes are built once per session."""

import numpy as np
import pytest

from nematic_orient import criterion, geometry


@pytest.fixture(scope="session")
def stadium():
    """Stadium domain at delta=2, h=0.05, with tangential boundary data."""
    mesh = geometry.triangulate(geometry.preset("stadium", delta=2.0), 0.05)
    g = geometry.tangential_boundary_data(mesh, 1.0)
    return mesh, g


@pytest.fixture(scope="session")
def stadium_report(stadium):
    mesh, g = stadium
    return criterion.analyze_mesh(mesh, g)


@pytest.fixture(scope="session")
def annulus():
    """Concentric annulus 1/2 < r < 1 at h=0.04."""
    mesh = geometry.triangulate(geometry.preset("annulus"), 0.04)
    g = geometry.tangential_boundary_data(mesh, 1.0)
    return mesh, g


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)
