"""Winding-number tests against closed-form loops."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nematic_orient import degree, tensor


def circle_loop(k, m=200, phase=0.0):
    t = np.linspace(0.0, 2.0 * np.pi, m, endpoint=False)
    return np.exp(1j * (k * t + phase))


@pytest.mark.parametrize("k", [-3, -2, -1, 0, 1, 2, 3])
def test_winding_of_power_loops(k):
    assert degree.winding_number(circle_loop(k)) == k


def test_winding_accepts_real_pairs():
    loop = circle_loop(2)
    pairs = np.stack([loop.real, loop.imag], axis=-1)
    assert degree.winding_number(pairs) == 2


def test_winding_phase_invariant():
    for phase in (0.4, 2.0, -1.3):
        assert degree.winding_number(circle_loop(-2, phase=phase)) == -2


def test_winding_ignores_magnitude():
    loop = 3.7 * circle_loop(1)
    assert degree.winding_number(loop) == 1


def test_gap_error_on_undersampled_loop():
    with pytest.raises(degree.WindingGapError):
        degree.winding_number(np.array([1.0 + 0j, -1.0 + 0j, 1j]))


def test_rejects_zero_samples():
    with pytest.raises(ValueError):
        degree.winding_number(np.array([1.0 + 0j, 0.0 + 0j, 1j]))


def test_increments_sum_matches_winding():
    loop = circle_loop(3, m=77)
    inc = degree.angular_increments(loop)
    assert abs(np.sum(inc) - 3 * 2.0 * np.pi) < 1e-10


@settings(max_examples=60, deadline=None)
@given(
    k=st.integers(min_value=-4, max_value=4),
    m=st.integers(min_value=60, max_value=300),
    seed=st.integers(min_value=0, max_value=10_000),
)
def test_winding_of_wobbling_loops(k, m, seed):
    """Smooth phase wobble never changes the degree (and the cyclic sum
    of shortest-branch increments is always an exact multiple of 2 pi)."""
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, 2.0 * np.pi, m, endpoint=False)
    wob = sum(
        rng.uniform(-0.3, 0.3) * np.sin(j * t + rng.uniform(0, 2 * np.pi))
        for j in range(1, 4)
    )
    assert degree.winding_number(np.exp(1j * (k * t + wob))) == k


def test_boundary_orientable_even_odd():
    t = np.linspace(0.0, 2.0 * np.pi, 180, endpoint=False)
    # tangent directors of a circle: one full turn, A winds twice
    tangent = np.stack([-np.sin(t), np.cos(t)], axis=-1)
    ok, deg = degree.boundary_orientable(tensor.project_planar(tangent, 1.0), 1.0)
    assert ok and deg == 2
    # directors at half the angle: A winds once, not orientable
    half = np.stack([np.cos(t / 2), np.sin(t / 2)], axis=-1)
    ok, deg = degree.boundary_orientable(tensor.project_planar(half, 1.0), 1.0)
    assert not ok and deg == 1


def test_degree_sum_convention():
    assert degree.degree_sum(2, [-1, -1]) == 0
    assert degree.degree_sum(2, [0, -2]) == 0
    assert degree.degree_sum(4, [-1, -2]) == 1
