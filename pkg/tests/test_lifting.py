"""Sign-propagation lifting: path lifts, whole-mesh lifts, witnesses."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from nematic_orient import degree, geometry, lifting, tensor


def directors_from_theta(theta):
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def smooth_path(rng, m):
    """A director path whose consecutive turns stay well below pi/2."""
    steps = rng.uniform(-1.0, 1.0, size=m - 1)
    theta = np.concatenate([[rng.uniform(0, 2 * np.pi)], np.cumsum(steps)])
    return directors_from_theta(theta)


def test_lift_path_recovers_smooth_directors(rng):
    n = smooth_path(rng, 40)
    q = tensor.project_planar(n, 1.0)
    lift = lifting.lift_path(q, 1.0, n[0])
    assert_allclose(lift.directors, n, atol=1e-12)
    assert lift.margin > 0.0


def test_lift_path_two_lifts_only(rng):
    n = smooth_path(rng, 25)
    q = tensor.project_planar(n, 0.7)
    plus = lifting.lift_path(q, 0.7, n[0]).directors
    minus = lifting.lift_path(q, 0.7, -n[0]).directors
    assert_allclose(minus, -plus, atol=1e-12)


def test_lift_path_rejects_wrong_initial():
    n = directors_from_theta(np.array([0.0, 0.1, 0.2]))
    q = tensor.project_planar(n, 1.0)
    with pytest.raises(lifting.InitialMismatchError):
        lifting.lift_path(q, 1.0, np.array([0.0, 1.0]))


def test_lift_path_rejects_quarter_turn_steps():
    n = directors_from_theta(np.array([0.0, np.pi / 2, np.pi]))
    q = tensor.project_planar(n, 1.0)
    with pytest.raises(lifting.StepTooLargeError):
        lifting.lift_path(q, 1.0, n[0])


def brute_force_lifts(q, s):
    """All sign assignments to the candidate directors that form a valid
    lift: every consecutive pair of directors must stay strictly within a
    quarter turn (positive dot product), matching the step bound."""
    m = len(q)
    cand = np.empty((m, 2))
    a = tensor.aux(q, s)
    half = np.angle(a) / 2.0
    cand[:, 0], cand[:, 1] = np.cos(half), np.sin(half)
    bits = ((np.arange(2**m)[:, None] >> np.arange(m)[None, :]) & 1).astype(float)
    signs = 2.0 * bits - 1.0  # (2^m, m)
    dots = np.sum(cand[1:] * cand[:-1], axis=1)  # (m-1,)
    ok = np.all(signs[:, 1:] * signs[:, :-1] * dots > 0.0, axis=1)
    return signs[ok], cand


@pytest.mark.parametrize("m", [2, 5, 11, 20])
def test_two_lift_exactness_exhaustive(m, rng):
    """Exhaustive enumeration over all 2^m sign vectors: exactly two
    valid lifts exist and they are negatives of each other."""
    n = smooth_path(rng, m)
    q = tensor.project_planar(n, 1.0)
    signs, cand = brute_force_lifts(q, 1.0)
    assert signs.shape[0] == 2
    assert_allclose(signs[0], -signs[1])
    lifted = lifting.lift_path(q, 1.0, cand[0]).directors
    assert_allclose(np.abs(np.sum(lifted * cand, axis=1)), 1.0, atol=1e-12)


def closed_loop_orientable_by_lifting(q, s):
    """Lift around the closed loop and compare the return value with the
    start: orientable iff the lift comes back with the same sign."""
    closed = np.vstack([q, q[:1]])
    a0 = tensor.aux(q[0], s)
    start = directors_from_theta(np.atleast_1d(np.angle(a0) / 2.0))[0]
    lift = lifting.lift_path(closed, s, start)
    return float(lift.directors[-1] @ lift.directors[0]) > 0.0


def test_parity_matches_path_lifting_on_random_loops(rng):
    """Parity of deg(A) agrees with closed-path sign propagation on 60
    randomized smooth line-field loops."""
    t = np.linspace(0.0, 2.0 * np.pi, 240, endpoint=False)
    for trial in range(60):
        k = int(rng.integers(-4, 5))  # deg(A) = k; director turns k/2 times
        wob = sum(
            rng.uniform(-0.25, 0.25) * np.sin(j * t + rng.uniform(0, 2 * np.pi))
            for j in range(1, 4)
        )
        theta = 0.5 * (k * t + wob)  # director angle: A = e^{2 i theta}
        q = tensor.project_planar(directors_from_theta(theta), 1.0)
        ok, deg = degree.boundary_orientable(q, 1.0)
        assert deg == k
        assert ok == (k % 2 == 0)
        assert closed_loop_orientable_by_lifting(q, 1.0) == ok


def horseshoe_samples(h=0.08):
    spec, sample = lifting.canonical_field("horseshoe")
    mesh = geometry.triangulate(spec, h)
    return mesh, sample(mesh.nodes)


def test_horseshoe_not_orientable_with_valid_witness():
    mesh, q = horseshoe_samples()
    lift = lifting.lift_field(mesh, q, 1.0)
    assert not lift.orientable
    assert lift.witness is not None and len(lift.witness) >= 3
    assert lifting.witness_sign_product(q, 1.0, lift.witness) == -1
    # the witness is a closed node cycle on the mesh
    assert lift.witness[0] != lift.witness[-1]


def test_horseshoe_boundary_parity_agrees():
    mesh, q = horseshoe_samples()
    for loop in mesh.loops:
        ok, deg = degree.boundary_orientable(q[loop], 1.0)
        assert not ok and deg % 2 == 1


def test_tangential_annulus_orientable():
    spec, sample = lifting.canonical_field("tangential_outer")
    mesh = geometry.triangulate(spec, 0.08)
    q = sample(mesh.nodes)
    lift = lifting.lift_field(mesh, q, 1.0)
    assert lift.orientable
    assert lift.witness is None
    # the directors really are square roots of the field
    assert_allclose(tensor.project_planar(lift.directors, 1.0), q, atol=1e-9)


def test_lift_restricted_to_loops_is_a_path_lift():
    """Orientability inside implies orientability along every boundary
    loop, with the restricted directors a valid closed-path lift."""
    spec, sample = lifting.canonical_field("tangential_outer")
    mesh = geometry.triangulate(spec, 0.08)
    q = sample(mesh.nodes)
    lift = lifting.lift_field(mesh, q, 1.0)
    for loop in mesh.loops:
        d = lift.directors[loop]
        again = lifting.lift_path(q[loop], 1.0, d[0])
        assert_allclose(again.directors, d, atol=1e-12)
        dots = np.sum(d * np.roll(d, -1, axis=0), axis=1)
        assert np.all(dots > 0.0)  # closes up: even degree


def test_constant_field_orientable_zero_degrees():
    spec, sample = lifting.canonical_field("constant")
    mesh = geometry.triangulate(spec, 0.1)
    q = sample(mesh.nodes)
    lift = lifting.lift_field(mesh, q, 1.0)
    assert lift.orientable
    for loop in mesh.loops:
        ok, deg = degree.boundary_orientable(q[loop], 1.0)
        assert ok and deg == 0


def test_verdict_stable_under_small_perturbations(rng):
    """Perturbing nodal values by a fraction of the margin cannot flip
    the verdict."""
    for name, expected in (("horseshoe", False), ("tangential_outer", True)):
        spec, sample = lifting.canonical_field(name)
        mesh = geometry.triangulate(spec, 0.1)
        q = sample(mesh.nodes)
        lift = lifting.lift_field(mesh, q, 1.0)
        assert lift.orientable is expected
        # rotate each nodal line by a small random angle; the Frobenius
        # perturbation |dQ| = sqrt(2)|sin(eps)| stays below 0.1 * margin
        eps = 0.5 * 0.099 * lift.margin
        half = 0.5 * np.angle(tensor.aux(q, 1.0))
        half += rng.uniform(-eps, eps, size=half.shape)
        q_pert = tensor.project_planar(directors_from_theta(half), 1.0)
        assert np.max(tensor.planar_distance(q_pert, q)) < 0.1 * lift.margin
        assert lifting.lift_field(mesh, q_pert, 1.0).orientable is expected


def test_field_lift_rejects_coarse_mesh():
    spec, sample = lifting.canonical_field("half_index")
    mesh = geometry.triangulate(spec, 0.2)
    with pytest.raises(lifting.EdgeStepTooLargeError):
        lifting.lift_field(mesh, sample(mesh.nodes), 1.0)


def test_canonical_field_values():
    _, sample = lifting.canonical_field("half_index")
    q = sample(np.array([[0.5, 0.5]]))[0]
    want = tensor.project_planar(np.array([0.5, -0.5]) / np.sqrt(0.5), 1.0)
    assert_allclose(q, want, atol=1e-12)
    _, sample = lifting.canonical_field("tangential_outer")
    phi = 0.9
    q = sample(np.array([[np.cos(phi), np.sin(phi)]]))[0]
    want = tensor.project_planar([-np.sin(phi), np.cos(phi)], 1.0)
    assert_allclose(q, want, atol=1e-12)
    with pytest.raises(ValueError):
        lifting.canonical_field("nosuch")
