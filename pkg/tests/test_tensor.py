"""Tests for the Q-tensor algebra: projections, the auxiliary map, and
elastic-constant conversions."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from nematic_orient import tensor


def unit2(theta):
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def test_project_planar_matches_full_projection():
    thetas = np.linspace(0.0, 2.0 * np.pi, 17)
    for s in (1.0, 0.7, -0.4):
        n3 = np.stack([np.cos(thetas), np.sin(thetas), np.zeros_like(thetas)], axis=-1)
        Q = tensor.project(n3, s)
        q = tensor.project_planar(unit2(thetas), s)
        assert_allclose(q[..., 0], Q[..., 0, 0], atol=1e-14)
        assert_allclose(q[..., 1], Q[..., 0, 1], atol=1e-14)


def test_project_sign_invariance():
    n = unit2(np.array([0.3, 1.1, 4.0]))
    assert_allclose(
        tensor.project_planar(n, 0.8), tensor.project_planar(-n, 0.8), atol=1e-15
    )


def test_project_validates_inputs():
    with pytest.raises(ValueError):
        tensor.project_planar([1.0, 1.0], 1.0)  # not unit
    with pytest.raises(ValueError):
        tensor.project_planar([1.0, 0.0], 0.0)  # s = 0
    with pytest.raises(ValueError):
        tensor.project_planar([1.0, 0.0], 1.5)  # s out of range
    with pytest.raises(ValueError):
        tensor.project([1.0, 0.0], 1.0)  # needs 3 components


def test_planar_to_full_traceless_symmetric():
    q = tensor.project_planar(unit2(0.77), 0.9)
    Q = tensor.planar_to_full(q, 0.9)
    assert_allclose(Q, Q.T, atol=1e-15)
    assert abs(np.trace(Q)) < 1e-15
    assert_allclose(Q, tensor.project([np.cos(0.77), np.sin(0.77), 0.0], 0.9), atol=1e-15)


def test_planar_distance_is_frobenius_distance():
    qa = tensor.project_planar(unit2(0.2), 1.0)
    qb = tensor.project_planar(unit2(1.9), 1.0)
    full = np.linalg.norm(tensor.planar_to_full(qa, 1.0) - tensor.planar_to_full(qb, 1.0))
    assert_allclose(tensor.planar_distance(qa, qb), full, rtol=1e-13)


def test_extract_director_roundtrip():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = rng.normal(size=3)
        n /= np.linalg.norm(n)
        for s in (1.0, -0.5, 0.31):
            Q = tensor.project(n, s)
            assert tensor.is_uniaxial(Q, s)
            m = tensor.extract_director(Q, s)
            # director defined up to sign only
            assert min(np.linalg.norm(m - n), np.linalg.norm(m + n)) < 1e-8


def test_extract_director_canonical_sign():
    n = np.array([0.6, -0.8, 0.0])
    Q = tensor.project(n, 1.0)
    m1 = tensor.extract_director(Q, 1.0)
    m2 = tensor.extract_director(tensor.project(-n, 1.0), 1.0)
    assert_allclose(m1, m2, atol=1e-12)


def test_is_uniaxial_rejects_biaxial():
    Q = np.diag([0.5, -0.2, -0.3])  # traceless, distinct eigenvalues
    assert not tensor.is_uniaxial(Q, 1.0)


def test_aux_doubles_the_angle():
    """A(Q) = (n1 + i n2)^2 = e^{2 i theta} for n = (cos theta, sin theta)."""
    thetas = np.linspace(0.0, 2.0 * np.pi, 41)
    for s in (1.0, 0.6, -0.3):
        a = tensor.aux(tensor.project_planar(unit2(thetas), s), s)
        assert_allclose(np.abs(a), 1.0, atol=1e-12)
        assert_allclose(a, np.exp(2j * thetas), atol=1e-12)


def test_aux_inverse_roundtrip():
    thetas = np.linspace(0.1, 6.0, 23)
    for s in (1.0, 0.45, -0.5):
        q = tensor.project_planar(unit2(thetas), s)
        assert_allclose(tensor.aux_inverse(tensor.aux(q, s), s), q, atol=1e-13)
    with pytest.raises(ValueError):
        tensor.aux_inverse(np.array([0.5 + 0.1j]), 1.0)


def _smooth_theta(x, y):
    return 0.7 * np.sin(2.0 * x) * np.cos(y) + 0.4 * x - 0.3 * y


def _fd_identity_residual(h, s):
    """Residual of Q_{ij,k} n_j = s n_{i,k} with centered differences."""
    pts = np.array([[0.2, 0.1], [-0.4, 0.7], [1.1, -0.6], [0.05, 1.3]])
    worst = 0.0
    for x0, y0 in pts:
        for k, e in enumerate(np.eye(2)):
            def at(t):
                th = _smooth_theta(x0 + t * e[0], y0 + t * e[1])
                n = np.array([np.cos(th), np.sin(th), 0.0])
                return n, tensor.project(n, s)

            n_p, Q_p = at(h)
            n_m, Q_m = at(-h)
            n_0, _ = at(0.0)
            dQ = (Q_p - Q_m) / (2.0 * h)
            dn = (n_p - n_m) / (2.0 * h)
            worst = max(worst, np.max(np.abs(dQ @ n_0 - s * dn)))
    return worst


def test_derivative_identity_converges():
    """The chain-rule identity holds in the limit; finite differences
    approach it at first order or better."""
    for s in (1.0, 0.5):
        r1 = _fd_identity_residual(1e-2, s)
        r2 = _fd_identity_residual(5e-3, s)
        r3 = _fd_identity_residual(2.5e-3, s)
        assert r2 < 0.6 * r1
        assert r3 < 0.6 * r2
        assert r3 < 1e-4


def _fd_gradsq_residual(h, s):
    """|grad Q|^2 - 2 s^2 |grad theta|^2 with centered differences."""
    pts = np.array([[0.3, -0.2], [0.9, 0.4], [-0.7, 1.2]])
    worst = 0.0
    for x0, y0 in pts:
        grad_q_sq = 0.0
        grad_th = np.zeros(2)
        for k, e in enumerate(np.eye(2)):
            th_p = _smooth_theta(x0 + h * e[0], y0 + h * e[1])
            th_m = _smooth_theta(x0 - h * e[0], y0 - h * e[1])
            n_p = np.array([np.cos(th_p), np.sin(th_p), 0.0])
            n_m = np.array([np.cos(th_m), np.sin(th_m), 0.0])
            dQ = (tensor.project(n_p, s) - tensor.project(n_m, s)) / (2.0 * h)
            grad_q_sq += np.sum(dQ * dQ)
            grad_th[k] = (th_p - th_m) / (2.0 * h)
        worst = max(worst, abs(grad_q_sq - 2.0 * s**2 * (grad_th @ grad_th)))
    return worst


def test_gradient_norm_identity_converges():
    for s in (1.0, -0.4):
        r1 = _fd_gradsq_residual(1e-2, s)
        r2 = _fd_gradsq_residual(5e-3, s)
        assert r2 < 0.6 * r1
        assert r2 < 1e-3


def test_elastic_constant_roundtrip_exact():
    rng = np.random.default_rng(11)
    for s in (1.0, 0.62, -0.5, 0.09):
        for _ in range(8):
            L = rng.uniform(-2.0, 2.0, size=4)
            back = tensor.constants_L_from_K(tensor.constants_K_from_L(L, s).as_K(), s)
            assert_allclose(back.as_L(), L, atol=1e-12)
            K = rng.uniform(-2.0, 2.0, size=4)
            back = tensor.constants_K_from_L(tensor.constants_L_from_K(K, s).as_L(), s)
            assert_allclose(back.as_K(), K, atol=1e-12)


def test_one_coefficient_reduction():
    """L = (L1, 0, 0, 0) gives equal splay and bend, zero twist offset."""
    ec = tensor.constants_K_from_L([2.0, 0.0, 0.0, 0.0], 0.8)
    assert_allclose(ec.k1, ec.k3, atol=1e-14)
    assert_allclose(ec.k1, 2.0 * 0.8**2, atol=1e-14)
    assert ec.k2 == 0.0 and ec.k4 == 0.0
