"""Uniaxial Q-tensor algebra with a fixed scalar order parameter.

A uniaxial tensor with order parameter ``s`` and unit director ``n`` is

    Q = s (n (x) n - Id/3),

symmetric and traceless, with eigenvalues (2s/3, -s/3, -s/3).  Because
``n`` and ``-n`` give the same Q, these tensors model *line* fields.
For planar configurations (n3 = 0) a tensor is pinned down by the pair
(q11, q12); the remaining entries are q22 = s/3 - q11, q33 = -s/3 and
q13 = q23 = 0.  The auxiliary complex combination

    A(Q) = (2/s) q11 - 1/3 + i (2/s) q12 = (n1 + i n2)**2

lies on the unit circle and doubles the director angle, which is what
turns orientability questions into winding-number arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "project",
    "project_planar",
    "planar_to_full",
    "planar_distance",
    "is_uniaxial",
    "extract_director",
    "aux",
    "aux_inverse",
    "ElasticConstants",
    "constants_K_from_L",
    "constants_L_from_K",
]

#: Default tolerance on the det / trace residuals of the uniaxiality test.
UNIAXIAL_TOL = 1e-9


def check_order_parameter(s: float) -> float:
    """Validate the scalar order parameter s in [-1/2, 1], s != 0."""
    s = float(s)
    if not (-0.5 <= s <= 1.0) or s == 0.0:
        raise ValueError(f"order parameter must lie in [-1/2, 1] and be nonzero, got {s}")
    return s


def project(n, s):
    """Uniaxial tensor s (n (x) n - Id/3) of a unit director.

    Parameters
    ----------
    n : array_like, shape (..., 3)
        Unit director(s).  The input is validated to unit length (1e-9).
    s : float
        Scalar order parameter.

    Returns
    -------
    numpy.ndarray, shape (..., 3, 3)
        Symmetric traceless tensor(s).
    """
    s = check_order_parameter(s)
    n = np.asarray(n, dtype=float)
    if n.shape[-1] != 3:
        raise ValueError("director must have 3 components")
    norms = np.linalg.norm(n, axis=-1)
    if not np.allclose(norms, 1.0, atol=1e-9):
        raise ValueError("director must be a unit vector")
    outer = n[..., :, None] * n[..., None, :]
    return s * (outer - np.eye(3) / 3.0)


def project_planar(n, s):
    """Planar uniaxial tensor of an in-plane director, as (q11, q12) pairs.

    Parameters
    ----------
    n : array_like, shape (..., 2)
        Unit in-plane director(s).
    s : float
        Scalar order parameter.

    Returns
    -------
    numpy.ndarray, shape (..., 2)
        The independent entries (q11, q12) of s (n (x) n - Id/3).
    """
    s = check_order_parameter(s)
    n = np.asarray(n, dtype=float)
    if n.shape[-1] != 2:
        raise ValueError("planar director must have 2 components")
    norms = np.linalg.norm(n, axis=-1)
    if not np.allclose(norms, 1.0, atol=1e-9):
        raise ValueError("director must be a unit vector")
    q11 = s * (n[..., 0] ** 2 - 1.0 / 3.0)
    q12 = s * n[..., 0] * n[..., 1]
    return np.stack([q11, q12], axis=-1)


def planar_to_full(q, s):
    """Expand (q11, q12) pairs to full 3x3 planar uniaxial tensors."""
    s = check_order_parameter(s)
    q = np.asarray(q, dtype=float)
    q11, q12 = q[..., 0], q[..., 1]
    Q = np.zeros(q.shape[:-1] + (3, 3))
    Q[..., 0, 0] = q11
    Q[..., 0, 1] = Q[..., 1, 0] = q12
    Q[..., 1, 1] = s / 3.0 - q11
    Q[..., 2, 2] = -s / 3.0
    return Q


def planar_distance(qa, qb):
    """Frobenius distance of full tensors given their (q11, q12) pairs.

    For two planar tensors with the same s the difference has entries
    (dq11, dq12, -dq11) on the diagonal/off-diagonal, so
    ``|Qa - Qb|_F = sqrt(2 dq11^2 + 2 dq12^2)``.
    """
    d = np.asarray(qa, dtype=float) - np.asarray(qb, dtype=float)
    return np.sqrt(2.0 * (d[..., 0] ** 2 + d[..., 1] ** 2))


def is_uniaxial(Q, s, tol: float = UNIAXIAL_TOL) -> bool:
    """Test whether a symmetric traceless 3x3 tensor is uniaxial with parameter s.

    The characteristic-polynomial conditions are used: Q has eigenvalues
    (2s/3, -s/3, -s/3) iff ``det Q = 2 s^3 / 27`` and ``tr Q^2 = 2 s^2 / 3``.

    Parameters
    ----------
    Q : array_like, shape (3, 3)
    s : float
    tol : float
        Absolute tolerance on both residuals.

    Returns
    -------
    bool
    """
    s = check_order_parameter(s)
    Q = np.asarray(Q, dtype=float)
    if Q.shape != (3, 3):
        raise ValueError("expected a single 3x3 tensor")
    if not np.allclose(Q, Q.T, atol=1e-12) or abs(np.trace(Q)) > 1e-12:
        raise ValueError("tensor must be symmetric and traceless")
    det_res = abs(np.linalg.det(Q) - 2.0 * s**3 / 27.0)
    tr_res = abs(np.sum(Q * Q) - 2.0 * s**2 / 3.0)
    return bool(det_res <= tol and tr_res <= tol)


def extract_director(Q, s, tol: float = UNIAXIAL_TOL):
    """Recover the director of a uniaxial tensor, with a canonical sign.

    The director is the eigenvector for the simple eigenvalue 2s/3.  Of
    the two unit representatives the one whose first component of
    magnitude > 1e-9 is positive is returned, making the output
    deterministic despite the n / -n ambiguity.

    Parameters
    ----------
    Q : array_like, shape (3, 3)
        Uniaxial tensor (checked via :func:`is_uniaxial`).
    s : float
    tol : float
        Tolerance forwarded to the uniaxiality test.

    Returns
    -------
    numpy.ndarray, shape (3,)
    """
    s = check_order_parameter(s)
    Q = np.asarray(Q, dtype=float)
    if not is_uniaxial(Q, s, tol):
        raise ValueError("tensor is not uniaxial with the given order parameter")
    w, v = np.linalg.eigh(Q)
    n = v[:, np.argmin(np.abs(w - 2.0 * s / 3.0))]
    for comp in n:
        if abs(comp) > 1e-9:
            if comp < 0:
                n = -n
            break
    return n


def aux(q, s):
    """Auxiliary unit-circle field A(Q) = (2/s) q11 - 1/3 + i (2/s) q12.

    Parameters
    ----------
    q : array_like, shape (..., 2)
        Planar tensor entries (q11, q12).
    s : float

    Returns
    -------
    numpy.ndarray of complex, shape (...)
    """
    s = check_order_parameter(s)
    q = np.asarray(q, dtype=float)
    return (2.0 / s) * q[..., 0] - 1.0 / 3.0 + 1j * (2.0 / s) * q[..., 1]


def aux_inverse(a, s):
    """Planar tensor entries (q11, q12) of a unit-circle auxiliary value."""
    s = check_order_parameter(s)
    a = np.asarray(a, dtype=complex)
    if not np.allclose(np.abs(a), 1.0, atol=1e-6):
        raise ValueError("auxiliary values must lie on the unit circle")
    q11 = (s / 2.0) * (a.real + 1.0 / 3.0)
    q12 = (s / 2.0) * a.imag
    return np.stack([q11, q12], axis=-1)


@dataclass(frozen=True)
class ElasticConstants:
    """Elastic constants of a fixed-s uniaxial medium, in both conventions.

    k1..k4 are the director-theory (splay/twist/bend/saddle-splay)
    constants, l1..l4 the tensor-theory coefficients; the two quadruples
    describe the same elastic energy and are related by polynomial
    formulas in s.
    """

    k1: float
    k2: float
    k3: float
    k4: float
    l1: float
    l2: float
    l3: float
    l4: float
    s: float

    def as_K(self):
        return np.array([self.k1, self.k2, self.k3, self.k4])

    def as_L(self):
        return np.array([self.l1, self.l2, self.l3, self.l4])


def constants_K_from_L(L, s) -> ElasticConstants:
    """Director-theory constants from tensor-theory coefficients.

    K1 = (L1 + L2 + 2 L3) s^2 - (2/3) L4 s^3
    K2 = 2 L3 s^2 - (2/3) L4 s^3
    K3 = (L1 + L2 + 2 L3) s^2 + (4/3) L4 s^3
    K4 = L2 s^2
    """
    s = check_order_parameter(s)
    l1, l2, l3, l4 = (float(x) for x in L)
    k1 = (l1 + l2 + 2.0 * l3) * s**2 - (2.0 / 3.0) * l4 * s**3
    k2 = 2.0 * l3 * s**2 - (2.0 / 3.0) * l4 * s**3
    k3 = (l1 + l2 + 2.0 * l3) * s**2 + (4.0 / 3.0) * l4 * s**3
    k4 = l2 * s**2
    return ElasticConstants(k1, k2, k3, k4, l1, l2, l3, l4, s)


def constants_L_from_K(K, s) -> ElasticConstants:
    """Tensor-theory coefficients from director-theory constants (closed form)."""
    s = check_order_parameter(s)
    k1, k2, k3, k4 = (float(x) for x in K)
    l4 = (k3 - k1) / (2.0 * s**3)
    l3 = (k2 + (2.0 / 3.0) * l4 * s**3) / (2.0 * s**2)
    l2 = k4 / s**2
    l1 = (k1 + (2.0 / 3.0) * l4 * s**3) / s**2 - l2 - 2.0 * l3
    return ElasticConstants(k1, k2, k3, k4, l1, l2, l3, l4, s)
