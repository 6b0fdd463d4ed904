"""P1 finite elements for the harmonic building blocks of the criterion.

Three mixed Laplace problems appear: the hole indicator fields h_i
(Dirichlet 1 on hole i, 0 on the other holes, natural on the outer
loop), the boundary-driven field h_g (Dirichlet 0 on every hole,
Neumann data on the outer loop equal to the angular velocity of the
auxiliary boundary values A(g)), and manufactured Dirichlet problems
for verification.  From these come the hole-interaction matrix
D_ij = (1/2pi) * energy inner product of h_i and h_j and the flux
vector J with J_i = (1/2pi) * flux of h_g through hole loop i.

Fluxes are extracted by the conormal (residual) method: at a Dirichlet
node the residual of the unconstrained system equals the discrete
conormal flux, so summing stiffness*u - load over a hole loop gives
the loop flux.  Because the Neumann load is assembled from the exact
angular increments of A(g), the identity sum(J) = -deg(A(g)) holds to
solver precision.  An independent trapezoid quadrature of the boundary
integral -(1/2pi) * integral of density * h_i provides a cross-check
whose disagreement estimates the discretization error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import cg

from .geometry import BoundaryData, Mesh

__all__ = [
    "HarmonicField",
    "FluxResult",
    "SolverError",
    "FluxInconsistencyError",
    "stiffness_matrix",
    "triangle_gradients",
    "solve_laplace",
    "solve_hi",
    "indicator_fields",
    "solve_hg",
    "assemble_D",
    "conormal_flux",
    "compute_J",
    "field_energy",
    "field_gradient",
    "field_to_csv",
]

CG_RTOL = 1e-12
RESIDUAL_LIMIT = 1e-10


class SolverError(RuntimeError):
    """Linear solver failed to reach the required relative residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class FluxInconsistencyError(RuntimeError):
    """The two flux-extraction methods disagree far beyond the mesh tolerance."""


def triangle_gradients(mesh: Mesh):
    """Per-triangle P1 basis gradients (T,3,2) and triangle areas (T,)."""
    if "grads" not in mesh._cache:
        p = mesh.nodes[mesh.triangles]
        x, y = p[..., 0], p[..., 1]
        b = y[:, [1, 2, 0]] - y[:, [2, 0, 1]]
        c = x[:, [2, 0, 1]] - x[:, [1, 2, 0]]
        area2 = np.einsum("ti,ti->t", x, b)
        if np.any(area2 <= 0):
            raise ValueError("mesh contains degenerate or clockwise triangles")
        mesh._cache["grads"] = np.stack([b, c], axis=-1) / area2[:, None, None]
        mesh._cache["areas"] = 0.5 * area2
    return mesh._cache["grads"], mesh._cache["areas"]


def stiffness_matrix(mesh: Mesh) -> sp.csr_matrix:
    """Assembled P1 stiffness matrix (exact per-triangle integration)."""
    if "stiffness" not in mesh._cache:
        grads, areas = triangle_gradients(mesh)
        local = np.einsum("tik,tjk->tij", grads, grads) * areas[:, None, None]
        tri = mesh.triangles
        rows = np.repeat(tri, 3, axis=1).ravel()
        cols = np.tile(tri, (1, 3)).ravel()
        n = len(mesh.nodes)
        K = sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()
        K.sum_duplicates()
        mesh._cache["stiffness"] = K
    return mesh._cache["stiffness"]


@dataclass(frozen=True)
class HarmonicField:
    """Nodal P1 solution of a mixed Dirichlet/Neumann Laplace problem."""

    mesh: Mesh
    values: np.ndarray
    dirichlet_tags: tuple
    load: np.ndarray
    residual: float

    def energy(self) -> float:
        return field_energy(self)


def _solve_reduced(mesh, f, fixed, fixed_values):
    K = stiffness_matrix(mesh)
    n = len(mesh.nodes)
    u = np.zeros(n)
    u[fixed] = fixed_values
    free = np.setdiff1d(np.arange(n), fixed)
    if len(free) == 0:
        return u, 0.0
    A = K[free][:, free]
    b = f[free] - K[free][:, fixed] @ fixed_values
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return u, 0.0
    M = sp.diags(1.0 / A.diagonal())
    maxiter = int(50 * math.sqrt(len(free))) + 10
    x, info = cg(A, b, rtol=CG_RTOL, atol=0.0, maxiter=maxiter, M=M)
    res = float(np.linalg.norm(b - A @ x) / bnorm)
    if res > RESIDUAL_LIMIT:
        raise SolverError(
            f"conjugate gradients stalled after {maxiter} iterations "
            f"(relative residual {res:.3e}, info={info})",
            residual=res,
        )
    u[free] = x
    return u, res


def solve_laplace(mesh: Mesh, dirichlet: dict, neumann_load=None) -> HarmonicField:
    """Solve the Laplace equation with per-loop Dirichlet data.

    ``dirichlet`` maps loop tags (0 = outer, i = hole i) to a constant
    or a per-node array along that loop; loops not listed get the
    natural zero-Neumann condition unless ``neumann_load`` supplies an
    assembled boundary load.
    """
    n = len(mesh.nodes)
    f = np.zeros(n) if neumann_load is None else np.asarray(neumann_load, dtype=float)
    fixed_parts, value_parts = [], []
    for tag, val in sorted(dirichlet.items()):
        loop = mesh.loops[tag]
        fixed_parts.append(loop)
        value_parts.append(np.broadcast_to(np.asarray(val, dtype=float), loop.shape))
    fixed = np.concatenate(fixed_parts) if fixed_parts else np.zeros(0, dtype=np.int64)
    vals = np.concatenate(value_parts) if value_parts else np.zeros(0)
    u, res = _solve_reduced(mesh, f, fixed, vals)
    return HarmonicField(mesh, u, tuple(sorted(dirichlet)), f, res)


def solve_hi(mesh: Mesh, i: int) -> HarmonicField:
    """Indicator field of hole i (1-based): Dirichlet 1 on hole i, 0 on
    the other holes, natural condition on the outer loop."""
    if not 1 <= i <= mesh.n_holes:
        raise ValueError(f"hole index {i} out of range 1..{mesh.n_holes}")
    return solve_laplace(mesh, {j: 1.0 if j == i else 0.0 for j in range(1, mesh.n_holes + 1)})


def indicator_fields(mesh: Mesh):
    """All hole indicator fields, cached on the mesh."""
    if "indicators" not in mesh._cache:
        mesh._cache["indicators"] = [solve_hi(mesh, i) for i in range(1, mesh.n_holes + 1)]
    return mesh._cache["indicators"]


def _neumann_load(g: BoundaryData) -> np.ndarray:
    """Boundary load for the angular-velocity Neumann data of A(g).

    Each outer edge contributes its exact angular increment of A split
    evenly between the endpoint hat functions, so the total load is
    2*pi*deg(A(g)) identically.
    """
    f = np.zeros(len(g.mesh.nodes))
    loop = g.mesh.loops[0]
    half = 0.5 * g.dalpha
    np.add.at(f, loop, half)
    np.add.at(f, np.roll(loop, -1), half)
    return f


def solve_hg(mesh: Mesh, g: BoundaryData) -> HarmonicField:
    """Boundary-driven field: Dirichlet 0 on every hole loop, Neumann
    data equal to the angular velocity of A(g) on the outer loop."""
    if mesh.n_holes < 1:
        raise ValueError("solve_hg requires at least one hole")
    if g.mesh is not mesh:
        raise ValueError("boundary data belongs to a different mesh")
    return solve_laplace(
        mesh,
        {i: 0.0 for i in range(1, mesh.n_holes + 1)},
        neumann_load=_neumann_load(g),
    )


def assemble_D(mesh: Mesh) -> np.ndarray:
    """Hole-interaction matrix D_ij = (1/2pi) * int grad h_i . grad h_j."""
    if mesh.n_holes < 1:
        raise ValueError("assemble_D requires at least one hole")
    H = np.stack([f.values for f in indicator_fields(mesh)], axis=1)
    K = stiffness_matrix(mesh)
    D = (H.T @ (K @ H)) / (2.0 * np.pi)
    return 0.5 * (D + D.T)


def conormal_flux(field: HarmonicField, tag: int) -> float:
    """Flux of the field through loop ``tag``, normalized by 2*pi.

    Valid on loops where the field carries Dirichlet data: there the
    residual of the unconstrained system is the discrete conormal
    derivative paired with the nodal hat functions.
    """
    if tag not in field.dirichlet_tags:
        raise ValueError(f"loop {tag} carries no Dirichlet condition; conormal flux undefined")
    K = stiffness_matrix(field.mesh)
    r = K @ field.values - field.load
    return float(r[field.mesh.loops[tag]].sum() / (2.0 * np.pi))


@dataclass(frozen=True)
class FluxResult:
    """Per-hole fluxes of h_g with the independent cross-check.

    ``J`` comes from the conormal residuals, ``J_alt`` from trapezoid
    quadrature of -(1/2pi) * integral of (Neumann density * h_i) along
    the outer loop; ``mismatch`` (their largest disagreement) estimates
    the discretization error of the fluxes.
    """

    J: np.ndarray
    J_alt: np.ndarray
    mismatch: float
    outer_degree: int
    hg: HarmonicField

    def sum_defect(self) -> float:
        return float(self.J.sum() + self.outer_degree)


def compute_J(mesh: Mesh, g: BoundaryData, hg: HarmonicField | None = None) -> FluxResult:
    """Fluxes J_i = (1/2pi) * flux of h_g through hole loop i.

    Raises :class:`FluxInconsistencyError` when the conormal and
    boundary-integral extractions disagree beyond ten times the mesh
    tolerance, which signals a broken solve rather than discretization
    error.
    """
    if hg is None:
        hg = solve_hg(mesh, g)
    J = np.array([conormal_flux(hg, i) for i in range(1, mesh.n_holes + 1)])

    # cross-check: trapezoid rule for -(1/2pi) * int density * h_i along
    # the outer loop, with nodal density values (a different quadrature
    # than the exact-increment load assembly, so the difference reflects
    # the discretization error of the fluxes)
    loop = mesh.loops[0]
    lens = g.edge_arclengths()
    dens = g.density
    J_alt = np.empty(mesh.n_holes)
    for i, f in enumerate(indicator_fields(mesh)):
        hvals = f.values[loop]
        smooth = np.sum(lens * 0.5 * (dens * hvals + np.roll(dens * hvals, -1)))
        J_alt[i] = -(smooth + np.sum(g.corner_dalpha * hvals)) / (2.0 * np.pi)
    mismatch = float(np.max(np.abs(J - J_alt))) if mesh.n_holes else 0.0

    # scale the acceptance limit by the boundary-integral values: they
    # depend only on the data, so a corrupted solve cannot inflate its
    # own tolerance
    limit = 10.0 * mesh.h * max(1.0, float(np.max(np.abs(J_alt), initial=0.0)))
    if mismatch > limit:
        raise FluxInconsistencyError(
            f"flux extraction methods disagree by {mismatch:.3e} (limit {limit:.3e})"
        )
    return FluxResult(J=J, J_alt=J_alt, mismatch=mismatch, outer_degree=g.outer_degree, hg=hg)


def field_energy(field: HarmonicField) -> float:
    """Dirichlet energy int |grad u|^2 of a nodal field."""
    K = stiffness_matrix(field.mesh)
    return float(field.values @ (K @ field.values))


def field_gradient(mesh: Mesh, values: np.ndarray) -> np.ndarray:
    """Per-triangle gradient (T,2) of a nodal P1 field."""
    grads, _ = triangle_gradients(mesh)
    return np.einsum("tik,ti->tk", grads, values[mesh.triangles])


def field_to_csv(field: HarmonicField, path):
    """Write "node_index,x,y,value" rows (1-based node indices)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("node_index,x,y,value\n")
        for i, ((x, y), v) in enumerate(zip(field.mesh.nodes, field.values)):
            fh.write(f"{i + 1},{float(x)!r},{float(y)!r},{float(v)!r}\n")
