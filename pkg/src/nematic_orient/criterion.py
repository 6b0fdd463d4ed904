"""Orientability criterion: an integer quadratic program over hole degrees.

A global minimizer of the line-field energy restricts, on each hole
boundary, to a map of some winding d_i, and the candidate minimum over
the degree class d has reduced energy q(d) = c(d) . D c(d) where
D c = d - J.  Comparing the minimum of q over all integer classes with
the minimum over all-even classes decides whether every global
minimizer is non-orientable, every one orientable, or both kinds exist.

The feasible classes satisfy sum(d) = -outer_degree.  All-even classes
exist iff the outer degree is even; when it is odd the boundary data
itself is non-orientable and every minimizer is too (flagged in the
report).  The enumeration is exhaustive inside a certified box:
q(d) >= |d - J|^2 / lambda_max(D) on the constraint hyperplane, so no
class outside the box can beat the rounded seed classes.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

from . import degree as degree_mod
from . import harmonic, tensor
from .geometry import BoundaryData, Mesh

__all__ = [
    "Verdict",
    "CriterionReport",
    "MinimizerField",
    "ComplexityError",
    "InconsistentFluxError",
    "DiscretizationError",
    "solve_c",
    "quadratic_value",
    "two_hole_verdict",
    "enumerate_and_minimize",
    "reconstruct_minimizer",
    "q_energy",
    "analyze_mesh",
]

SOLVE_C_RESIDUAL = 1e-8
CONSISTENCY_TOL = 0.05
MAX_HOLES = 12
MAX_BOX = 10_000_000
COTREE_TOL = 1.0
STORED_CLASS_LIMIT = 5000


class Verdict(enum.Enum):
    AllMinimizersNonOrientable = "AllMinimizersNonOrientable"
    AllMinimizersOrientable = "AllMinimizersOrientable"
    BothKindsExist = "BothKindsExist"
    NumericallyIndeterminate = "NumericallyIndeterminate"

    def __str__(self):
        return self.value


class ComplexityError(RuntimeError):
    """Degree-class enumeration refused (too many holes or too large a box)."""


class InconsistentFluxError(RuntimeError):
    """Right-hand side d - J violates the sum constraint far beyond
    flux accuracy, signalling a broken flux computation."""


class DiscretizationError(RuntimeError):
    """Phase reconstruction found cotree defects that are not close to
    integer multiples of 2*pi."""


def _pinv_factors(D):
    """Eigendecomposition-based pseudo-inverse data for a PSD D with
    nullspace spanned by the constant vector."""
    D = np.asarray(D, dtype=float)
    w, V = np.linalg.eigh(0.5 * (D + D.T))
    scale = max(abs(w[-1]), 1.0)
    if w[0] < -1e-10 * scale:
        raise ValueError(f"D is not positive semidefinite (lambda_min = {w[0]:.3e})")
    cutoff = 1e-12 * scale
    inv = np.where(w > cutoff, 1.0 / np.maximum(w, cutoff), 0.0)
    return w, V, inv


def solve_c(d, D, J, consistency_tol=CONSISTENCY_TOL):
    """Solve D c = d - J for the weight vector c, gauge-fixed to c.e = 0.

    J is first projected onto the hyperplane sum(J) = sum(d) (the two
    sums agree up to flux error when d is a valid degree class); a
    violation beyond ``consistency_tol`` raises
    :class:`InconsistentFluxError`.
    """
    d = np.asarray(d, dtype=float)
    J = np.asarray(J, dtype=float)
    defect = float(np.sum(d - J))
    if abs(defect) > consistency_tol:
        raise InconsistentFluxError(
            f"sum(d - J) = {defect:.4f}; the flux vector is inconsistent with the degree class"
        )
    rhs = (d - J) - defect / len(d)
    w, V, inv = _pinv_factors(D)
    c = V @ (inv * (V.T @ rhs))
    c -= c.mean()
    residual = float(np.linalg.norm(D @ c - rhs))
    if residual > SOLVE_C_RESIDUAL * max(1.0, float(np.linalg.norm(rhs))):
        raise InconsistentFluxError(
            f"D c = d - J left residual {residual:.3e}; right-hand side outside range(D)"
        )
    return c


def quadratic_value(d, D, J):
    """q(d) = c(d) . D c(d), independent of the gauge representative."""
    c = solve_c(d, D, J)
    return float(c @ (np.asarray(D, dtype=float) @ c))


def _dist_to(x, values_mod, offset=0.0):
    return abs((x - offset + values_mod / 2.0) % values_mod - values_mod / 2.0)


def two_hole_verdict(J1: float, tie_tol: float = 0.0) -> Verdict:
    """Closed-form verdict for two-hole domains from the single flux J1.

    All minimizers are non-orientable iff J1 is strictly closer to an
    odd integer than to an even one; orientable iff strictly closer to
    an even integer; a tie (J1 at half-integer distance) means both
    kinds of minimizer exist.
    """
    dist_even = _dist_to(float(J1), 2.0)
    dist_odd = _dist_to(float(J1), 2.0, offset=1.0)
    if dist_odd < dist_even - tie_tol:
        return Verdict.AllMinimizersNonOrientable
    if dist_even < dist_odd - tie_tol:
        return Verdict.AllMinimizersOrientable
    return Verdict.BothKindsExist


def _seed_class(J_p, target, even=False):
    """Nearest integer (or all-even) vector to J_p with the exact sum."""
    step = 2 if even else 1
    r = step * np.rint(np.asarray(J_p) / step).astype(np.int64)
    defect = int(target - r.sum())
    # defect is a multiple of step when target has the right parity
    moves = defect // step
    if moves != 0:
        direction = 1 if moves > 0 else -1
        gain = direction * (J_p - r)  # larger = cheaper to move this entry
        order = np.argsort(-gain, kind="stable")
        for k in range(abs(moves)):
            r[order[k % len(r)]] += direction * step
    return r


@dataclass
class CriterionReport:
    """Outcome of the degree-class minimization."""

    outer_degree: int
    D: np.ndarray
    J: np.ndarray
    J_projected: np.ndarray
    flux_mismatch: float
    tie_tol: float
    tie_tol_explicit: bool
    classes: list
    truncated: bool
    d_star: tuple
    q_star: float
    d_even_star: tuple | None
    q_even_star: float | None
    verdict: Verdict
    tie_margin: float | None
    odd_outer: bool
    box_radius: int
    s: float | None = None
    hg_energy: float | None = None
    energy_star: float | None = None
    energy_even_star: float | None = None

    def to_text(self):
        n = len(self.J)
        lines = [
            f"holes: {n}",
            f"outer_degree: {self.outer_degree}",
            "J: " + " ".join(f"{x:.10g}" for x in self.J),
            f"flux_mismatch: {self.flux_mismatch:.6g}",
            f"tie_tol: {self.tie_tol:.6g}",
            f"box_radius: {self.box_radius}",
            "d_star: " + " ".join(str(x) for x in self.d_star),
            f"q_star: {self.q_star:.12g}",
        ]
        if self.d_even_star is not None:
            lines.append("d_even_star: " + " ".join(str(x) for x in self.d_even_star))
            lines.append(f"q_even_star: {self.q_even_star:.12g}")
        if self.tie_margin is not None:
            lines.append(f"tie_margin: {self.tie_margin:.12g}")
        if self.energy_star is not None:
            lines.append(f"energy_star: {self.energy_star:.12g}")
        if self.energy_even_star is not None:
            lines.append(f"energy_even_star: {self.energy_even_star:.12g}")
        if self.odd_outer:
            lines.append("odd_outer_degree: true (boundary data itself is non-orientable)")
        lines.append(f"verdict: {self.verdict}")
        return "\n".join(lines) + "\n"

    def csv_rows(self):
        n = len(self.J)
        yield ",".join(f"d_{i + 1}" for i in range(n)) + ",q,even_flag,energy"
        for d, q, even in self.classes:
            energy = ""
            if self.s is not None and self.hg_energy is not None:
                energy = f"{_energy_from_q(q, self.hg_energy, self.s):.12g}"
            yield ",".join(str(x) for x in d) + f",{q:.12g},{int(even)},{energy}"


def _energy_from_q(q, hg_energy, s):
    return 0.5 * s * s * (2.0 * np.pi * q + hg_energy)


def enumerate_and_minimize(
    D,
    J,
    outer_degree: int,
    tie_tol: float | None = None,
    flux_mismatch: float = 0.0,
    s: float | None = None,
    hg_energy: float | None = None,
) -> CriterionReport:
    """Exhaustively minimize q over degree classes inside a certified box.

    ``tie_tol`` defaults to three times the flux mismatch; with the
    default, a tie between the best odd-containing and best even class
    is reported as NumericallyIndeterminate (the tie cannot be
    distinguished from flux noise), while an explicitly supplied
    tolerance makes a tie report BothKindsExist.
    """
    D = np.asarray(D, dtype=float)
    J = np.asarray(J, dtype=float)
    n = len(J)
    if D.shape != (n, n):
        raise ValueError("D and J sizes disagree")
    if n > MAX_HOLES:
        raise ComplexityError(f"{n} holes exceeds the enumeration limit of {MAX_HOLES}")

    explicit = tie_tol is not None
    if tie_tol is None:
        tie_tol = 3.0 * flux_mismatch

    target = -int(outer_degree)
    sum_defect = float(J.sum() - target)
    if abs(sum_defect) > CONSISTENCY_TOL:
        raise InconsistentFluxError(
            f"sum(J) = {J.sum():.4f} but -outer_degree = {target}; flux computation inconsistent"
        )
    J_p = J - sum_defect / n

    w, V, inv = _pinv_factors(D)
    lam_max = float(w[-1])
    Dp = (V * inv) @ V.T

    def q_of(dvec):
        rhs = dvec - J_p
        return float(rhs @ (Dp @ rhs))

    odd_outer = bool(outer_degree % 2)
    seeds = [_seed_class(J_p, target, even=False)]
    if not odd_outer:
        seeds.append(_seed_class(J_p, target, even=True))
    q_ref = max(q_of(sd.astype(float)) for sd in seeds)
    R = int(np.ceil(np.sqrt(max(lam_max * q_ref, 0.0)))) + 1

    if n == 1:
        candidates = np.array([[target]], dtype=np.int64)
    else:
        centers = np.rint(J_p).astype(np.int64)
        ranges = [np.arange(c - R, c + R + 1) for c in centers[:-1]]
        count = int(np.prod([len(r) for r in ranges], dtype=np.int64))
        if count > MAX_BOX:
            raise ComplexityError(
                f"certified box holds {count} candidate classes (limit {MAX_BOX})"
            )
        grid = np.stack([g.ravel() for g in np.meshgrid(*ranges, indexing="ij")], axis=-1)
        last = target - grid.sum(axis=1)
        keep = np.abs(last - centers[-1]) <= R
        candidates = np.concatenate([grid[keep], last[keep, None]], axis=1)

    X = candidates.astype(float) - J_p
    qvals = np.einsum("ki,ij,kj->k", X, Dp, X)
    evens = ~np.any(candidates % 2, axis=1)

    # deterministic ordering: ascending q, then lexicographic on d
    order = np.lexsort(tuple(candidates[:, i] for i in range(n - 1, -1, -1)) + (qvals,))
    candidates, qvals, evens = candidates[order], qvals[order], evens[order]

    d_star = tuple(int(x) for x in candidates[0])
    q_star = float(qvals[0])
    if evens.any():
        k = int(np.argmax(evens))
        d_even_star = tuple(int(x) for x in candidates[k])
        q_even_star = float(qvals[k])
    else:
        d_even_star, q_even_star = None, None

    odd_mask = ~evens
    q_odd_star = float(qvals[np.argmax(odd_mask)]) if odd_mask.any() else None

    if q_even_star is None:
        verdict = Verdict.AllMinimizersNonOrientable
        tie_margin = None
    elif q_odd_star is None:
        verdict = Verdict.AllMinimizersOrientable
        tie_margin = None
    else:
        tie_margin = q_odd_star - q_even_star
        if tie_margin < -tie_tol:
            verdict = Verdict.AllMinimizersNonOrientable
        elif tie_margin > tie_tol:
            verdict = Verdict.AllMinimizersOrientable
        else:
            verdict = Verdict.BothKindsExist if explicit else Verdict.NumericallyIndeterminate

    truncated = len(candidates) > STORED_CLASS_LIMIT
    stored = [
        (tuple(int(x) for x in d), float(q), bool(e))
        for d, q, e in itertools.islice(
            zip(candidates, qvals, evens), STORED_CLASS_LIMIT
        )
    ]

    report = CriterionReport(
        outer_degree=int(outer_degree),
        D=D,
        J=J,
        J_projected=J_p,
        flux_mismatch=float(flux_mismatch),
        tie_tol=float(tie_tol),
        tie_tol_explicit=explicit,
        classes=stored,
        truncated=truncated,
        d_star=d_star,
        q_star=q_star,
        d_even_star=d_even_star,
        q_even_star=q_even_star,
        verdict=verdict,
        tie_margin=tie_margin,
        odd_outer=odd_outer,
        box_radius=R,
        s=s,
        hg_energy=hg_energy,
    )
    if s is not None and hg_energy is not None:
        report.energy_star = _energy_from_q(q_star, hg_energy, s)
        if q_even_star is not None:
            report.energy_even_star = _energy_from_q(q_even_star, hg_energy, s)
    return report


# ---------------------------------------------------------------------------
# reconstruction of the minimizing field


@dataclass(frozen=True)
class MinimizerField:
    """Minimizing line field over a fixed degree class.

    ``psi`` is the reconstructed conjugate phase (single-valued on a
    spanning tree; across the remaining edges it jumps by the integer
    multiples of 2*pi that carry the hole degrees), ``m`` the unit
    auxiliary field (cos psi, sin psi) and ``q`` the planar tensor
    components (q11, q12) with A(Q) = m.
    """

    mesh: Mesh
    d: tuple
    c: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    m: np.ndarray
    q: np.ndarray
    s: float
    windings: tuple
    cotree_deviation: float
    phi_energy: float
    m_energy: float


def _conjugate_phase(mesh, values):
    """Discrete harmonic conjugate of a P1 potential, evaluated at the
    nodes.  Returns (psi, deviation).

    The rotated gradient of a P1 field is constant per triangle, so its
    stream function is affine per triangle and glues across shared edge
    midpoints.  The glued chain closes exactly around every interior
    node (the closure defect equals the node's assembled equation
    residual, zero for the solved potential), so integrating centroid
    values along a spanning tree of the triangle adjacency graph gives
    a phase that is single-valued up to exact multiples of 2*pi around
    the holes.  Cotree defects therefore sit on the 2*pi lattice to
    solver precision; `deviation` is the largest distance from it.

    Nodal values average the incident triangles' affine extensions
    after snapping branch jumps (near-multiples of 2*pi picked up on
    opposite sides of a hole cut) to the lowest-index triangle's
    branch.
    """
    from scipy.sparse.csgraph import breadth_first_order
    import scipy.sparse as sp

    grads = harmonic.field_gradient(mesh, values)
    rot = np.stack([-grads[:, 1], grads[:, 0]], axis=-1)
    tri = mesh.triangles
    nt = len(tri)
    n = len(mesh.nodes)
    cen = mesh.nodes[tri].mean(axis=1)

    u = np.concatenate([tri[:, 0], tri[:, 1], tri[:, 2]]).astype(np.int64)
    v = np.concatenate([tri[:, 1], tri[:, 2], tri[:, 0]]).astype(np.int64)
    tri_idx = np.tile(np.arange(nt), 3)
    keys = np.minimum(u, v) * n + np.maximum(u, v)
    uniq, inv = np.unique(keys, return_inverse=True)
    ta = np.full(len(uniq), nt, dtype=np.int64)
    tb = np.full(len(uniq), -1, dtype=np.int64)
    np.minimum.at(ta, inv, tri_idx)
    np.maximum.at(tb, inv, tri_idx)
    interior = ta != tb
    ta, tb = ta[interior], tb[interior]
    mid = 0.5 * (mesh.nodes[uniq[interior] // n] + mesh.nodes[uniq[interior] % n])
    # exact line integral centroid(ta) -> shared midpoint -> centroid(tb)
    delta = np.einsum("ek,ek->e", rot[ta], mid - cen[ta]) + np.einsum(
        "ek,ek->e", rot[tb], cen[tb] - mid
    )

    # signed ids (1-based) so zero data never collides with the structure
    ids = np.arange(1, len(delta) + 1)
    adj = sp.csr_matrix(
        (np.concatenate([ids, -ids]), (np.concatenate([ta, tb]), np.concatenate([tb, ta]))),
        shape=(nt, nt),
    )
    order, pred = breadth_first_order(adj, 0, directed=False, return_predecessors=True)
    if len(order) != nt:
        raise ValueError("triangle adjacency graph is not connected")
    walk = order[1:]
    signed = np.asarray(adj[pred[walk], walk]).ravel().astype(np.int64)
    step = np.sign(signed) * delta[np.abs(signed) - 1]
    psi_cen = np.zeros(nt)
    for t, dpsi in zip(walk, step):
        psi_cen[t] = psi_cen[pred[t]] + dpsi

    jumps = psi_cen[tb] - psi_cen[ta] - delta
    deviation = float(np.max(np.abs(jumps - 2.0 * np.pi * np.rint(jumps / (2.0 * np.pi)))))

    corner = psi_cen[tri_idx] + np.einsum("ek,ek->e", rot[tri_idx], mesh.nodes[u] - cen[tri_idx])
    first = np.lexsort((tri_idx, u))
    nodes_sorted, first_idx = np.unique(u[first], return_index=True)
    ref = np.empty(n)
    ref[nodes_sorted] = corner[first][first_idx]
    wrapped = corner - ref[u]
    wrapped -= 2.0 * np.pi * np.rint(wrapped / (2.0 * np.pi))
    sums = np.zeros(n)
    counts = np.zeros(n)
    np.add.at(sums, u, wrapped)
    np.add.at(counts, u, 1.0)
    return ref + sums / counts, deviation


def reconstruct_minimizer(mesh: Mesh, g: BoundaryData, d, D=None, J=None) -> MinimizerField:
    """Build the minimizing line field of the degree class d.

    The potential Phi = h_g + sum c_i h_i carries flux 2*pi*d_i through
    hole i; its discrete harmonic conjugate psi, integrated along a
    breadth-first spanning tree of the triangle adjacency graph, yields
    the auxiliary field m = (cos psi, sin psi) whose hole windings are
    exactly d.  Cotree defects must sit on the 2*pi lattice (they do so
    to solver precision by construction); a large deviation signals a
    broken solve, not mesh resolution.
    """
    d = np.asarray(d, dtype=np.int64)
    if len(d) != mesh.n_holes:
        raise ValueError("degree class length does not match the hole count")
    if int(d.sum()) != -g.outer_degree:
        raise ValueError(
            f"sum(d) = {int(d.sum())} but the class constraint requires {-g.outer_degree}"
        )
    if D is None:
        D = harmonic.assemble_D(mesh)
    flux = None
    if J is None:
        flux = harmonic.compute_J(mesh, g)
        J = flux.J
    hg = flux.hg if flux is not None else harmonic.solve_hg(mesh, g)

    c = solve_c(d, D, J)
    phi = hg.values + sum(
        ci * f.values for ci, f in zip(c, harmonic.indicator_fields(mesh))
    )

    # each hole must carry conormal flux 2*pi*d_i
    K = harmonic.stiffness_matrix(mesh)
    r = K @ phi - hg.load
    for i in range(1, mesh.n_holes + 1):
        got = float(r[mesh.loops[i]].sum() / (2.0 * np.pi))
        if abs(got - d[i - 1]) > 1e-6:
            raise InconsistentFluxError(
                f"hole {i} flux of the reconstructed potential is {got:.8f}, expected {d[i - 1]}"
            )

    psi, deviation = _conjugate_phase(mesh, phi)

    # anchor the free rotation so that exp(i psi) matches the data's
    # auxiliary value at the first outer node (the outer loop is where
    # the trace is prescribed; hole traces are free)
    ln0 = mesh.loops[0][0]
    psi += float(np.angle(g.a[0])) - psi[ln0]

    if deviation > COTREE_TOL:
        raise DiscretizationError(
            f"cotree phase defects deviate from 2*pi multiples by up to {deviation:.3f} rad; "
            "refine the mesh"
        )

    m = np.stack([np.cos(psi), np.sin(psi)], axis=-1)
    mc = m[:, 0] + 1j * m[:, 1]
    q = tensor.aux_inverse(mc, g.s)
    windings = tuple(
        degree_mod.winding_number(mc[mesh.loops[i]]) for i in range(1, mesh.n_holes + 1)
    )

    Kphi = float(phi @ (K @ phi))
    Em = float(m[:, 0] @ (K @ m[:, 0]) + m[:, 1] @ (K @ m[:, 1]))
    return MinimizerField(
        mesh=mesh,
        d=tuple(int(x) for x in d),
        c=c,
        phi=phi,
        psi=psi,
        m=m,
        q=q,
        s=g.s,
        windings=windings,
        cotree_deviation=deviation,
        phi_energy=Kphi,
        m_energy=Em,
    )


def q_energy(mesh: Mesh, g: BoundaryData, d, s: float) -> float:
    """Minimum of the tensor gradient energy over the degree class d:
    (s^2/2) * (2*pi*q(d) + energy of h_g)."""
    D = harmonic.assemble_D(mesh)
    flux = harmonic.compute_J(mesh, g)
    q = quadratic_value(np.asarray(d, dtype=float), D, flux.J)
    return _energy_from_q(q, harmonic.field_energy(flux.hg), float(s))


def analyze_mesh(mesh: Mesh, g: BoundaryData, tie_tol: float | None = None) -> CriterionReport:
    """Full pipeline on a meshed domain: D, J, and the verdict report."""
    D = harmonic.assemble_D(mesh)
    flux = harmonic.compute_J(mesh, g)
    return enumerate_and_minimize(
        D,
        flux.J,
        g.outer_degree,
        tie_tol=tie_tol,
        flux_mismatch=flux.mismatch,
        s=g.s,
        hg_energy=harmonic.field_energy(flux.hg),
    )
