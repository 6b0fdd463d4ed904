"""Director lifting of planar line fields along paths and over meshes.

A planar line field (q11, q12) with order parameter s admits exactly
two local director orientations +-n.  Because two full tensors at
Frobenius distance < sqrt(2)|s| cannot correspond to perpendicular
lines, a sampled path whose steps all stay below that bound has exactly
two continuous lifts, and a sampled field on a mesh is orientable iff
sign propagation over the edge graph is consistent.  Inconsistency is
returned as an explicit witness cycle rather than a bare failure.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import tensor

__all__ = [
    "StepTooLargeError",
    "InitialMismatchError",
    "EdgeStepTooLargeError",
    "LiftResult",
    "FieldLift",
    "lift_path",
    "lift_field",
    "canonical_field",
]

#: Fraction of the theoretical sqrt(2)|s| step bound actually accepted,
#: guarding against float ties where the nearest-lift choice degenerates.
STEP_SAFETY = 0.99


class StepTooLargeError(ValueError):
    """A path step reaches the sqrt(2)|s| bound: the path is under-sampled."""

    def __init__(self, index: int, step: float, bound: float):
        self.index = index
        self.step = step
        self.bound = bound
        super().__init__(
            f"step {index} -> {index + 1} has |dQ| = {step:.6g} >= {bound:.6g}; "
            "sample the path more finely"
        )


class InitialMismatchError(ValueError):
    """The supplied initial director does not orient the first sample."""


class EdgeStepTooLargeError(ValueError):
    """A mesh edge jumps too far in tensor space: mesh too coarse for the field."""

    def __init__(self, u: int, v: int, step: float, bound: float):
        self.edge = (u, v)
        self.step = step
        self.bound = bound
        super().__init__(
            f"edge ({u}, {v}) has |dQ| = {step:.6g} >= {bound:.6g}; refine the mesh"
        )


@dataclass(frozen=True)
class LiftResult:
    """A continuous director lift of a sampled path.

    ``margin`` is the worst-case slack of the step bound,
    min_k (0.99 sqrt(2)|s| - |Q_{k+1} - Q_k|).
    """

    directors: np.ndarray
    margin: float


@dataclass(frozen=True)
class FieldLift:
    """Outcome of sign propagation over a mesh.

    On success ``directors`` holds one of the two global lifts; on
    failure ``witness`` is an ordered node cycle (closing edge implied)
    whose edge sign relations multiply to -1.
    """

    orientable: bool
    directors: np.ndarray | None = None
    witness: list[int] | None = None
    margin: float = field(default=np.nan)


def _candidate_directors(q, s):
    """Canonical director representatives (half the auxiliary angle)."""
    a = tensor.aux(q, s)
    mag = np.abs(a)
    if np.any(np.abs(mag - 1.0) > 1e-6):
        raise ValueError("samples are not unit-circle planar tensors for this s")
    half = np.angle(a) / 2.0
    return np.stack([np.cos(half), np.sin(half)], axis=-1)


def lift_path(samples, s, initial) -> LiftResult:
    """Lift a sampled line-field path to a director path.

    Parameters
    ----------
    samples : array_like, shape (M+1, 2)
        Planar tensor values (q11, q12) along the path.
    s : float
    initial : array_like, shape (2,)
        Director orienting the first sample; the lift starts from it
        unchanged, and the only other valid lift is the negation.

    Returns
    -------
    LiftResult
    """
    s = tensor.check_order_parameter(s)
    q = np.atleast_2d(np.asarray(samples, dtype=float))
    initial = np.asarray(initial, dtype=float)
    if tensor.planar_distance(tensor.project_planar(initial, s), q[0]) > 1e-6:
        raise InitialMismatchError("initial director does not project onto the first sample")

    bound = STEP_SAFETY * np.sqrt(2.0) * abs(s)
    if len(q) > 1:
        steps = tensor.planar_distance(q[1:], q[:-1])
        worst = int(np.argmax(steps))
        if steps[worst] >= bound:
            raise StepTooLargeError(worst, float(steps[worst]), bound)
        margin = float(bound - steps[worst])
    else:
        margin = bound

    cand = _candidate_directors(q, s)
    signs = np.empty(len(q))
    signs[0] = 1.0 if float(cand[0] @ initial) > 0 else -1.0
    dots = np.sum(cand[1:] * cand[:-1], axis=1)
    # sign of each candidate relative to the previous chosen director
    signs[1:] = np.where(dots > 0, 1.0, -1.0)
    signs = np.cumprod(signs)
    directors = cand * signs[:, None]
    directors[0] = initial
    return LiftResult(directors=directors, margin=margin)


def _mesh_edges(mesh):
    tri = np.asarray(mesh.triangles, dtype=np.int64)
    if tri.size == 0:
        raise ValueError("mesh has no triangles")
    e = np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])
    e.sort(axis=1)
    return np.unique(e, axis=0)


def lift_field(mesh, q, s) -> FieldLift:
    """Sign propagation of a nodal line field over the mesh edge graph.

    Breadth-first propagation starts from the lowest-index node of each
    connected component, visiting neighbours in ascending index order,
    so witnesses are reproducible.

    Parameters
    ----------
    mesh : Mesh
        Only the triangle connectivity is used.
    q : array_like, shape (N, 2)
        Nodal planar tensor values.
    s : float

    Returns
    -------
    FieldLift
    """
    s = tensor.check_order_parameter(s)
    q = np.asarray(q, dtype=float)
    n_nodes = len(q)
    edges = _mesh_edges(mesh)
    if edges.max() >= n_nodes:
        raise ValueError("field has fewer values than mesh nodes")

    bound = STEP_SAFETY * np.sqrt(2.0) * abs(s)
    steps = tensor.planar_distance(q[edges[:, 0]], q[edges[:, 1]])
    bad = np.flatnonzero(steps >= bound)
    if bad.size:
        u, v = edges[bad[0]]
        raise EdgeStepTooLargeError(int(u), int(v), float(steps[bad[0]]), bound)
    margin = float(bound - steps.max()) if len(steps) else bound

    cand = _candidate_directors(q, s)
    edge_sign = {}
    adjacency = [[] for _ in range(n_nodes)]
    for (u, v), dot in zip(edges, np.sum(cand[edges[:, 0]] * cand[edges[:, 1]], axis=1)):
        u, v = int(u), int(v)
        sg = 1 if dot > 0 else -1
        edge_sign[(u, v)] = sg
        adjacency[u].append(v)
        adjacency[v].append(u)
    for nbrs in adjacency:
        nbrs.sort()

    sign = np.zeros(n_nodes, dtype=np.int8)
    parent = np.full(n_nodes, -1, dtype=np.int64)
    for root in range(n_nodes):
        if sign[root] or not adjacency[root]:
            if not adjacency[root] and not sign[root]:
                sign[root] = 1  # isolated node: either sign works
            continue
        sign[root] = 1
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in adjacency[u]:
                key = (u, v) if u < v else (v, u)
                expected = sign[u] * edge_sign[key]
                if sign[v] == 0:
                    sign[v] = expected
                    parent[v] = u
                    queue.append(v)
                elif sign[v] != expected:
                    return FieldLift(
                        orientable=False,
                        witness=_witness_cycle(parent, u, v),
                        margin=margin,
                    )
    directors = cand * sign[:, None].astype(float)
    return FieldLift(orientable=True, directors=directors, margin=margin)


def _witness_cycle(parent, u, v):
    """Tree path u -> lca -> v plus the closing edge (v, u)."""
    ancestors_u = [int(u)]
    while parent[ancestors_u[-1]] >= 0:
        ancestors_u.append(int(parent[ancestors_u[-1]]))
    mark = {node: i for i, node in enumerate(ancestors_u)}
    path_v = [int(v)]
    while path_v[-1] not in mark:
        path_v.append(int(parent[path_v[-1]]))
    lca = path_v[-1]
    # cycle ordered lca .. u, then v .. (child of lca); closing edge back to lca
    cycle = list(reversed(ancestors_u[: mark[lca] + 1])) + path_v[:-1]
    return cycle


def witness_sign_product(q, s, cycle) -> int:
    """Product of edge sign relations around a node cycle (-1 = inconsistent)."""
    cand = _candidate_directors(np.asarray(q, dtype=float), s)
    prod = 1
    for a, b in zip(cycle, list(cycle[1:]) + [cycle[0]]):
        dot = float(cand[a] @ cand[b])
        if dot == 0.0:
            raise ValueError("degenerate edge in witness cycle")
        prod *= 1 if dot > 0 else -1
    return prod


def canonical_field(name: str, s: float = 1.0):
    """Named reference line fields with their natural domains.

    ``horseshoe``
        On the one-hole horseshoe domain: vertical lines on the lower
        block (y <= 0), lines tangent to concentric circles on the upper
        half-annulus.  Continuous as a line field but non-orientable.
    ``half_index``
        On the square (-1,1)^2: lines of (y, -x) for x >= 0, vertical
        lines for x < 0 — an index one-half defect at the origin.  (The
        origin itself, where no line is defined, is assigned the
        vertical line.)
    ``tangential_outer``
        On the annulus 1/2 < r < 1: lines tangent to concentric
        circles; orientable.
    ``constant``
        Horizontal lines on the annulus; orientable, all loop degrees
        zero.

    Returns
    -------
    (DomainSpec, sample) where ``sample(points) -> (N, 2)`` planar
    tensor values.
    """
    from . import geometry

    s = tensor.check_order_parameter(s)

    def tensorize(directors):
        norms = np.linalg.norm(directors, axis=-1, keepdims=True)
        return tensor.project_planar(directors / norms, s)

    if name == "horseshoe":
        spec = geometry.preset("horseshoe")

        def sample(points):
            pts = np.atleast_2d(np.asarray(points, dtype=float))
            x, y = pts[:, 0], pts[:, 1]
            n = np.zeros_like(pts)
            lower = y <= 0.0
            n[lower] = (0.0, 1.0)
            r = np.hypot(x[~lower], y[~lower])
            n[~lower, 0] = -y[~lower] / r
            n[~lower, 1] = x[~lower] / r
            return tensorize(n)

    elif name == "half_index":
        spec = geometry.preset("square")

        def sample(points):
            pts = np.atleast_2d(np.asarray(points, dtype=float))
            x, y = pts[:, 0], pts[:, 1]
            n = np.zeros_like(pts)
            left = x < 0.0
            n[left] = (0.0, 1.0)
            r = np.hypot(x[~left], y[~left])
            safe = r > 1e-12
            idx = np.flatnonzero(~left)
            n[idx[safe], 0] = y[~left][safe] / r[safe]
            n[idx[safe], 1] = -x[~left][safe] / r[safe]
            n[idx[~safe]] = (0.0, 1.0)
            return tensorize(n)

    elif name == "tangential_outer":
        spec = geometry.preset("annulus")

        def sample(points):
            pts = np.atleast_2d(np.asarray(points, dtype=float))
            r = np.hypot(pts[:, 0], pts[:, 1])
            n = np.stack([-pts[:, 1] / r, pts[:, 0] / r], axis=-1)
            return tensorize(n)

    elif name == "constant":
        spec = geometry.preset("annulus")

        def sample(points):
            pts = np.atleast_2d(np.asarray(points, dtype=float))
            n = np.zeros_like(pts)
            n[:, 0] = 1.0
            return tensorize(n)

    else:
        raise ValueError(f"unknown canonical field {name!r}")

    return spec, sample
