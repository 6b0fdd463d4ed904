"""Winding numbers of discrete circle-valued loops and degree-parity tests.

Loops are cyclic sequences of unit complex numbers (or unit 2-vectors).
The convention throughout the package is that boundary loops are
traversed with the material region on the LEFT: outer boundaries
counterclockwise, hole boundaries clockwise.  With that convention the
degrees of a globally defined circle-valued field over all boundary
loops of a domain sum to zero.
"""

from __future__ import annotations

import numpy as np

from . import tensor

__all__ = [
    "WindingGapError",
    "NonIntegerWindingError",
    "angular_increments",
    "winding_number",
    "boundary_orientable",
    "degree_sum",
]

#: Largest admissible angular gap between consecutive samples.
GAP_TOL = np.pi - 1e-9

#: Residual beyond which the total rotation is rejected as non-integer.
INTEGER_TOL = 1e-6


class WindingGapError(ValueError):
    """Two consecutive samples are nearly antipodal: the loop is under-sampled."""

    def __init__(self, index: int, gap: float):
        self.index = index
        self.gap = gap
        super().__init__(
            f"angular gap {gap:.6f} rad at sample {index} reaches pi; loop is under-sampled"
        )


class NonIntegerWindingError(ValueError):
    """Summed increments do not close up to an integer number of turns."""

    def __init__(self, turns: float):
        self.turns = turns
        super().__init__(f"total rotation {turns!r} turns is not an integer; inconsistent loop data")


def _as_unit_complex(loop):
    v = np.asarray(loop)
    if v.ndim == 2 and v.shape[-1] == 2 and not np.iscomplexobj(v):
        v = v[:, 0] + 1j * v[:, 1]
    v = np.ravel(np.asarray(v, dtype=complex))
    if v.size < 2:
        raise ValueError("a loop needs at least two samples")
    mag = np.abs(v)
    if np.any(mag < 1e-12):
        raise ValueError("loop samples must be nonzero")
    return v / mag


def angular_increments(loop):
    """Signed shortest-branch rotation from each sample to the next (cyclic).

    Increments are computed branch-cut free as the argument of the
    relative rotation v_{k+1} * conj(v_k).  Raises
    :class:`WindingGapError` if any increment reaches pi - 1e-9.
    """
    v = _as_unit_complex(loop)
    inc = np.angle(np.roll(v, -1) * np.conj(v))
    worst = int(np.argmax(np.abs(inc)))
    if abs(inc[worst]) >= GAP_TOL:
        raise WindingGapError(worst, float(abs(inc[worst])))
    return inc


def winding_number(loop) -> int:
    """Winding number of a cyclic sequence of unit complex samples.

    Parameters
    ----------
    loop : array_like
        Complex samples, or an (M, 2) real array of unit 2-vectors.
        The closing increment from the last sample back to the first is
        included automatically.

    Returns
    -------
    int
    """
    turns = float(np.sum(angular_increments(loop)) / (2.0 * np.pi))
    nearest = round(turns)
    if abs(turns - nearest) > INTEGER_TOL:
        raise NonIntegerWindingError(turns)
    return int(nearest)


def boundary_orientable(loop_q, s):
    """Degree-parity orientability of a line field along a closed loop.

    Parameters
    ----------
    loop_q : array_like, shape (M, 2)
        Planar tensor samples (q11, q12) around the loop.
    s : float

    Returns
    -------
    (orientable, deg) : (bool, int)
        ``deg`` is the winding number of the auxiliary field A along the
        loop; the line field restricted to the loop is orientable iff
        deg is even (the oriented loop then winds deg/2 times).
    """
    a = tensor.aux(np.asarray(loop_q, dtype=float), s)
    deg = winding_number(a)
    return (deg % 2 == 0, deg)


def degree_sum(outer_deg: int, hole_degs) -> int:
    """Residual outer_deg + sum(hole_degs) under material-on-left orientations.

    Zero for the boundary degrees of any globally defined circle-valued
    field; a nonzero residual means the loop degrees cannot come from
    one field.
    """
    return int(outer_deg) + int(sum(int(d) for d in hole_degs))
