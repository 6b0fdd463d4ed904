#!/usr/bin/env python3
"""Orientation by sign propagation: when does a line field admit a director?

A line field assigns an unoriented axis to each point; a director field
picks one of the two unit vectors along it, continuously.  Obstructions
are purely topological: along any closed loop the auxiliary field
A(Q) = e^{2 i theta} has an integer winding, and a director exists on
the loop iff that winding is even.  On a mesh the same question is
decided constructively by propagating signs across edges; failure
produces a witness cycle whose sign relations multiply to -1.
"""

import numpy as np

from nematic_orient import degree, geometry, lifting, tensor

for name in ("constant", "tangential_outer", "horseshoe"):
    spec, sample = lifting.canonical_field(name)
    mesh = geometry.triangulate(spec, 0.08)
    q = sample(mesh.nodes)
    lift = lifting.lift_field(mesh, q, 1.0)
    print(f"== {name} ({spec.name} domain, {len(mesh.nodes)} nodes) ==")
    print(f"  orientable: {lift.orientable}")
    for i, loop in enumerate(mesh.loops):
        ok, deg = degree.boundary_orientable(q[loop], 1.0)
        label = "outer" if i == 0 else f"hole {i}"
        print(f"  {label}: deg A = {deg} ({'even' if ok else 'odd'})")
    if not lift.orientable:
        prod = lifting.witness_sign_product(q, 1.0, lift.witness)
        print(f"  witness cycle: {len(lift.witness)} nodes, sign product {prod}")
    print()

print("== the two-lift principle on a path ==\n")
rng = np.random.default_rng(0)
theta = np.cumsum(rng.uniform(-1.0, 1.0, size=12))
n = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
q = tensor.project_planar(n, 1.0)
up = lifting.lift_path(q, 1.0, n[0]).directors
down = lifting.lift_path(q, 1.0, -n[0]).directors
print("lift from +n0 equals the input path:", bool(np.allclose(up, n)))
print("lift from -n0 is its pointwise negation:", bool(np.allclose(down, -n)))
print("\nany sampled line-field path has exactly these two director lifts;")
print("a closed loop glues them iff the auxiliary winding is even.")
