#!/usr/bin/env python3
"""Verification of the P1 solver on a manufactured solution.

u = log r is harmonic on the annulus 1/2 < r < 1 with known Dirichlet
energy 2 pi log 2 and unit normalized flux through the hole, so it
exercises the solver, the energy quadrature, and both flux extraction
methods with exact references.
"""

import numpy as np

from nematic_orient import geometry, harmonic

exact_energy = 2.0 * np.pi * np.log(2.0)

print("manufactured solution u = log r on the annulus 1/2 < r < 1\n")
print(f"{'h':>6} {'nodes':>7} {'max |u_h - u|':>14} {'energy err':>12} {'flux err':>12}")

prev = None
for h in (0.16, 0.08, 0.04, 0.02):
    mesh = geometry.triangulate(geometry.preset("annulus"), h)
    field = harmonic.solve_laplace(mesh, {0: 0.0, 1: np.log(0.5)})
    r = np.linalg.norm(mesh.nodes, axis=1)
    nodal = float(np.max(np.abs(field.values - np.log(r))))
    energy = abs(harmonic.field_energy(field) - exact_energy) / exact_energy
    fluxerr = abs(harmonic.conormal_flux(field, 1) + 1.0)
    rate = "" if prev is None else f"   (nodal err ratio {prev / nodal:.1f})"
    print(f"{h:>6} {len(mesh.nodes):>7} {nodal:>14.3e} {energy:>12.3e} {fluxerr:>12.3e}{rate}")
    prev = nodal

print("\nthe two flux extractions on a two-hole problem:\n")
for h in (0.1, 0.05):
    mesh = geometry.triangulate(geometry.preset("stadium", delta=2.0), h)
    g = geometry.tangential_boundary_data(mesh, 1.0)
    flux = harmonic.compute_J(mesh, g)
    print(f"h = {h}: J = {flux.J}, boundary-integral J = {flux.J_alt},"
          f" disagreement {flux.mismatch:.2e}")

print("\nthe disagreement between the methods tracks the discretization"
      "\nerror, which is what makes it usable as a built-in error estimate.")
