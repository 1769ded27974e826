"""Elliptic Ginibre at the tip of the ellipse.

With Q = (|z|^2 - tau Re z^2)/(1 - tau^2) the droplet is an ellipse with
semi-axes 1 + tau and 1 - tau and Delta Q is constant, so only curvature
matters.  At the tip (1 + tau, 0) the curvature is a/b^2 = 6 for tau = 0.5,
which makes the correction six times the Ginibre one.
"""

import math

from coulomb_edge import EllipticGinibrePotential, edge_data_elliptic
from coulomb_edge.edge import c_correction
from coulomb_edge.opkernel import elliptic_density, elliptic_mass, validate_elliptic

tau = 0.5
pot = EllipticGinibrePotential(tau)

# The three-term recurrence is checked against a brute-force Gram-Schmidt kernel first.
print(f"recurrence vs Gram oracle, worst relative error: {validate_elliptic(tau):.1e}")
print(f"mass at n = 64: {elliptic_mass(tau, 64):.10f}")

e = edge_data_elliptic(pot)
print(f"kappa at the tip: {e.kappa:.8f} (a/b^2 = 6)")
c0 = c_correction(e, 0.0)
print(f"C(0) = {c0:.6f} = -2/sqrt(2 pi)")
for n in (64, 256, 1024, 4096):
    d = (elliptic_density(tau, n, e.boundary_point) - n * e.delta_q / 2) / math.sqrt(n * e.delta_q)
    print(f"  n={n:5d}  D_n(0) = {d:+.5f}  gap = {abs(d - c0):.2e}")
