"""Ginibre edge: how fast does the sqrt(n) correction take over?

For Q = |z|^2 the droplet is the unit disk and Delta Q = 1, so the curvature
term is the only correction:

    R_n(1 + t/sqrt(2n)) = n erfc(t)/2 + sqrt(n) (t^2 - 2) e^{-t^2} / (6 sqrt(2 pi)) + ...

We evaluate the exact density at the edge and watch D_n = (R_n - leading)/sqrt(n)
settle onto the predicted profile.
"""

import math

import numpy as np

from coulomb_edge import GINIBRE, edge_data_radial
from coulomb_edge.edge import default_t_grid, density_profile
from coulomb_edge.opkernel import ginibre_density_closed

e = edge_data_radial(GINIBRE)
print(f"edge data: R={e.radius_or_axes:g}  Delta Q={e.delta_q:g}  kappa={e.kappa:g}")

# At t = 0 the prediction is -1/(3 sqrt(2 pi)).
target = -1 / (3 * math.sqrt(2 * math.pi))
print(f"\nD_n(0) against {target:.8f}")
for n in (16, 64, 256, 1024, 4096):
    d = (ginibre_density_closed(n, 1.0) - n / 2) / math.sqrt(n)
    print(f"  n={n:5d}  D_n(0)={d:+.8f}  gap={abs(d - target):.2e}")

# The whole profile; the residual halves each time n grows fourfold.
t = default_t_grid()
print("\nmax_t |D_n - C| on t in [-2.5, 2.5]")
for n in (256, 1024, 4096):
    prof = density_profile(GINIBRE, n, t)
    print(f"  n={n:5d}  {prof.max_deviation():.3e}")

prof = density_profile(GINIBRE, 4096, t)
print("\n   t      D_n        C")
for ti, dn, c in zip(t[::4], prof.D_n[::4], prof.C[::4]):
    print(f"{ti:+5.2f}  {dn:+.6f}  {c:+.6f}")
