"""Non-constant Delta Q at the edge: Q = r^4.

Here Delta Q = 4 r^2 grows across the boundary, so d_n log Delta Q enters the
correction through the t erfc(t) term and the Gaussian coefficients.  The
harmonic extension of L outside a disk is constant, so d_n L^S = 0.
"""

import math
import warnings

from coulomb_edge import QUARTIC, edge_data_radial
from coulomb_edge.edge import OutOfWindowWarning, c_correction, c_hele_shaw, default_t_grid, residual_study

e = edge_data_radial(QUARTIC)
print(f"R = 2^(-1/4) = {e.radius_or_axes:.7f}")
print(f"Delta Q = {e.delta_q:.7f}, kappa = {e.kappa:.7f}, d_n L = {e.dn_L:.7f}")

print("\n   t   C(t)       curvature part only")
for t in (-2.0, -1.0, 0.0, 1.0, 2.0):
    print(f"{t:+5.1f}  {c_correction(e, t):+.6f}  {c_hele_shaw(e.kappa, t):+.6f}")

with warnings.catch_warnings():
    warnings.simplefilter("ignore", OutOfWindowWarning)
    study = residual_study(QUARTIC, [256, 1024, 4096], default_t_grid())
print()
print(study.report())
# Dropping the d_n L terms would leave a residual that does not shrink:
n = 4096
prof = study.profiles[n]
wrong = max(abs(dn - c_hele_shaw(e.kappa, t)) for t, dn in zip(prof.t_values, prof.D_n))
print(f"\nwith the curvature term alone, max_t |D_{n} - C| = {wrong:.3f}")
