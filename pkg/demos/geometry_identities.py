"""Small geometric facts the edge analysis leans on.

The normal-coordinate Laplacian, the Jacobian of the edge chart and the total
curvature of a closed curve can each be checked to near machine precision.
"""

import math

from coulomb_edge import geometry as G

print("4 Delta u = d_s^2 u + d_n^2 u + kappa d_n u on circles (defect):")
for name, u in G.STANDARD_FIELDS.items():
    worst = max(G.laplacian_normal_identity_check(u, r, th) for r in (0.5, 1, 2) for th in (0.1, 1.3, 4.0))
    print(f"  {name:7s} {worst:.1e}")

R, dq, n = 1.0, 1.0, 256
t1, t2 = -2.0, 2.0
s = 1 / math.sqrt(2 * n * dq)
exact = (R + t2 * s) ** 2 - (R + t1 * s) ** 2
print(f"\nannulus area via the chart: {G.annulus_area_by_chart(R, dq, n, t1, t2):.15f}  exact {exact:.15f}")

ellipse = G.ArclengthCurve.ellipse(1.5, 0.5)
print(f"\ncurvature at the tip of the (1.5, 0.5) ellipse: {G.curvature_finite_difference(ellipse, 0.0):.9f}")
print(f"total curvature / 2 pi: {G.total_curvature(ellipse) / (2 * math.pi):.12f}")
