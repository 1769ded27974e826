"""Expected linear statistics and their limit.

E[sum f(z_j)] - n int f d sigma converges to a distribution rho(f) built from
Delta log Delta Q inside the droplet and two boundary terms.  For Ginibre the
limit is reached exactly (f = r^2) or with an explicit 2/(3n) correction
(f = r^4); for Q = r^2 + r^4 there is no closed form and we watch the gap close.
"""

from coulomb_edge import GINIBRE, MIXED, QUARTIC, TestFunction, expected_fluct, fluct_convergence, rho_half
from coulomb_edge.fluct import expected_fluct_by_modes

one = TestFunction.from_coeffs([[1, 0]])
r2 = TestFunction.from_coeffs([[1, 2]])
r4 = TestFunction.from_coeffs([[1, 4]])

print("rho(1), which must vanish:")
for pot in (GINIBRE, QUARTIC, MIXED):
    print(f"  {pot.label:8s} {rho_half(pot, one):+.2e}")

print("\nGinibre, f = r^4: expected fluctuation vs 1 + 2/(3n)")
for n in (16, 100, 1000):
    print(f"  n={n:5d}  {expected_fluct(GINIBRE, r4, n):.12f}  {1 + 2 / (3 * n):.12f}")

print("\nQ = r^2 + r^4, f = r^2; two independent evaluators at n = 64:")
print(f"  grid quadrature {expected_fluct(MIXED, r2, 64):.12f}")
print(f"  mode by mode    {expected_fluct_by_modes(MIXED, r2, 64):.12f}")

rep = fluct_convergence(MIXED, r2, [64, 256, 1024, 4096])
print(f"\nrho(r^2) = {rep.rows[0][2]:.9f}")
for n, ef, _, gap in rep.rows:
    print(f"  n={n:5d}  E fluct = {ef:.9f}  gap = {gap:.2e}")
