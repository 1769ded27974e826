import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coulomb_edge import potential as P
from coulomb_edge.errors import DomainError, DropletError, GeometryError, NumericError
from coulomb_edge.potential import GINIBRE, MIXED, QUARTIC, EllipticGinibrePotential, RadialPotential


def test_delta_q_examples():
    assert P.delta_q(GINIBRE, 0.37) == pytest.approx(1.0, abs=1e-15)
    assert P.delta_q(QUARTIC, 0.5) == pytest.approx(1.0, abs=1e-15)
    assert P.delta_q(MIXED, 1.0) == pytest.approx(5.0, abs=1e-14)
    with pytest.raises(DomainError):
        P.delta_q(GINIBRE, 0.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 3.0))
def test_delta_q_matches_laplacian_of_q(r):
    # Cartesian finite-difference Laplacian of Q(x, y) = q(sqrt(x^2 + y^2)), divided by 4
    h = 1e-4
    f = lambda x, y: float(MIXED.q(math.hypot(x, y)))
    lap = (f(r + h, 0) + f(r - h, 0) + f(r, h) + f(r, -h) - 4 * f(r, 0)) / h**2
    assert lap / 4 == pytest.approx(float(P.delta_q(MIXED, r)), rel=1e-5)


@pytest.mark.parametrize("pot, R", [(GINIBRE, 1.0), (QUARTIC, 2 ** -0.25), (MIXED, 2 ** -0.5)])
def test_droplet_radius(pot, R):
    assert P.droplet_radius(pot) == pytest.approx(R, abs=1e-13)
    assert P.equilibrium_mass(pot, P.droplet_radius(pot)) == pytest.approx(1.0, abs=1e-12)


def test_droplet_radius_failures():
    annular = RadialPotential.from_coeffs([(-2.0, 2), (1.0, 4)])
    with pytest.raises(DropletError):
        P.droplet_radius(annular)
    with pytest.raises(DropletError):
        P.droplet_radius(GINIBRE, bracket=(2.0, 5.0))
    with pytest.raises(DomainError):
        P.droplet_radius(GINIBRE, bracket=(1.0, 0.5))


def test_equilibrium_mass_examples():
    assert P.equilibrium_mass(GINIBRE, 1.0) == pytest.approx(1.0, abs=1e-14)
    assert P.equilibrium_mass(GINIBRE, 0.5) == pytest.approx(0.25, abs=1e-14)
    assert P.equilibrium_mass(QUARTIC, 1.0) == pytest.approx(2.0, abs=1e-14)


def test_equilibrium_mass_detects_inconsistent_derivatives():
    bad = RadialPotential(q=lambda r: r**2, dq=lambda r: 2 * r, d2q=lambda r: 3.0 + 0 * r,
                          d3q=lambda r: 0 * r, label="bad")
    with pytest.raises(NumericError):
        P.equilibrium_mass(bad, 1.0)
    with pytest.raises(DomainError):
        P.check_radial_invariants(bad)


def test_from_coeffs_validation_and_labels():
    assert MIXED.label == "r^2+r^4"
    assert RadialPotential.from_coeffs([[1, 4], [1, 2]]).label == "r^2+r^4"
    for bad in ([[1, 3]], [[1, 0]], [[1, 2.5]], [[1]]):
        with pytest.raises(DomainError):
            RadialPotential.from_coeffs(bad)
    assert QUARTIC(0.5 + 0.5j) == pytest.approx(0.25, abs=1e-15)


def test_check_radial_invariants_accepts_defaults():
    for pot in (GINIBRE, QUARTIC, MIXED):
        P.check_radial_invariants(pot)


def test_edge_data_radial_ginibre():
    e = P.edge_data_radial(GINIBRE)
    assert (e.radius_or_axes, e.delta_q, e.kappa, e.dn_L, e.dn_LS) == pytest.approx((1, 1, 1, 0, 0), abs=1e-13)


def test_edge_data_radial_quartic():
    e = P.edge_data_radial(QUARTIC)
    assert e.radius_or_axes == pytest.approx(2 ** -0.25, abs=1e-13)
    assert e.delta_q == pytest.approx(2 * math.sqrt(2), abs=1e-12)
    assert e.kappa == pytest.approx(2 ** 0.25, abs=1e-12)
    assert e.dn_L == pytest.approx(2 ** 1.25, abs=1e-12)
    assert e.dn_LS == 0.0


def test_edge_data_radial_mixed():
    e = P.edge_data_radial(MIXED)
    assert e.delta_q == pytest.approx(3.0, abs=1e-12)
    assert e.kappa == pytest.approx(math.sqrt(2), abs=1e-12)
    assert e.dn_L == pytest.approx(4 * math.sqrt(2) / 3, abs=1e-12)


def test_edge_data_invariants_enforced():
    with pytest.raises(GeometryError):
        P.EdgeData(1.0, 1.1 + 0j, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0)
    with pytest.raises(GeometryError):
        P.EdgeData(1.0, 1 + 0j, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0)
    with pytest.raises(GeometryError):
        P.EdgeData(1.0, 1 + 0j, 1.0, 2.0, 1.0, 1.0, 0.0, 1.0)


def test_elliptic_tau_zero_is_ginibre():
    e = P.edge_data_elliptic(EllipticGinibrePotential(0.0))
    assert e.kappa == pytest.approx(1.0, abs=1e-6)
    assert e.delta_q == 1.0


def test_elliptic_half():
    pot = EllipticGinibrePotential(0.5)
    e = P.edge_data_elliptic(pot)
    assert pot.semi_axes == (1.5, 0.5)
    assert e.delta_q == pytest.approx(4 / 3, abs=1e-15)
    assert e.kappa == pytest.approx(6.0, abs=1e-5)
    assert e.delta_q * 1.5 * 0.5 == pytest.approx(1.0, abs=1e-15)
    assert P.validate_elliptic_droplet(pot) <= 1e-6


def test_elliptic_rejects_bad_tau():
    for tau in (-0.1, 1.0):
        with pytest.raises(DomainError):
            EllipticGinibrePotential(tau)


def test_wrong_ellipse_fails_variational_check():
    # the disk of the Ginibre droplet is not the droplet for tau = 0.5
    a, b = 1.0, 1.0
    values = [float(EllipticGinibrePotential(0.5)(z)) - 2 * (4 / 3) * P.log_potential_ellipse(z, a, b)
              for z in (0.1, 0.5j, -0.4 + 0.2j)]
    assert max(values) - min(values) > 1e-2


def test_log_potential_of_disk_closed_form():
    # (1/pi) int_D log|z - w| d^2 w = (|z|^2 - 1)/2 for the unit disk
    for z in (0.0, 0.3 + 0.2j, -0.7j):
        assert P.log_potential_ellipse(z, 1.0, 1.0) == pytest.approx((abs(z) ** 2 - 1) / 2, abs=1e-12)


def test_potential_from_spec():
    assert P.potential_from_spec({"type": "radial-poly", "coeffs": [[1, 2]]}).label == "r^2"
    assert P.potential_from_spec({"type": "elliptic", "tau": 0.5}).tau == 0.5
    for bad in ({"type": "bogus"}, {"coeffs": [[1, 2]]}, {"type": "elliptic"}, {"type": "radial-poly"}):
        with pytest.raises(DomainError):
            P.potential_from_spec(bad)
