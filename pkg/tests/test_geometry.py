import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coulomb_edge import geometry as G
from coulomb_edge.errors import DomainError, GeometryError
from coulomb_edge.potential import QUARTIC, edge_data_radial


def test_jacobian_examples():
    assert G.jacobian_factor(2.0, 1.0, 0.0, 25) == pytest.approx(1 / (math.pi * 10), rel=1e-15)
    vals = {G.jacobian_factor(1.0, 0.0, t, 100) for t in (-3.0, 0.0, 2.0)}
    assert len(vals) == 1
    with pytest.raises(GeometryError):
        G.jacobian_factor(1.0, 1.0, -100.0, 10)
    with pytest.raises(DomainError):
        G.jacobian_factor(0.0, 1.0, 0.0, 10)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(0.5, 4.0), st.integers(4, 5000), st.floats(-3, 3), st.floats(0.01, 3))
def test_annulus_area_exact(R, dq, n, t1, width):
    t2 = t1 + width
    scale = 1 / math.sqrt(2 * n * dq)
    r1, r2 = R + t1 * scale, R + t2 * scale
    if r1 <= 0:
        return
    assert abs(G.annulus_area_by_chart(R, dq, n, t1, t2) - (r2**2 - r1**2)) <= 1e-12


def test_curvature_examples():
    circle = G.ArclengthCurve.circle(2.0)
    for s in np.linspace(0, circle.length, 7):
        assert G.curvature_finite_difference(circle, s) == pytest.approx(0.5, abs=1e-8)
    ellipse = G.ArclengthCurve.ellipse(1.5, 0.5)
    assert abs(G.curvature_finite_difference(ellipse, 0.0) - 6.0) <= 1e-5
    seg = G.ArclengthCurve.segment(0, 1 + 1j)
    assert abs(G.curvature_finite_difference(seg, 0.5, h=0.05)) <= 1e-12


def test_ellipse_curvature_matches_closed_form_along_curve():
    a, b = 1.5, 0.5
    ellipse = G.ArclengthCurve.ellipse(a, b)
    for s in np.linspace(0, ellipse.length, 9)[:-1]:
        th = ellipse.theta_of_s(s)
        closed = a * b / (a**2 * math.sin(th) ** 2 + b**2 * math.cos(th) ** 2) ** 1.5
        assert G.curvature_finite_difference(ellipse, s) == pytest.approx(closed, rel=1e-6)


def test_gauss_bonnet():
    assert abs(G.total_curvature(G.ArclengthCurve.ellipse(1.5, 0.5)) - 2 * math.pi) <= 1e-5
    with pytest.raises(DomainError):
        G.total_curvature(G.ArclengthCurve.segment(0, 1))


def test_arclength_inverse():
    ellipse = G.ArclengthCurve.ellipse(1.5, 0.5)
    s = 0.37 * ellipse.length
    assert ellipse._arc(0, ellipse.theta_of_s(s)) == pytest.approx(s, abs=1e-12)
    assert ellipse.point(ellipse.length + s) == pytest.approx(ellipse.point(s), abs=1e-12)


@pytest.mark.parametrize("name", sorted(G.STANDARD_FIELDS))
def test_laplacian_identity_analytic(name):
    u = G.STANDARD_FIELDS[name]
    for r in (0.5, 1.0, 2.0):
        for th in np.linspace(0, 2 * np.pi, 7):
            assert G.laplacian_normal_identity_check(u, r, th) <= 1e-10


@pytest.mark.parametrize("name", sorted(G.STANDARD_FIELDS))
def test_laplacian_identity_finite_difference(name):
    u = G.STANDARD_FIELDS[name]
    assert G.laplacian_normal_identity_check(u, 1.3, 0.4, derivatives="finite-difference") <= 1e-5


def test_laplacian_identity_components_for_re_z():
    # d_s^2 u = -cos(th)/r and kappa d_n u = cos(th)/r cancel for u = Re z
    r, th = 2.0, 0.3
    assert G.laplacian_normal_identity_check(G.STANDARD_FIELDS["Re z"], r, th) == 0.0
    with pytest.raises(DomainError):
        G.laplacian_normal_identity_check(G.ScalarField(lambda x, y: x), 1.0, 0.0)
    with pytest.raises(DomainError):
        G.laplacian_normal_identity_check(G.STANDARD_FIELDS["Re z"], 1.0, 0.0, derivatives="spectral")


def test_radial_normal_chart():
    edge = edge_data_radial(QUARTIC)
    chart = G.NormalChart.radial(edge, 256)
    R = edge.radius_or_axes
    assert chart(0.0, 0.0) == pytest.approx(R, abs=1e-12)
    assert abs(chart(0.3, 1.0)) == pytest.approx(R + 1 / math.sqrt(512 * edge.delta_q), abs=1e-12)
