import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coulomb_edge import fluct as F
from coulomb_edge.errors import DomainError, MisuseError
from coulomb_edge.potential import GINIBRE, MIXED, QUARTIC

ONE = F.TestFunction.from_coeffs([[1, 0]])
R2 = F.TestFunction.from_coeffs([[1, 2]])
R4 = F.TestFunction.from_coeffs([[1, 4]])


def test_test_function_labels():
    assert ONE.label == "1" and R2.label == "r^2" and R4.label == "r^4"
    assert F.TestFunction.from_coeffs([[1, 4], [2, 2]]).label == "2*r^2+r^4"
    assert F.TestFunction.from_coeffs([[1, 2]], label="r^2").label == "r^2"
    with pytest.raises(MisuseError):
        F.TestFunction.from_coeffs([[1, 4]], label="r^2")
    for bad in ([[1, 3]], [[1, -2]], [[0, 2]], [[1]]):
        with pytest.raises(DomainError):
            F.TestFunction.from_coeffs(bad)
    R4.check(1.0)


def test_rho_half_examples():
    assert F.rho_half(GINIBRE, R2) == pytest.approx(0.5, abs=1e-12)
    assert F.rho_half(GINIBRE, R4) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("pot", [GINIBRE, QUARTIC, MIXED], ids=lambda p: p.label)
def test_rho_half_of_constant_vanishes(pot):
    assert abs(F.rho_half(pot, ONE)) <= 1e-10


@pytest.mark.parametrize("n", [1, 16, 256, 2048])
def test_ginibre_r2_is_exact(n):
    assert abs(F.expected_fluct(GINIBRE, R2, n) - 0.5) <= 1e-10


@pytest.mark.parametrize("n", [16, 100, 1000])
def test_ginibre_r4_closed_form(n):
    assert abs(F.expected_fluct(GINIBRE, R4, n) - (1 + 2 / (3 * n))) <= 1e-8


@pytest.mark.parametrize("pot", [GINIBRE, QUARTIC, MIXED], ids=lambda p: p.label)
@pytest.mark.parametrize("n", [7, 300])
def test_constant_has_zero_fluctuation(pot, n):
    assert abs(F.expected_fluct(pot, ONE, n)) <= 1e-8


@pytest.mark.parametrize("pot", [QUARTIC, MIXED], ids=lambda p: p.label)
@pytest.mark.parametrize("f", [R2, R4], ids=lambda f: f.label)
def test_two_evaluators_agree(pot, f):
    for n in (8, 64, 300):
        assert F.expected_fluct(pot, f, n) == pytest.approx(F.expected_fluct_by_modes(pot, f, n), abs=1e-9)


@settings(max_examples=15, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.integers(2, 200))
def test_expected_fluct_is_linear(a, b, n):
    f = F.TestFunction.from_coeffs([[a, 2], [b, 4]]) if a and b else R2
    lhs = F.expected_fluct(MIXED, f, n)
    ca, cb = (a, b) if a and b else (1.0, 0.0)
    rhs = ca * F.expected_fluct(MIXED, R2, n) + cb * F.expected_fluct(MIXED, R4, n)
    assert lhs == pytest.approx(rhs, abs=1e-10)


def test_fluct_convergence_examples():
    rep = F.fluct_convergence(GINIBRE, R4, [64, 1024])
    assert rep.decay
    assert rep.rows[0][3] == pytest.approx(2 / (3 * 64), abs=1e-8)
    assert rep.rows[1][3] == pytest.approx(2 / (3 * 1024), abs=1e-8)
    rep = F.fluct_convergence(GINIBRE, R2, [16, 256])
    assert rep.decay and all(row[3] <= 1e-10 for row in rep.rows)
    assert rep.to_csv().splitlines()[0] == ",".join(F.FLUCT_COLUMNS)


def test_fluct_convergence_mixed():
    rep = F.fluct_convergence(MIXED, R2, [256, 4096])
    assert rep.decay
    assert rep.rows[1][3] <= 0.5 * rep.rows[0][3]


def test_fluct_convergence_validation():
    with pytest.raises(DomainError):
        F.fluct_convergence(GINIBRE, R2, [256])
    with pytest.raises(DomainError):
        F.fluct_convergence(GINIBRE, R2, [256, 64])
    with pytest.raises(DomainError):
        F.fluct_convergence(GINIBRE, R2, [64, 512])
    with pytest.raises(DomainError):
        F.expected_fluct(GINIBRE, R2, 10_000)
