"""Expected fluctuations of radial linear statistics.

``fluct_n f = sum_j f(z_j) - n int f d sigma``.  The exact finite-n
expectation, ``int f (R_n - n Delta Q 1_S) dA``, is compared with its limit

    rho(f) = int_S f Delta L / 2 dA - 1/(8 pi) oint f d_n(L - L^S) ds + 1/(8 pi) oint d_n f ds.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from . import opkernel
from .errors import DomainError, MisuseError, NumericError
from .potential import RadialPotential, dL_dr, delta_q, droplet_radius, laplacian_L

FLUCT_COLUMNS = ("pot_label", "f_label", "n", "expected_fluct", "rho_half", "gap")

@dataclass(frozen=True)
class TestFunction:
    """Radial test function ``f(|z|)`` with its radial derivative."""

    __test__ = False  # not a pytest class

    f: Callable[[np.ndarray], np.ndarray]
    df: Callable[[np.ndarray], np.ndarray]
    label: str

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[Sequence[float]], label: str | None = None) -> "TestFunction":
        """``f(r) = sum c r^p`` with even ``p >= 0``."""
        dense = {}
        for item in coeffs:
            if len(item) != 2:
                raise DomainError(f"coefficient entries must be [c, p] pairs, got {item!r}")
            c, p = item
            if isinstance(p, float) and p.is_integer():
                p = int(p)
            if not isinstance(p, int) or isinstance(p, bool) or p < 0 or p % 2:
                raise DomainError(f"powers must be even integers >= 0, got {p!r}")
            dense[p] = dense.get(p, 0.0) + float(c)
        terms = sorted((c, p) for p, c in dense.items() if c != 0.0)
        terms.sort(key=lambda cp: cp[1])
        if not terms:
            raise DomainError("empty coefficient list")
        arr = np.zeros(max(p for _, p in terms) + 1)
        for c, p in terms:
            arr[p] = c
        poly = np.polynomial.Polynomial(arr)
        canonical = "+".join(_label(c, p) for c, p in terms)
        if label is not None and label != canonical:
            raise MisuseError(f"test function label {label!r} does not match its coefficients ({canonical!r})")
        return cls(f=poly, df=poly.deriv(), label=canonical)

    def check(self, R: float) -> None:
        r = np.linspace(0.0, 3 * R, 65)
        if not np.all(np.isfinite(self.f(r))):
            raise DomainError(f"test function {self.label!r} is not bounded on [0, 3R]")
        rs = np.linspace(0.1 * R, 3 * R, 16)
        h = 1e-5 * np.maximum(1.0, rs)
        fd = (self.f(rs + h) - self.f(rs - h)) / (2 * h)
        ref = self.df(rs)
        scale = max(float(np.max(np.abs(ref))), 1e-300)
        if np.any(np.abs(fd - ref) > 1e-6 * np.maximum(np.abs(ref), 1e-3 * scale)):
            raise DomainError(f"df of {self.label!r} is inconsistent with f")


def _label(c: float, p: int) -> str:
    if p == 0:
        return f"{c:g}"
    if c == 1.0:
        return f"r^{p}"
    return f"{c:g}*r^{p}"


def rho_half(pot: RadialPotential, f: TestFunction) -> float:
    """Limit of ``E_n fluct_n f`` for a radial potential with disk droplet of radius ``R``.

    Radially, ``int_0^R f Delta L r dr - (R/4) f(R) L'(R) + (R/4) f'(R)``
    (``L^S`` is constant outside the disk).  When ``Delta Q`` vanishes to order
    ``m`` at the origin, ``Delta L`` carries an atom of ``dA``-mass ``m/2`` there,
    contributing ``f(0) m / 4``.
    """
    R = droplet_radius(pot)
    val, err, info = _quad(lambda r: f.f(r) * laplacian_L(pot, r) * r, 0.0, R)
    bulk = val + float(f.f(0.0)) * pot.origin_order / 4.0
    boundary = -0.25 * R * float(f.f(R)) * float(dL_dr(pot, R)) + 0.25 * R * float(f.df(R))
    return float(bulk + boundary)


def _quad(fn, a, b):
    val, err, info = integrate.quad(fn, a, b, epsabs=1e-14, epsrel=1e-13, limit=400, full_output=1)[:3]
    if err > 1e-10 * max(1.0, abs(val)):
        raise NumericError(f"quadrature on [{a}, {b}] did not converge (error estimate {err:.2e})")
    return val, err, info


def expected_fluct(pot: RadialPotential, f: TestFunction, n: int,
                   basis: opkernel.OrthoBasis | None = None) -> float:
    """``E_n fluct_n f = 2 int_0^inf f(r) (R_n(r) - n Delta Q(r) 1_{r<=R}) r dr``.

    Composite Gauss-Legendre split at ``R``, graded toward the edge; the
    exterior is integrated out to where ``R_n < 1e-16 n``.
    """
    if not 1 <= n <= 8192:
        raise DomainError(f"n must lie in 1..8192, got {n!r}")
    R = droplet_radius(pot)
    if basis is None:
        basis = opkernel.radial_norms(pot, n)
    (x_in, w_in, rn_in), (x_out, w_out, rn_out) = opkernel.edge_graded_rule(basis, pot, R)
    interior = 2.0 * np.sum(w_in * f.f(x_in) * (rn_in - n * delta_q(pot, x_in)) * x_in)
    exterior = 2.0 * np.sum(w_out * f.f(x_out) * rn_out * x_out)
    return float(interior + exterior)


def expected_fluct_by_modes(pot: RadialPotential, f: TestFunction, n: int) -> float:
    """Same expectation as :func:`expected_fluct`, summed mode by mode.

    ``E sum_k f(|z_k|) = sum_j int f |e_j|^2 dA``; the equilibrium part is a
    smooth integral over the disk.
    """
    R = droplet_radius(pot)
    trace = float(np.sum(opkernel.radial_mode_means(pot, n, f.f)))
    eq, _, _ = _quad(lambda r: f.f(r) * 2.0 * r * delta_q(pot, r) if r > 0 else 0.0, 0.0, R)
    return trace - n * eq


@dataclass
class FluctReport:
    pot_label: str
    f_label: str
    rows: list[tuple[int, float, float, float]]
    decay: bool

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(FLUCT_COLUMNS)
        for n, ef, rho, gap in self.rows:
            w.writerow([self.pot_label, self.f_label, n, format(ef, ".17g"), format(rho, ".17g"),
                        format(gap, ".17g")])
        return buf.getvalue()


def fluct_convergence(pot: RadialPotential, f: TestFunction, n_list: Sequence[int]) -> FluctReport:
    """Gaps ``|E_n fluct_n f - rho(f)|`` over ``n_list``.

    ``decay`` holds if the gap at the largest ``n`` is at most half the gap at
    the smallest, or both are below ``1e-6``.
    """
    n_list = [int(n) for n in n_list]
    if len(n_list) < 2 or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise DomainError(f"n_list must be ascending with at least two entries, got {n_list!r}")
    if n_list[-1] / n_list[0] < 16:
        raise DomainError("fluct_convergence needs max(n)/min(n) >= 16")
    rho = rho_half(pot, f)
    rows = []
    for n in n_list:
        ef = expected_fluct(pot, f, n)
        rows.append((n, ef, rho, abs(ef - rho)))
    g_lo, g_hi = rows[0][3], rows[-1][3]
    decay = g_hi <= 0.5 * g_lo or (g_lo <= 1e-6 and g_hi <= 1e-6)
    return FluctReport(pot.label, f.label, rows, bool(decay))
