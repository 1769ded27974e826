"""External potentials, droplets and boundary geometry.

Two families are supported:

* radial potentials ``Q(z) = q(|z|)``, either built from a coefficient list
  ``q(r) = sum_k c_k r^{p_k}`` or supplied as a derivative stack;
* the elliptic Ginibre potential ``Q(z) = (|z|^2 - tau Re z^2) / (1 - tau^2)``.

Laplacians are normalized, ``Delta = (d_x^2 + d_y^2) / 4``, and areas are
measured in ``dA = d^2 z / pi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import DomainError, DropletError, GeometryError, NumericError
from . import geometry

ArrayFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class RadialPotential:
    """Radial potential ``Q(z) = q(|z|)`` with its first radial derivatives.

    ``d4q`` is only needed where ``Delta log Delta Q`` is evaluated (fluctuation
    functional, bulk expansion).  ``origin_order`` is the order of vanishing of
    ``Delta Q`` at ``r = 0`` (0 when ``Delta Q(0) > 0``); it fixes the point mass
    that ``Delta log Delta Q`` carries at the origin.
    """

    q: ArrayFn
    dq: ArrayFn
    d2q: ArrayFn
    d3q: ArrayFn
    label: str
    d4q: ArrayFn | None = None
    origin_order: int = 0
    coeffs: tuple[tuple[float, int], ...] | None = field(default=None, compare=False)
    delta_q_poly: np.polynomial.Polynomial | None = field(default=None, compare=False, repr=False)

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[Sequence[float]], label: str | None = None) -> "RadialPotential":
        """Build ``q(r) = sum c r^p`` from ``[(c, p), ...]`` with even ``p >= 2``."""
        terms = []
        for item in coeffs:
            if len(item) != 2:
                raise DomainError(f"coefficient entries must be [c, p] pairs, got {item!r}")
            c, p = item
            if isinstance(p, float):
                if not p.is_integer():
                    raise DomainError(f"power {p!r} is not an integer")
                p = int(p)
            if not isinstance(p, int) or isinstance(p, bool) or p < 2 or p % 2:
                raise DomainError(f"powers must be even integers >= 2, got {p!r}")
            c = float(c)
            if not math.isfinite(c):
                raise DomainError(f"non-finite coefficient {c!r}")
            if c != 0.0:
                terms.append((c, p))
        if not terms:
            raise DomainError("empty coefficient list")
        terms.sort(key=lambda cp: cp[1])
        poly = np.polynomial.Polynomial(_dense(terms))
        derivs = [poly.deriv(k) for k in range(5)]
        if label is None:
            label = "+".join(_term_label(c, p) for c, p in terms)
        # lowest power of Delta Q = sum c p^2 r^(p-2) / 4
        origin_order = terms[0][1] - 2
        lap = np.polynomial.Polynomial(_dense([(c * p * p / 4.0, p - 2) for c, p in terms]))
        return cls(
            q=derivs[0],
            dq=derivs[1],
            d2q=derivs[2],
            d3q=derivs[3],
            d4q=derivs[4],
            label=label,
            origin_order=origin_order,
            coeffs=tuple(terms),
            delta_q_poly=lap,
        )

    def __call__(self, z):
        return self.q(np.abs(z))


def _dense(terms):
    out = np.zeros(max(p for _, p in terms) + 1)
    for c, p in terms:
        out[p] += c
    return out


def _term_label(c: float, p: int) -> str:
    if c == 1.0:
        return f"r^{p}"
    return f"{c:g}*r^{p}"


@dataclass(frozen=True)
class EllipticGinibrePotential:
    """``Q(z) = (|z|^2 - tau Re z^2) / (1 - tau^2)`` with ``0 <= tau < 1``."""

    tau: float

    def __post_init__(self):
        if not 0.0 <= self.tau < 1.0:
            raise DomainError(f"tau must lie in [0, 1), got {self.tau!r}")

    @property
    def label(self) -> str:
        return f"elliptic(tau={self.tau:g})"

    @property
    def semi_axes(self) -> tuple[float, float]:
        return 1.0 + self.tau, 1.0 - self.tau

    @property
    def delta_q_value(self) -> float:
        return 1.0 / (1.0 - self.tau**2)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return (np.abs(z) ** 2 - self.tau * np.real(z * z)) / (1.0 - self.tau**2)

    def delta_q_at(self, z) -> np.ndarray:
        """``Delta Q`` at ``z``; a constant, returned with the shape of ``z``."""
        return np.full(np.shape(z), self.delta_q_value)


@dataclass(frozen=True)
class EdgeData:
    """Geometry at a boundary point of the droplet.

    ``dn_L`` is the normal derivative of ``L = log Delta Q``; ``dn_LS`` the
    exterior normal derivative of its bounded harmonic extension.
    """

    boundary_point: complex
    outward_normal: complex
    radius_or_axes: float | tuple[float, float]
    delta_q: float
    kappa: float
    dn_L: float
    dn_LS: float
    dn_delta_q: float
    label: str = ""

    def __post_init__(self):
        if abs(abs(self.outward_normal) - 1.0) > 1e-14:
            raise GeometryError(f"outward normal {self.outward_normal!r} is not a unit vector")
        if not self.delta_q > 0:
            raise GeometryError(f"Delta Q must be positive at the edge, got {self.delta_q!r}")
        if abs(self.dn_L - self.dn_delta_q / self.delta_q) > 1e-12 * max(1.0, abs(self.dn_L)):
            raise GeometryError("dn_L is inconsistent with dn_delta_q / delta_q")


# ---------------------------------------------------------------------------
# Radial potentials


def delta_q(pot: RadialPotential, r):
    """Normalized Laplacian ``(q'' + q'/r) / 4`` of a radial potential at ``r > 0``."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("delta_q needs r > 0")
    if pot.delta_q_poly is not None:
        out = np.asarray(pot.delta_q_poly(r))
    else:
        out = (pot.d2q(r) + pot.dq(r) / r) / 4.0
    return float(out) if out.ndim == 0 else out


def delta_q_dr(pot: RadialPotential, r):
    """Radial derivative of ``Delta Q``."""
    r = np.asarray(r, dtype=float)
    if pot.delta_q_poly is not None:
        return pot.delta_q_poly.deriv(1)(r)
    return (pot.d3q(r) + pot.d2q(r) / r - pot.dq(r) / r**2) / 4.0


def delta_q_d2r(pot: RadialPotential, r):
    if pot.delta_q_poly is not None:
        return pot.delta_q_poly.deriv(2)(np.asarray(r, dtype=float))
    if pot.d4q is None:
        raise DomainError(f"potential {pot.label!r} has no fourth derivative")
    r = np.asarray(r, dtype=float)
    return (pot.d4q(r) + pot.d3q(r) / r - 2.0 * pot.d2q(r) / r**2 + 2.0 * pot.dq(r) / r**3) / 4.0


def dL_dr(pot: RadialPotential, r):
    """``d/dr log Delta Q``."""
    return delta_q_dr(pot, r) / delta_q(pot, r)


def laplacian_L(pot: RadialPotential, r):
    """``Delta L`` with ``L = log Delta Q``, from the analytic derivative stack.

    Pointwise value for ``r > 0``; a point mass at the origin (see
    :attr:`RadialPotential.origin_order`) is not included.
    """
    r = np.asarray(r, dtype=float)
    dqv = delta_q(pot, r)
    d1 = delta_q_dr(pot, r) / dqv
    d2 = delta_q_d2r(pot, r) / dqv - d1**2
    return (d2 + d1 / r) / 4.0


def droplet_radius(pot: RadialPotential, bracket: tuple[float, float] = (1e-3, 1e3)) -> float:
    """Radius ``R`` of the disk droplet, the root of ``r q'(r) = 2``.

    Bisection down to a bracket width of ``1e-3`` followed by Newton.
    Annular droplets (``r q'(r) <= 0`` somewhere in ``(0, R]``) are rejected.
    """
    lo, hi = map(float, bracket)
    if not 0 < lo < hi:
        raise DomainError(f"invalid bracket {bracket!r}")

    def g(r):
        return r * pot.dq(r) - 2.0

    grid = np.geomspace(lo, hi, 4001)
    signs = np.sign(g(grid))
    exact = np.flatnonzero(signs == 0)
    changes = np.flatnonzero(signs[:-1] * signs[1:] < 0)
    n_roots = len(exact) + len(changes)
    if n_roots == 0:
        raise DropletError(f"no simply-connected radial droplet in bracket {bracket!r} for {pot.label!r}")
    if n_roots > 1:
        raise DropletError(f"ambiguous droplet: {n_roots} roots of r q'(r) = 2 in {bracket!r}")
    if len(exact):
        r = float(grid[exact[0]])
    else:
        r = _bisect_newton(g, lambda x: pot.dq(x) + x * pot.d2q(x), grid[changes[0]], grid[changes[0] + 1])
    if abs(g(r)) > 1e-12:
        raise DropletError(f"Newton did not reach |r q'(r) - 2| <= 1e-12 (residual {g(r):.3e})")
    inner = np.linspace(0.0, r, 2001)[1:]
    if np.any(inner * pot.dq(inner) <= 0):
        raise DropletError(f"droplet of {pot.label!r} is not a disk (r q'(r) <= 0 inside)")
    return float(r)


def _bisect_newton(g, dg, a: float, b: float) -> float:
    ga = g(a)
    while b - a > 1e-3:
        m = 0.5 * (a + b)
        gm = g(m)
        if np.sign(gm) == np.sign(ga):
            a, ga = m, gm
        else:
            b = m
    r = 0.5 * (a + b)
    for _ in range(100):
        res = g(r)
        if abs(res) <= 1e-12:
            break
        slope = dg(r)
        r_new = r - res / slope if slope != 0 else 0.5 * (a + b)
        r = r_new if a <= r_new <= b else 0.5 * (a + b)
        if np.sign(g(r)) == np.sign(ga):
            a = r
        else:
            b = r
    return float(r)


def equilibrium_mass(pot: RadialPotential, R: float, tol: float = 1e-10) -> float:
    """Mass of ``Delta Q dA`` on the disk of radius ``R``.

    The closed form ``R q'(R) / 2`` is checked against direct quadrature of
    ``int_0^R Delta Q 2 r dr``.
    """
    if not R > 0:
        raise DomainError(f"R must be positive, got {R!r}")
    closed = float(R * pot.dq(R) / 2.0)
    # Delta Q * 2r = (r q'' + q') / 2, regular at r = 0
    quad, _ = integrate.quad(lambda r: (r * pot.d2q(r) + pot.dq(r)) / 2.0, 0.0, R,
                             epsabs=1e-14, epsrel=1e-13, limit=200)
    if abs(closed - quad) > tol * max(1.0, abs(closed)):
        raise NumericError(f"inconsistent derivatives for {pot.label!r}: "
                          f"mass {closed!r} (closed form) vs {quad!r} (quadrature)")
    return closed


def edge_data_radial(pot: RadialPotential, bracket: tuple[float, float] = (1e-3, 1e3)) -> EdgeData:
    """Boundary geometry at ``z_0 = R`` on the positive real axis."""
    R = droplet_radius(pot, bracket)
    dqR = delta_q(pot, R)
    if not dqR > 0:
        raise DropletError(f"degenerate edge: Delta Q(R) = {dqR!r}")
    dn_dq = float(delta_q_dr(pot, R))
    return EdgeData(
        boundary_point=complex(R, 0.0),
        outward_normal=1 + 0j,
        radius_or_axes=R,
        delta_q=dqR,
        kappa=1.0 / R,
        dn_L=dn_dq / dqR,
        dn_LS=0.0,
        dn_delta_q=dn_dq,
        label=pot.label,
    )


def check_radial_invariants(pot: RadialPotential, radii: np.ndarray | None = None) -> None:
    """Raise if the growth, subharmonicity or derivative-consistency checks fail."""
    r_big = 1e3
    if not pot.q(r_big) / (2.0 * math.log(r_big)) > 1.01:
        raise DomainError(f"{pot.label!r} violates the growth condition at r = {r_big:g}")
    R = droplet_radius(pot)
    rs = np.linspace(R / 2, 2 * R, 64)
    if np.any(delta_q(pot, rs) <= 0):
        raise DomainError(f"{pot.label!r} is not strictly subharmonic on [R/2, 2R]")
    if radii is None:
        radii = np.linspace(0.2 * R, 2.0 * R, 16)
    stack = [pot.q, pot.dq, pot.d2q, pot.d3q]
    for lower, upper in zip(stack[:-1], stack[1:]):
        h = 1e-5 * np.maximum(1.0, radii)
        fd = (lower(radii + h) - lower(radii - h)) / (2 * h)
        ref = upper(radii)
        scale = max(np.max(np.abs(ref)), 1e-300)
        if np.any(np.abs(fd - ref) > 1e-6 * np.maximum(np.abs(ref), 1e-3 * scale)):
            raise DomainError(f"derivative stack of {pot.label!r} is inconsistent")


# ---------------------------------------------------------------------------
# Elliptic Ginibre


def log_potential_ellipse(z: complex, a: float, b: float, n_angles: int = 2048) -> float:
    """``(1/pi) int_E log|z - w| d^2 w`` over the ellipse ``E`` with semi-axes ``a, b``.

    Polar coordinates centred at the interior point ``z``: the radial integral
    of ``rho log rho`` is done exactly, the angular one by the periodic
    trapezoid rule.
    """
    x0, y0 = z.real, z.imag
    if (x0 / a) ** 2 + (y0 / b) ** 2 >= 1.0:
        raise DomainError("z must lie inside the ellipse")
    phi = np.arange(n_angles) * (2.0 * np.pi / n_angles)
    c, s = np.cos(phi), np.sin(phi)
    A = c**2 / a**2 + s**2 / b**2
    B = 2.0 * (x0 * c / a**2 + y0 * s / b**2)
    C = (x0 / a) ** 2 + (y0 / b) ** 2 - 1.0
    P = (-B + np.sqrt(B * B - 4 * A * C)) / (2 * A)
    inner = 0.5 * P**2 * np.log(P) - 0.25 * P**2
    return float(np.mean(inner) * 2.0)


def validate_elliptic_droplet(pot: EllipticGinibrePotential, n_points: int = 12, tol: float = 1e-6) -> float:
    """Check that the ellipse with semi-axes ``(1 + tau, 1 - tau)`` is the droplet.

    Verifies unit mass and constancy of ``Q - 2 U`` on interior sample points,
    ``U`` being the logarithmic potential of the equilibrium measure.  Returns
    the spread of ``Q - 2 U`` over the samples.
    """
    a, b = pot.semi_axes
    mass = pot.delta_q_value * a * b
    if abs(mass - 1.0) > 1e-12:
        raise GeometryError(f"ellipse mass {mass!r} != 1")
    rng_r = np.linspace(0.05, 0.85, n_points)
    angles = np.linspace(0.0, 2 * np.pi, n_points, endpoint=False) + 0.3
    pts = rng_r * a * np.cos(angles) + 1j * rng_r * b * np.sin(angles)
    vals = np.array([
        float(pot(p)) - 2.0 * pot.delta_q_value * log_potential_ellipse(p, a, b) for p in pts
    ])
    spread = float(np.max(vals) - np.min(vals))
    if spread > tol:
        raise GeometryError(f"variational condition fails on the ellipse (spread {spread:.3e})")
    return spread


def edge_data_elliptic(pot: EllipticGinibrePotential, validate: bool = True) -> EdgeData:
    """Boundary geometry at ``z_0 = 1 + tau`` for the elliptic Ginibre potential.

    The curvature is obtained by differencing the normal angle along arclength
    and cross-checked against the closed form ``a / b^2``.
    """
    a, b = pot.semi_axes
    if validate:
        validate_elliptic_droplet(pot)
    curve = geometry.ArclengthCurve.ellipse(a, b)
    kappa = geometry.curvature_finite_difference(curve, 0.0)
    closed = a / b**2
    if abs(kappa - closed) > 1e-5 * max(1.0, closed):
        raise GeometryError(f"curvature {kappa!r} disagrees with a/b^2 = {closed!r}")
    return EdgeData(
        boundary_point=complex(a, 0.0),
        outward_normal=1 + 0j,
        radius_or_axes=(a, b),
        delta_q=pot.delta_q_value,
        kappa=kappa,
        dn_L=0.0,
        dn_LS=0.0,
        dn_delta_q=0.0,
        label=pot.label,
    )


# ---------------------------------------------------------------------------
# JSON specification


def potential_from_spec(spec: dict):
    """Build a potential from ``{"type": "radial-poly", "coeffs": [[c, p], ...]}``
    or ``{"type": "elliptic", "tau": t}``."""
    if not isinstance(spec, dict) or "type" not in spec:
        raise DomainError(f"potential spec must be an object with a 'type' field, got {spec!r}")
    kind = spec["type"]
    if kind == "radial-poly":
        if "coeffs" not in spec:
            raise DomainError("radial-poly potential needs 'coeffs'")
        return RadialPotential.from_coeffs(spec["coeffs"], label=spec.get("label"))
    if kind == "elliptic":
        if "tau" not in spec:
            raise DomainError("elliptic potential needs 'tau'")
        return EllipticGinibrePotential(float(spec["tau"]))
    raise DomainError(f"unknown potential type {kind!r}")


GINIBRE = RadialPotential.from_coeffs([(1.0, 2)])
QUARTIC = RadialPotential.from_coeffs([(1.0, 4)])
MIXED = RadialPotential.from_coeffs([(1.0, 2), (1.0, 4)])
