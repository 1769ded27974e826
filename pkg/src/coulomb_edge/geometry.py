"""Normal-coordinate machinery near the droplet boundary.

Curves are represented through an arclength reparameterization of a smooth
parametric Jordan curve; the outward normal of a positively oriented curve is
``-i`` times the unit tangent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable

import numpy as np
from scipy import integrate

from .errors import DomainError, GeometryError

if TYPE_CHECKING:
    from .potential import EdgeData


class ArclengthCurve:
    """Arclength parameterization of a closed curve ``theta -> gamma(theta)``.

    ``gamma`` and ``dgamma`` map ``[0, period)`` to complex points and
    tangents; ``theta = 0`` corresponds to ``s = 0``.
    """

    def __init__(self, gamma: Callable[[float], complex], dgamma: Callable[[float], complex],
                 period: float = 2 * math.pi, closed: bool = True):
        self.gamma = gamma
        self.dgamma = dgamma
        self.period = period
        self.closed = closed
        self.length = self._arc(0.0, period)

    @classmethod
    def ellipse(cls, a: float, b: float) -> "ArclengthCurve":
        return cls(lambda th: complex(a * math.cos(th), b * math.sin(th)),
                   lambda th: complex(-a * math.sin(th), b * math.cos(th)))

    @classmethod
    def circle(cls, radius: float) -> "ArclengthCurve":
        return cls.ellipse(radius, radius)

    @classmethod
    def segment(cls, start: complex, end: complex) -> "ArclengthCurve":
        d = complex(end) - complex(start)
        return cls(lambda th: start + th * d, lambda th: d, period=1.0, closed=False)

    def _speed(self, th: float) -> float:
        return abs(self.dgamma(th))

    def _arc(self, th0: float, th1: float) -> float:
        val, _ = integrate.quad(self._speed, th0, th1, epsabs=1e-15, epsrel=1e-13, limit=200)
        return val

    def theta_of_s(self, s: float) -> float:
        """Parameter value at arclength ``s`` (periodic for closed curves)."""
        if self.closed:
            turns, s = divmod(s, self.length)
        else:
            turns = 0.0
        th = s / self.length * self.period
        for _ in range(60):
            res = self._arc(0.0, th) - s
            th_new = th - res / self._speed(th)
            if abs(th_new - th) < 1e-15 * self.period:
                th = th_new
                break
            th = th_new
        return th + turns * self.period

    def point(self, s: float) -> complex:
        return self.gamma(self.theta_of_s(s))

    def normal_angle(self, s: float) -> float:
        """``arg nu`` at arclength ``s`` in the principal branch."""
        tangent = self.dgamma(self.theta_of_s(s))
        if abs(tangent) < 1e-14:
            raise DomainError(f"degenerate tangent at s = {s!r}")
        return math.atan2((-1j * tangent).imag, (-1j * tangent).real)


def _unwrap_near(angle: float, ref: float) -> float:
    return ref + math.remainder(angle - ref, 2 * math.pi)


def curvature_finite_difference(boundary: ArclengthCurve, s: float, h: float | None = None) -> float:
    """Signed curvature ``d/ds arg nu`` by Richardson-extrapolated central differences.

    The angle is continued along ``s`` onto the branch nearest to its value at
    ``s`` before differencing.
    """
    if h is None:
        h = 1e-2 * min(1.0, boundary.length)
    a0 = boundary.normal_angle(s)

    def central(step):
        ap = _unwrap_near(boundary.normal_angle(s + step), a0)
        am = _unwrap_near(boundary.normal_angle(s - step), a0)
        return (ap - am) / (2 * step)

    d1, d2, d4 = central(h), central(h / 2), central(h / 4)
    r1 = (4 * d2 - d1) / 3
    r2 = (4 * d4 - d2) / 3
    return (16 * r2 - r1) / 15


def total_curvature(boundary: ArclengthCurve, n_samples: int = 256) -> float:
    """``oint kappa ds`` by the periodic trapezoid rule on finite-difference curvature."""
    if not boundary.closed:
        raise DomainError("total curvature needs a closed curve")
    ds = boundary.length / n_samples
    return sum(curvature_finite_difference(boundary, k * ds) for k in range(n_samples)) * ds


def jacobian_factor(delta_q: float, kappa: float, t: float, n: int) -> float:
    """Density of ``dA(w)`` with respect to ``dt ds`` in normal coordinates.

    ``(1/pi) (2 n Delta Q)^{-1/2} (1 + t kappa / sqrt(2 n Delta Q))``
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    if not delta_q > 0:
        raise DomainError(f"delta_q must be positive, got {delta_q!r}")
    scale = 1.0 / math.sqrt(2.0 * n * delta_q)
    stretch = 1.0 + t * kappa * scale
    if stretch <= 0:
        raise GeometryError(f"normal chart degenerates at t = {t!r} (1 + t kappa / sqrt(2n dQ) = {stretch!r})")
    return scale * stretch / math.pi


@dataclass(frozen=True)
class NormalChart:
    """Chart ``(s, t) -> z(s) + t nu(z(s)) / sqrt(2 n Delta Q(z(s)))`` around a boundary.

    Only constant-``Delta Q`` charts on a given curve are implemented; for radial
    droplets this is exact.
    """

    edge: "EdgeData"
    n: int
    curve: ArclengthCurve

    @classmethod
    def radial(cls, edge: "EdgeData", n: int) -> "NormalChart":
        return cls(edge, n, ArclengthCurve.circle(float(edge.radius_or_axes)))

    def __call__(self, s: float, t: float) -> complex:
        z = self.curve.point(s)
        nu = complex(math.cos(self.curve.normal_angle(s)), math.sin(self.curve.normal_angle(s)))
        return z + t * nu / math.sqrt(2.0 * self.n * self.edge.delta_q)


# ---------------------------------------------------------------------------
# Laplacian in normal coordinates


@dataclass(frozen=True)
class ScalarField:
    """A function of ``(x, y)`` with optional analytic gradient and Hessian."""

    value: Callable[[float, float], float]
    grad: Callable[[float, float], tuple[float, float]] | None = None
    hess: Callable[[float, float], tuple[float, float, float]] | None = None  # (uxx, uxy, uyy)
    label: str = ""


def _fd_derivs(u: ScalarField, x: float, y: float, h: float):
    f = u.value
    ux = (f(x + h, y) - f(x - h, y)) / (2 * h)
    uy = (f(x, y + h) - f(x, y - h)) / (2 * h)
    uxx = (f(x + h, y) - 2 * f(x, y) + f(x - h, y)) / h**2
    uyy = (f(x, y + h) - 2 * f(x, y) + f(x, y - h)) / h**2
    uxy = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4 * h * h)
    return (ux, uy), (uxx, uxy, uyy)


def laplacian_normal_identity_check(u: ScalarField, circle_radius: float, theta: float,
                                    derivatives: str = "analytic", h: float = 1e-4) -> float:
    """Defect ``|4 Delta u - (d_s^2 u + d_n^2 u + kappa d_n u)|`` at ``r e^{i theta}``.

    ``4 Delta u`` is the Cartesian trace of the Hessian.  With
    ``derivatives="analytic"`` the normal-coordinate side uses the supplied
    gradient and Hessian; with ``"finite-difference"`` both sides are built from
    point values only, ``d_s^2`` by differencing ``u`` along the circle and
    ``d_n`` along the ray.
    """
    r = float(circle_radius)
    if not r > 0:
        raise DomainError("circle_radius must be positive")
    kappa = 1.0 / r
    c, s = math.cos(theta), math.sin(theta)
    x, y = r * c, r * s
    if derivatives == "analytic":
        if u.grad is None or u.hess is None:
            raise DomainError(f"field {u.label!r} has no analytic derivatives")
        gx, gy = u.grad(x, y)
        uxx, uxy, uyy = u.hess(x, y)
        lap4 = uxx + uyy
        d_n = gx * c + gy * s
        d_nn = uxx * c * c + 2 * uxy * c * s + uyy * s * s
        # d^2/ds^2 u(z(s)) = T.H.T + grad u . z''(s), with z'' = -kappa nu on a circle
        d_ss = uxx * s * s - 2 * uxy * c * s + uyy * c * c - kappa * d_n
    elif derivatives == "finite-difference":
        _, (uxx, uxy, uyy) = _fd_derivs(u, x, y, h)
        lap4 = uxx + uyy
        f = u.value
        dphi = h / r
        on_circle = [f(r * math.cos(theta + k * dphi), r * math.sin(theta + k * dphi)) for k in (-1, 0, 1)]
        d_ss = (on_circle[0] - 2 * on_circle[1] + on_circle[2]) / h**2
        on_ray = [f((r + k * h) * c, (r + k * h) * s) for k in (-1, 0, 1)]
        d_n = (on_ray[2] - on_ray[0]) / (2 * h)
        d_nn = (on_ray[0] - 2 * on_ray[1] + on_ray[2]) / h**2
    else:
        raise DomainError(f"unknown derivative source {derivatives!r}")
    return abs(lap4 - (d_ss + d_nn + kappa * d_n))


def _standard_fields() -> dict[str, ScalarField]:
    return {
        "|z|^2": ScalarField(lambda x, y: x * x + y * y, lambda x, y: (2 * x, 2 * y),
                             lambda x, y: (2.0, 0.0, 2.0), "|z|^2"),
        "Re z": ScalarField(lambda x, y: x, lambda x, y: (1.0, 0.0),
                            lambda x, y: (0.0, 0.0, 0.0), "Re z"),
        "log|z|": ScalarField(
            lambda x, y: 0.5 * math.log(x * x + y * y),
            lambda x, y: (x / (x * x + y * y), y / (x * x + y * y)),
            lambda x, y: ((y * y - x * x) / (x * x + y * y) ** 2, -2 * x * y / (x * x + y * y) ** 2,
                          (x * x - y * y) / (x * x + y * y) ** 2),
            "log|z|"),
        "Re z^2": ScalarField(lambda x, y: x * x - y * y, lambda x, y: (2 * x, -2 * y),
                              lambda x, y: (2.0, 0.0, -2.0), "Re z^2"),
    }


STANDARD_FIELDS = _standard_fields()


def annulus_area_by_chart(R: float, delta_q: float, n: int, t1: float, t2: float, nodes: int = 16) -> float:
    """``int_{t1}^{t2} int_0^{2 pi R} jacobian_factor ds dt`` on a circle of radius ``R``.

    The factor does not depend on ``s``; the ``t`` integral uses Gauss-Legendre,
    exact for the linear integrand.  The result is an area in ``dA`` units and
    should equal ``r2^2 - r1^2`` with ``r_i = R + t_i / sqrt(2 n Delta Q)``.
    """
    x, w = np.polynomial.legendre.leggauss(nodes)
    ts = 0.5 * (t2 - t1) * x + 0.5 * (t2 + t1)
    vals = np.array([jacobian_factor(delta_q, 1.0 / R, t, n) for t in ts])
    return float(0.5 * (t2 - t1) * np.dot(w, vals) * 2 * math.pi * R)
