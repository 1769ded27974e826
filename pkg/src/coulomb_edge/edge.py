"""Edge expansion of the 1-point density and convergence studies.

Near a regular boundary point ``z_0`` with outward normal ``nu`` put

    z = z_0 + t nu / sqrt(2 n Delta Q(z_0)).

Then ``R_n(z) = n Delta Q(z_0) erfc(t)/2 + sqrt(n Delta Q(z_0)) C(z_0; t) + O(log^3 n)``
with ``C`` depending on the curvature and on normal derivatives of
``L = log Delta Q`` and of its harmonic extension ``L^S``.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import opkernel
from .errors import DomainError
from .potential import (EdgeData, EllipticGinibrePotential, RadialPotential, delta_q,
                        edge_data_elliptic, edge_data_radial, laplacian_L)
from .specfun import SQRT2, SQRT_2PI, erfc

PROFILE_COLUMNS = ("n", "t", "exact", "leading", "correction", "residual", "D_n", "C", "D_minus_C")


class OutOfWindowWarning(UserWarning):
    """``|t|`` exceeds ``M sqrt(log n)``; the expansion is not claimed to hold uniformly there."""


def c_correction(edge: EdgeData, t: float) -> float:
    """Coefficient of ``sqrt(n Delta Q(z_0))`` in the edge expansion."""
    dl, k, dls = edge.dn_L, edge.kappa, edge.dn_LS
    gauss = math.exp(-t * t) / SQRT_2PI
    return (dl / SQRT2 * t * erfc(t) / 2.0
            + gauss * (t * t / 6.0 * (k - dl) - 5.0 / 12.0 * dl + 0.25 * dls - k / 3.0))


def c_hele_shaw(kappa: float, t: float) -> float:
    """Constant-``Delta Q`` reduction ``kappa/6 * e^{-t^2}/sqrt(2 pi) * (t^2 - 2)``."""
    return kappa / 6.0 * math.exp(-t * t) / SQRT_2PI * (t * t - 2.0)


def rescale_point(edge: EdgeData, n: int, t: float) -> complex:
    """Point at rescaled normal distance ``t`` from the boundary point."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    return edge.boundary_point + t * edge.outward_normal / math.sqrt(2.0 * n * edge.delta_q)


@dataclass(frozen=True)
class EdgeExpansion:
    n: int
    edge: EdgeData
    t: float
    leading: float
    correction: float
    in_window: bool

    @property
    def total(self) -> float:
        return self.leading + self.correction


def edge_expansion(edge: EdgeData, n: int, t: float, M: float = 1.0) -> EdgeExpansion:
    """Leading and ``sqrt(n)`` terms at ``(n, t)``.

    Outside ``|t| <= M sqrt(log n)`` the values are still returned, flagged with
    ``in_window=False`` and an :class:`OutOfWindowWarning`.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    in_window = abs(t) <= M * math.sqrt(math.log(n))
    if not in_window:
        warnings.warn(f"|t| = {abs(t):g} outside the window M sqrt(log n) = {M * math.sqrt(math.log(n)):g}",
                      OutOfWindowWarning, stacklevel=2)
    ndq = n * edge.delta_q
    return EdgeExpansion(n=n, edge=edge, t=t, leading=ndq * erfc(t) / 2.0,
                         correction=math.sqrt(ndq) * c_correction(edge, t), in_window=in_window)


@dataclass
class DensityProfile:
    """Exact density and expansion terms on a grid of rescaled normal coordinates."""

    t_values: np.ndarray
    exact: np.ndarray
    leading: np.ndarray
    subleading: np.ndarray
    residual: np.ndarray
    n: int
    edge: EdgeData

    @property
    def scale(self) -> float:
        return math.sqrt(self.n * self.edge.delta_q)

    @property
    def D_n(self) -> np.ndarray:
        """``(exact - leading) / sqrt(n Delta Q)``."""
        return (self.exact - self.leading) / self.scale

    @property
    def C(self) -> np.ndarray:
        return self.subleading / self.scale

    @property
    def D_minus_C(self) -> np.ndarray:
        return self.D_n - self.C

    def max_deviation(self) -> float:
        return float(np.max(np.abs(self.D_minus_C)))

    def rows(self):
        for i, t in enumerate(self.t_values):
            yield (self.n, float(t), float(self.exact[i]), float(self.leading[i]), float(self.subleading[i]),
                   float(self.residual[i]), float(self.D_n[i]), float(self.C[i]), float(self.D_minus_C[i]))


def _edge_for(pot) -> EdgeData:
    if isinstance(pot, EllipticGinibrePotential):
        return edge_data_elliptic(pot)
    return edge_data_radial(pot)


def exact_density_at(pot, n: int, points: np.ndarray, basis: opkernel.OrthoBasis | None = None) -> np.ndarray:
    """Exact ``R_n`` at complex points for a radial or elliptic potential."""
    points = np.asarray(points, dtype=complex)
    if isinstance(pot, EllipticGinibrePotential):
        return np.asarray(opkernel.elliptic_density(pot.tau, n, points))
    if basis is None:
        basis = opkernel.radial_norms(pot, n)
    return np.asarray(opkernel.density_radial(basis, pot, np.abs(points)))


def density_profile(pot, n: int, t_grid: Sequence[float], edge: EdgeData | None = None,
                    M: float = 1.0) -> DensityProfile:
    edge = _edge_for(pot) if edge is None else edge
    t = np.asarray(t_grid, dtype=float)
    pts = np.array([rescale_point(edge, n, ti) for ti in t])
    exact = exact_density_at(pot, n, pts)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OutOfWindowWarning)
        terms = [edge_expansion(edge, n, float(ti), M=M) for ti in t]
    leading = np.array([e.leading for e in terms])
    sub = np.array([e.correction for e in terms])
    return DensityProfile(t_values=t, exact=exact, leading=leading, subleading=sub,
                          residual=exact - leading - sub, n=n, edge=edge)


@dataclass
class ResidualStudy:
    profiles: dict[int, DensityProfile]
    edge: EdgeData
    max_deviation: dict[int, float]
    decay: bool | None
    out_of_window: list[tuple[int, float]] = field(default_factory=list)
    deep_bulk: dict[int, float] = field(default_factory=dict)

    def report(self) -> str:
        lines = [f"edge study for {self.edge.label}: kappa={self.edge.kappa:.12g}, dn_L={self.edge.dn_L:.12g}"]
        for n, dev in self.max_deviation.items():
            lines.append(f"n={n}: max_t |D_n - C| = {dev:.6e}")
        if self.decay is None:
            lines.append("no decay comparison (need at least two n with max/min >= 16)")
        else:
            lines.append(f"decay by factor >= 2: {self.decay}")
        if self.out_of_window:
            lines.append(f"warning: {len(self.out_of_window)} grid points outside |t| <= M sqrt(log n)")
        return "\n".join(lines)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(PROFILE_COLUMNS)
        for n in sorted(self.profiles):
            for row in self.profiles[n].rows():
                w.writerow([row[0]] + [format(x, ".17g") for x in row[1:]])
        return buf.getvalue()


def deep_bulk_deviation(pot: RadialPotential, n: int, M: float = 1.0, edge: EdgeData | None = None) -> float:
    """``|R_n(z) - (n Delta Q(z) + Delta L(z)/2)|`` at ``t = -M sqrt(log n)``."""
    edge = edge_data_radial(pot) if edge is None else edge
    z = rescale_point(edge, n, -M * math.sqrt(math.log(n)))
    r = abs(z)
    exact = opkernel.radial_density(pot, n, r)
    return abs(exact - (n * delta_q(pot, r) + 0.5 * float(laplacian_L(pot, r))))


def residual_study(pot, n_list: Sequence[int], t_grid: Sequence[float], M: float = 1.0,
                   edge: EdgeData | None = None) -> ResidualStudy:
    """Compare exact densities with the two-term expansion for several ``n``.

    ``decay`` is True when ``max_t |D_n - C|`` shrinks by at least a factor 2
    between the smallest and largest ``n`` (requires ``max/min >= 16``) and
    ``None`` when no comparison is possible.
    """
    n_list = [int(n) for n in n_list]
    if not n_list:
        raise DomainError("empty n_list")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise DomainError(f"n_list must be strictly ascending, got {n_list!r}")
    edge = _edge_for(pot) if edge is None else edge
    profiles, devs, oow = {}, {}, []
    for n in n_list:
        prof = density_profile(pot, n, t_grid, edge=edge, M=M)
        profiles[n] = prof
        devs[n] = prof.max_deviation()
        lim = M * math.sqrt(math.log(n)) if n > 1 else 0.0
        oow.extend((n, float(t)) for t in prof.t_values if abs(t) > lim)
    decay = None
    lo, hi = n_list[0], n_list[-1]
    if len(n_list) > 1 and hi / lo >= 16:
        decay = devs[hi] <= 0.5 * devs[lo]
    if oow:
        warnings.warn(f"{len(oow)} (n, t) grid points lie outside |t| <= M sqrt(log n)", OutOfWindowWarning,
                      stacklevel=2)
    return ResidualStudy(profiles=profiles, edge=edge, max_deviation=devs, decay=decay, out_of_window=oow)


def default_t_grid(t_min: float = -2.5, t_max: float = 2.5, t_step: float = 0.25) -> np.ndarray:
    count = int(round((t_max - t_min) / t_step)) + 1
    return t_min + t_step * np.arange(count)
