"""Exact 1-point densities from weighted orthogonal polynomials.

For a radial potential the monomials ``z^j`` are orthogonal in
``L^2(e^{-n q(|z|)} dA)``, so

    R_n(r) = sum_{j<n} r^{2j} e^{-n q(r)} / h_j,
    h_j = 2 int_0^inf r^{2j+1} e^{-n q(r)} dr.

The norms span thousands of orders of magnitude, so everything is carried in
log scale.  :func:`gram_oracle` is an independent brute-force check that
orthonormalizes the weighted monomials against a 2-D tensor quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import gammaincc, logsumexp

from .errors import DomainError, MisuseError, NumericError, OracleError
from .potential import RadialPotential, delta_q

_LOG_CUT = 46.0  # integrand windows end where the weight is e^-46 ~ 1e-20 of its peak
_PANELS = 6
_NODES = 32
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_NODES)


@dataclass(frozen=True)
class OrthoBasis:
    """Log norms ``log h_j`` of the monomials ``z^j``, ``j = 0..n-1``."""

    n: int
    log_h: np.ndarray
    label: str

    def __post_init__(self):
        if len(self.log_h) != self.n:
            raise MisuseError(f"expected {self.n} norms, got {len(self.log_h)}")
        if not np.all(np.isfinite(self.log_h)):
            raise NumericError("non-finite log-norms")


def _radial_phase_offset(pot: RadialPotential, n: int, a: np.ndarray, r: np.ndarray, rstar: np.ndarray):
    """``phi(r) - phi(r*)`` for ``phi = a log r - n q(r)``, free of cancellation for polynomials."""
    x = np.log(r / rstar)
    if pot.coeffs is not None:
        dq = 0.0
        for c, p in pot.coeffs:
            dq = dq + c * rstar**p * np.expm1(p * x)
    else:
        dq = pot.q(r) - pot.q(rstar)
    return a * x - n * dq


def _laplace_points(pot: RadialPotential, n: int, a: np.ndarray) -> np.ndarray:
    """Maximiser ``r*`` of ``a log r - n q(r)``, i.e. the root of ``r q'(r) = a / n``."""
    target = a / n
    lo = np.full_like(target, 1e-12)
    hi = np.ones_like(target)
    while np.any(hi * pot.dq(hi) < target):
        hi = np.where(hi * pot.dq(hi) < target, 2 * hi, hi)
        if np.any(hi > 1e12):
            raise NumericError(f"no Laplace point for {pot.label!r}")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        below = mid * pot.dq(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    r = 0.5 * (lo + hi)
    for _ in range(8):
        g = r * pot.dq(r) - target
        dg = pot.dq(r) + r * pot.d2q(r)
        r = np.clip(r - g / dg, lo, hi)
    return r


def _window(pot: RadialPotential, n: int, a: np.ndarray, rstar: np.ndarray):
    """Radii where the log weight has fallen ``_LOG_CUT`` below its maximum."""
    def drop(r):
        return _radial_phase_offset(pot, n, a, r, rstar) + _LOG_CUT

    lo_a = np.zeros_like(rstar) + 1e-300
    lo_b = rstar.copy()
    hi_a = rstar.copy()
    hi_b = 2 * rstar + 1.0
    while np.any(drop(hi_b) > 0):
        hi_b = np.where(drop(hi_b) > 0, 2 * hi_b, hi_b)
    # lower end: bisect in log r since the weight may be Rayleigh-like near 0
    la, lb = np.log(lo_a), np.log(lo_b)
    for _ in range(80):
        lm = 0.5 * (la + lb)
        pos = drop(np.exp(lm)) > 0
        lb = np.where(pos, lm, lb)
        la = np.where(pos, la, lm)
    for _ in range(80):
        m = 0.5 * (hi_a + hi_b)
        pos = drop(m) > 0
        hi_a = np.where(pos, m, hi_a)
        hi_b = np.where(pos, hi_b, m)
    return np.exp(la), hi_b


def _panel_nodes(lo: np.ndarray, hi: np.ndarray, panels: int = _PANELS):
    """Composite Gauss-Legendre nodes/weights for each row's interval ``[lo, hi]``."""
    edges = lo[:, None] + (hi - lo)[:, None] * np.linspace(0.0, 1.0, panels + 1)[None, :]
    a, b = edges[:, :-1], edges[:, 1:]
    half = 0.5 * (b - a)
    x = (0.5 * (a + b))[:, :, None] + half[:, :, None] * _GL_X[None, None, :]
    w = half[:, :, None] * _GL_W[None, None, :]
    return x.reshape(len(lo), -1), w.reshape(len(lo), -1)


def _mode_quadrature(pot: RadialPotential, n: int, j: np.ndarray):
    """Nodes, weights and Laplace data for the radial weights ``r^{2j+1} e^{-n q}``.

    Returns ``(rstar, nodes, log_weights)`` where ``log_weights`` already
    contains ``log(quadrature weight) + phi(node) - phi(r*)``.
    """
    a = 2.0 * j + 1.0
    rstar = _laplace_points(pot, n, a)
    lo, hi = _window(pot, n, a, rstar)
    xl, wl = _panel_nodes(lo, rstar)
    xr, wr = _panel_nodes(rstar, hi)
    x = np.concatenate([xl, xr], axis=1)
    w = np.concatenate([wl, wr], axis=1)
    logw = np.log(w) + _radial_phase_offset(pot, n, a[:, None], x, rstar[:, None])
    return rstar, x, logw


def radial_norms(pot: RadialPotential, n: int, chunk: int = 4096) -> OrthoBasis:
    """``log h_j = log(2 int_0^inf r^{2j+1} e^{-n q(r)} dr)`` for ``j < n``.

    Each integrand is centred on its maximum ``r*_j`` (root of
    ``(2j+1)/r = n q'(r)``), scaled by its peak value, and integrated by
    composite Gauss-Legendre over the window where it exceeds ``e^-46`` of
    the peak.
    """
    if not 1 <= n <= 100_000:
        raise DomainError(f"n must lie in 1..100000, got {n!r}")
    out = np.empty(n)
    for start in range(0, n, chunk):
        j = np.arange(start, min(n, start + chunk), dtype=float)
        rstar, _, logw = _mode_quadrature(pot, n, j)
        peak = (2 * j + 1) * np.log(rstar) - n * pot.q(rstar)
        s = logsumexp(logw, axis=1)
        if not np.all(np.isfinite(s)):
            bad = int(j[~np.isfinite(s)][0])
            raise NumericError(f"norm quadrature failed for j = {bad}")
        out[start:start + len(j)] = math.log(2.0) + peak + s
    return OrthoBasis(n=n, log_h=out, label=pot.label)


def radial_mode_means(pot: RadialPotential, n: int, g: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """``E_j[g] = int g |e_j|^2 dA`` for each mode ``j < n`` of a radial ensemble.

    Uses the same Laplace windows as :func:`radial_norms`; summing over ``j``
    gives ``E sum_k g(|z_k|)`` without integrating the density itself.
    """
    j = np.arange(n, dtype=float)
    _, x, logw = _mode_quadrature(pot, n, j)
    wts = np.exp(logw - logsumexp(logw, axis=1, keepdims=True))
    return np.sum(wts * g(x), axis=1)


def _check_basis(basis: OrthoBasis, pot: RadialPotential):
    if basis.label != pot.label:
        raise MisuseError(f"basis built for {basis.label!r} used with potential {pot.label!r}")


def _log_terms(basis: OrthoBasis, pot: RadialPotential, r: np.ndarray, j: np.ndarray) -> np.ndarray:
    n = basis.n
    with np.errstate(divide="ignore", invalid="ignore"):
        logr = np.log(r)
        # r = 0: only j = 0 survives (0^0 = 1)
        pw = np.where(j[None, :] == 0, 0.0, 2.0 * j[None, :] * logr[:, None])
    pw = np.where((r[:, None] == 0) & (j[None, :] > 0), -np.inf, pw)
    return pw - n * pot.q(r)[:, None] - basis.log_h[j.astype(int)][None, :]


def _density_from_terms(basis, pot, r, j, chunk=256):
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r_arr < 0):
        raise DomainError("radii must be non-negative")
    out = np.empty(r_arr.shape)
    flat = r_arr.ravel()
    res = np.empty(flat.shape)
    for start in range(0, len(flat), chunk):
        block = flat[start:start + chunk]
        res[start:start + chunk] = np.exp(logsumexp(_log_terms(basis, pot, block, j), axis=1))
    out[...] = res.reshape(r_arr.shape)
    return float(out.ravel()[0]) if np.ndim(r) == 0 else out


def density_radial(basis: OrthoBasis, pot: RadialPotential, r):
    """``R_n(r) = sum_{j<n} r^{2j} e^{-n q(r)} / h_j``, summed in log scale."""
    _check_basis(basis, pot)
    return _density_from_terms(basis, pot, r, np.arange(basis.n, dtype=float))


def truncation_start(n: int, C: float) -> int:
    """First index kept by :func:`truncated_density`, ``n - C sqrt(n log n)`` clamped to ``[0, n-1]``."""
    j0 = math.floor(n - C * math.sqrt(n * math.log(n))) if n > 1 else 0
    return min(max(j0, 0), n - 1)


def truncated_density(basis: OrthoBasis, pot: RadialPotential, r, C: float = 3.0):
    """Density restricted to the top indices ``j >= n - C sqrt(n log n)``.

    Accurate near the edge only; in the bulk it drops most of the mass.
    """
    if not C > 0:
        raise DomainError(f"C must be positive, got {C!r}")
    _check_basis(basis, pot)
    j = np.arange(truncation_start(basis.n, C), basis.n, dtype=float)
    return _density_from_terms(basis, pot, r, j)


def ginibre_density_closed(n: int, r):
    """``R_n(r) = n e^{-n r^2} sum_{j<n} (n r^2)^j / j! = n Q(n, n r^2)`` for ``Q = |z|^2``.

    ``Q(a, x)`` is the regularized upper incomplete gamma function.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    r = np.asarray(r, dtype=float)
    out = n * gammaincc(n, n * r * r)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Brute-force oracle


class GramOracle:
    """Reproducing kernel of ``span{z^j e^{-nQ/2}}`` built by tensor quadrature.

    Modified Gram-Schmidt (two passes) on the sampled weighted monomials;
    the resulting coefficient matrix is used to evaluate the kernel at
    arbitrary points.
    """

    def __init__(self, weight: Callable[[np.ndarray], np.ndarray], n: int, half_width: float,
                 nodes: int = 200):
        if not 1 <= n <= 8:
            raise DomainError(f"gram_oracle supports n <= 8, got {n!r}")
        self.weight = weight
        self.n = n
        self.half_width = half_width
        x, w = np.polynomial.legendre.leggauss(nodes)
        x = x * half_width
        w = w * half_width
        X, Y = np.meshgrid(x, x, indexing="ij")
        self._z = (X + 1j * Y).ravel()
        self._w = (np.outer(w, w)).ravel() / math.pi
        env = np.exp(-0.5 * n * weight(self._z))
        scale = half_width
        mono = np.array([(self._z / scale) ** j * env for j in range(n)])
        gram0 = self._inner(mono, mono)
        d = np.sqrt(np.real(np.diag(gram0)))
        cond = np.linalg.cond(gram0 / np.outer(d, d))
        if cond > 1e8:
            raise OracleError(f"monomial Gram matrix is ill-conditioned (cond {cond:.2e})")
        coef = np.diag(scale ** -np.arange(n, dtype=float)).astype(complex)
        vecs = mono.astype(complex)
        for _ in range(2):
            for j in range(n):
                for k in range(j):
                    proj = self._inner(vecs[j:j + 1], vecs[k:k + 1])[0, 0]
                    vecs[j] -= proj * vecs[k]
                    coef[j] -= proj * coef[k]
                nrm = math.sqrt(np.real(self._inner(vecs[j:j + 1], vecs[j:j + 1])[0, 0]))
                vecs[j] /= nrm
                coef[j] /= nrm
        self.coef = coef
        self.gram = self._inner(vecs, vecs)
        err = np.max(np.abs(self.gram - np.eye(n)))
        if err > 1e-10:
            raise OracleError(f"orthonormalized basis has Gram error {err:.2e}")

    def _inner(self, a, b):
        return (a * self._w[None, :]) @ np.conj(b).T

    def monomial_gram(self) -> np.ndarray:
        """Quadrature inner products ``<z^j, z^k>`` in the weighted space."""
        env = np.exp(-0.5 * self.n * self.weight(self._z))
        mono = np.array([self._z**j * env for j in range(self.n)])
        return self._inner(mono, mono)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        powers = np.stack([z**k for k in range(self.n)], axis=-1)
        vals = powers @ self.coef.T
        out = np.sum(np.abs(vals) ** 2, axis=-1) * np.exp(-self.n * self.weight(z))
        return float(out) if out.ndim == 0 else out


def oracle_half_width(weight: Callable[[np.ndarray], np.ndarray], n: int, droplet_radius: float,
                      rel: float = 1e-18) -> float:
    """Half-width covering ``3 R`` and the region where ``|z|^{2(n-1)} e^{-nQ}`` exceeds ``rel`` of its peak."""
    r = np.linspace(0.0, 40.0 * max(droplet_radius, 0.1), 8001)[1:]
    angles = np.linspace(0.0, 2 * np.pi, 16, endpoint=False)
    z = r[None, :] * np.exp(1j * angles)[:, None]
    nq = n * weight(z)
    width = 3.0 * droplet_radius
    for deg in (0, n - 1):
        psi = 2 * deg * np.log(r)[None, :] - nq
        above = np.flatnonzero(np.any(psi > psi.max() + math.log(rel), axis=0))
        width = max(width, float(r[above[-1]]) * 1.05)
    return width


def gram_oracle(weight: Callable[[np.ndarray], np.ndarray], n: int, droplet_radius: float = 1.0,
                nodes: int = 200) -> GramOracle:
    """Brute-force kernel-diagonal evaluator for ``n <= 8``; see :class:`GramOracle`."""
    return GramOracle(weight, n, oracle_half_width(weight, n, droplet_radius), nodes=nodes)


# ---------------------------------------------------------------------------
# Elliptic Ginibre


def _elliptic_recurrence(tau: float, n: int, z: np.ndarray) -> np.ndarray:
    """Log of ``sum_{k<n} |psi_k(z)|^2`` with ``psi_k`` the orthonormal Hermite-type polynomials.

    ``psi_{k+1} = sqrt(n/(k+1)) z psi_k - tau sqrt(k/(k+1)) psi_{k-1}``,
    ``psi_0 = 1/sqrt(h_0)``, ``h_0 = sqrt(1 - tau^2)/n``; values are kept as
    mantissa times ``exp(logscale)``.
    """
    z = np.asarray(z, dtype=complex)
    prev = np.zeros(z.shape, dtype=complex)
    cur = np.full(z.shape, 1.0 / math.sqrt(math.sqrt(1.0 - tau * tau) / n), dtype=complex)
    logscale = np.zeros(z.shape)
    acc = np.abs(cur) ** 2
    for k in range(n - 1):
        nxt = math.sqrt(n / (k + 1)) * z * cur - tau * math.sqrt(k / (k + 1)) * prev
        prev, cur = cur, nxt
        mag = np.abs(cur)
        big = mag > 1e100
        if np.any(big):
            f = np.where(big, mag, 1.0)
            cur = cur / f
            prev = prev / f
            acc = acc / f**2
            logscale = logscale + np.log(f)
        acc = acc + np.abs(cur) ** 2
        if not np.all(np.isfinite(acc)):
            raise NumericError("elliptic recurrence overflowed")
    return np.log(acc) + 2.0 * logscale


def _elliptic_fast(tau: float, n: int, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    q = (np.abs(z) ** 2 - tau * np.real(z * z)) / (1.0 - tau * tau)
    return np.exp(_elliptic_recurrence(tau, n, z) - n * q)


@lru_cache(maxsize=32)
def validate_elliptic(tau: float, tol: float = 1e-7) -> float:
    """Compare the recurrence with :func:`gram_oracle` for ``n in {2, 4, 8}``.

    Returns the worst relative error, raising :class:`OracleError` above ``tol``.
    """
    from .potential import EllipticGinibrePotential

    pot = EllipticGinibrePotential(tau)
    pts = np.array([0.0, 0.4 + 0.1j, -0.8 + 0.2j, 1.0 + tau, 0.2 - 0.5j, 1.3 + 0.3j])
    worst = 0.0
    for n in (2, 4, 8):
        oracle = gram_oracle(pot, n, droplet_radius=1.0 + tau)
        ref = oracle(pts)
        got = _elliptic_fast(tau, n, pts)
        worst = max(worst, float(np.max(np.abs(got - ref) / ref)))
    if worst > tol:
        raise OracleError(f"elliptic recurrence disagrees with the Gram oracle (rel. error {worst:.2e})")
    return worst


def elliptic_density(tau: float, n: int, z, validate: bool = True):
    """1-point density of the elliptic Ginibre ensemble.

    ``R_n(z) = e^{-n Q(z)} sum_{k<n} |psi_k(z)|^2``; the three-term recurrence
    is only used after :func:`validate_elliptic` has accepted it for this ``tau``.
    """
    if not 0.0 < tau <= 0.8:
        raise DomainError(f"tau must lie in (0, 0.8], got {tau!r}")
    if not 1 <= n <= 4096:
        raise DomainError(f"n must lie in 1..4096, got {n!r}")
    if validate:
        validate_elliptic(float(tau))
    out = _elliptic_fast(tau, n, z)
    return float(out) if np.ndim(out) == 0 else out


_EDGE_X, _EDGE_W = np.polynomial.legendre.leggauss(24)


def _gl_panels(edges: np.ndarray):
    a, b = edges[:-1, None], edges[1:, None]
    x = 0.5 * (a + b) + 0.5 * (b - a) * _EDGE_X[None, :]
    w = 0.5 * (b - a) * _EDGE_W[None, :]
    return x.ravel(), w.ravel()


def edge_graded_rule(basis: OrthoBasis, pot: RadialPotential, R: float):
    """Quadrature rules on ``[0, R]`` and ``[R, r_tail]`` adapted to the edge layer.

    The interior is graded geometrically toward 0 and split into panels of two
    edge widths ``1/sqrt(2 n Delta Q(R))`` over the last 30 widths; the
    exterior extends in the same steps until ``R_n < 1e-16 n``.  Returns
    ``((x_in, w_in, R_n(x_in)), (x_out, w_out, R_n(x_out)))``.
    """
    n = basis.n
    width = 1.0 / math.sqrt(2.0 * n * delta_q(pot, R))
    inner = max(R - 30.0 * width, 0.5 * R)
    geo = inner * 2.0 ** -np.arange(30, -1, -1, dtype=float)
    near = np.linspace(inner, R, max(2, int(math.ceil((R - inner) / (2 * width))) + 1))
    x_in, w_in = _gl_panels(np.concatenate([[0.0], geo, near[1:]]))
    edges = [R]
    while True:
        edges.append(edges[-1] + 2.0 * width)
        if density_radial(basis, pot, edges[-1]) < 1e-16 * n:
            break
        if len(edges) > 5000:
            raise NumericError("exterior tail of R_n did not decay")
    x_out, w_out = _gl_panels(np.array(edges))
    return ((x_in, w_in, density_radial(basis, pot, x_in)),
            (x_out, w_out, density_radial(basis, pot, x_out)))


def radial_mass(basis: OrthoBasis, pot: RadialPotential) -> float:
    """``int R_n dA = 2 int_0^inf R_n(r) r dr``; equals ``n`` for an exact kernel."""
    from .potential import droplet_radius

    _check_basis(basis, pot)
    (x_in, w_in, rn_in), (x_out, w_out, rn_out) = edge_graded_rule(basis, pot, droplet_radius(pot))
    return float(2.0 * (np.sum(w_in * rn_in * x_in) + np.sum(w_out * rn_out * x_out)))


def elliptic_mass(tau: float, n: int, nodes: int = 400) -> float:
    """``int R_n dA`` for the elliptic Ginibre ensemble by tensor Gauss-Legendre."""
    a, b = 1.0 + tau, 1.0 - tau
    pad = 12.0 / math.sqrt(n) + 0.5
    x, wx = np.polynomial.legendre.leggauss(nodes)
    X, Y = np.meshgrid((a + pad) * x, (b + pad) * x, indexing="ij")
    W = np.outer((a + pad) * wx, (b + pad) * wx)
    vals = elliptic_density(tau, n, X + 1j * Y)
    return float(np.sum(W * vals) / math.pi)


def radial_density(pot: RadialPotential, n: int, r):
    """Convenience wrapper: build the norms and evaluate :func:`density_radial`."""
    return density_radial(radial_norms(pot, n), pot, r)


def bulk_prediction(pot: RadialPotential, n: int, r):
    """``n Delta Q(r) + Delta L(r) / 2``, the interior expansion of ``R_n``."""
    from .potential import laplacian_L

    return n * delta_q(pot, r) + 0.5 * laplacian_L(pot, r)
