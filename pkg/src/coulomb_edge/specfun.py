"""Special functions and log-scale arithmetic.

Everything here is a pure function of its arguments.  ``erfc`` is written
out explicitly (series + continued fraction) so that the edge formulas do not
depend on a particular libm; the quadrature oracles in the test-suite check
it against the defining integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DomainError

SQRT_PI = math.sqrt(math.pi)
SQRT_2PI = math.sqrt(2.0 * math.pi)
SQRT2 = math.sqrt(2.0)

_SERIES_CUTOFF = 1.5
_UNDERFLOW_T = 27.3  # erfc(27.3) < 1e-325


def _erf_series(t: float) -> float:
    # erf(t) = 2/sqrt(pi) * exp(-t^2) * sum_k (2t^2)^k t / (2k+1)!!; all terms positive
    t2 = t * t
    term = t
    total = t
    k = 0
    while abs(term) > 1e-17 * abs(total):
        k += 1
        term *= 2.0 * t2 / (2 * k + 1)
        total += term
    return 2.0 / SQRT_PI * math.exp(-t2) * total


def _erfcx_cf(t: float) -> float:
    """Scaled ``exp(t^2) * erfc(t)`` for ``t > 0`` via continued fraction."""
    # Modified Lentz on erfc(t) = exp(-t^2)/sqrt(pi) / (t + (1/2)/(t + 1/(t + (3/2)/(t + ...))))
    tiny = 1e-300
    f = t
    c = t
    d = 0.0
    for k in range(1, 2000):
        a = 0.5 * k
        d = t + a * d
        d = tiny if d == 0.0 else d
        c = t + a / c
        c = tiny if c == 0.0 else c
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return 1.0 / (SQRT_PI * f)


def _erfc_cf(t: float) -> float:
    return math.exp(-t * t) * _erfcx_cf(t)


def erfc(t: float) -> float:
    """Complementary error function ``2/sqrt(pi) * int_t^inf exp(-u^2) du``."""
    t = float(t)
    if not math.isfinite(t):
        raise DomainError(f"erfc needs a finite argument, got {t!r}")
    if abs(t) <= _SERIES_CUTOFF:
        return 1.0 - _erf_series(t)
    if t > 0:
        if t > _UNDERFLOW_T:
            return 0.0
        return _erfc_cf(t)
    if t < -_UNDERFLOW_T:
        return 2.0
    return 2.0 - _erfc_cf(-t)


erfc_vec = np.vectorize(erfc, otypes=[float])
erfc_vec.__doc__ = "Elementwise :func:`erfc` over array input."


def erfc_tail_ratio(t: float) -> float:
    """Ratio ``(erfc(t)/2 - 1) * 2 sqrt(pi) t / exp(-t^2)`` for ``t <= -2``.

    Tends to 1 as ``t -> -inf``; for ``t <= -3`` it lies in ``[1 - 2/t^2, 1]``.
    """
    if not t <= -2.0:
        raise DomainError(f"erfc_tail_ratio needs t <= -2 (asymptotic regime), got {t!r}")
    # erfc(t)/2 - 1 = -erfc(-t)/2; the scaled form avoids exp(t^2) overflow
    return -SQRT_PI * t * _erfcx_cf(-t)


def half_gaussian_moment(j: int, a: float) -> float:
    """``I_j = int_0^inf y^j exp(-(y+a)^2/2) dy / sqrt(2 pi)`` in closed form, ``j = 0..3``."""
    if j not in (0, 1, 2, 3):
        raise DomainError(f"half_gaussian_moment is defined for j in 0..3, got {j!r}")
    g = math.exp(-0.5 * a * a) / SQRT_2PI
    e = 0.5 * erfc(a / SQRT2)
    if j == 0:
        return e
    if j == 1:
        return g - a * e
    if j == 2:
        return -a * g + (a * a + 1.0) * e
    return (a * a + 2.0) * g - (a**3 + 3.0 * a) * e


def halfline_gaussian(omega: float, a: float) -> float:
    """``int_0^inf exp(-(x omega + a)^2 / 2) dx = sqrt(2 pi)/omega * erfc(a/sqrt 2)/2``."""
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega!r}")
    return SQRT_2PI / omega * 0.5 * erfc(a / SQRT2)


def ginibre_kernel(zeta: complex, eta: complex) -> complex:
    """Ginibre kernel ``G(zeta, eta) = exp((2 zeta conj(eta) - |zeta|^2 - |eta|^2) / 4)``."""
    zeta = complex(zeta)
    eta = complex(eta)
    if not (math.isfinite(abs(zeta)) and math.isfinite(abs(eta))):
        raise DomainError("ginibre_kernel needs finite arguments")
    expo = (2.0 * zeta * eta.conjugate() - abs(zeta) ** 2 - abs(eta) ** 2) / 4.0
    return complex(np.exp(expo))


def free_boundary_kernel_diag(t: float) -> float:
    """Diagonal of the free boundary kernel, ``k(t, t) = erfc(t)/2``."""
    return 0.5 * erfc(t)


def free_boundary_kernel_section(zeta: float, eta: float) -> float:
    """Free boundary kernel on the real normal section.

    ``k(zeta, eta) = exp(-(zeta - eta)^2 / 4) * erfc((zeta + eta)/2) / 2`` for real
    arguments; complex arguments are rejected since only a real ``erfc`` exists here.
    """
    if isinstance(zeta, complex) or isinstance(eta, complex):
        raise DomainError("free_boundary_kernel_section accepts real arguments only")
    return math.exp(-0.25 * (zeta - eta) ** 2) * 0.5 * erfc(0.5 * (zeta + eta))


@dataclass(frozen=True)
class LogScaleValue:
    """A real number stored as ``sign * exp(log_magnitude)``."""

    sign: int
    log_magnitude: float = -math.inf

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise DomainError(f"sign must be -1, 0 or 1, got {self.sign!r}")
        if self.sign == 0:
            object.__setattr__(self, "log_magnitude", -math.inf)

    @classmethod
    def from_float(cls, x: float) -> "LogScaleValue":
        if x == 0:
            return cls(0)
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    @classmethod
    def from_log(cls, log_magnitude: float, sign: int = 1) -> "LogScaleValue":
        return cls(sign, log_magnitude)

    def to_float(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)


def logsumexp(terms: Iterable[LogScaleValue]) -> LogScaleValue:
    """Sum log-scale values without leaving log space.

    Terms are accumulated relative to the largest magnitude, so sums of numbers
    far below the underflow threshold are exact to rounding.
    """
    terms = list(terms)
    if not terms:
        raise DomainError("logsumexp of an empty sequence")
    nonzero = [x for x in terms if x.sign != 0]
    if not nonzero:
        return LogScaleValue(0)
    if len(nonzero) == 1:
        return nonzero[0]
    # Max-shifted compensated sum; scipy's signed logsumexp returns nan on some
    # partial cancellations (e.g. 1 + 2 - 2), so it is not used here.
    top = max(x.log_magnitude for x in nonzero)
    total = math.fsum(x.sign * math.exp(x.log_magnitude - top) for x in nonzero)
    if total == 0.0:
        return LogScaleValue(0)
    return LogScaleValue(1 if total > 0 else -1, top + math.log(abs(total)))
