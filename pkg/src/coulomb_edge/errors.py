"""Exception hierarchy shared by all modules."""


class CoulombEdgeError(Exception):
    """Base class for errors raised by :mod:`coulomb_edge`."""


class DomainError(CoulombEdgeError, ValueError):
    """An argument lies outside the domain of an operation."""


class NumericError(CoulombEdgeError, ArithmeticError):
    """A numerical procedure failed to converge or overflowed."""


class DropletError(CoulombEdgeError):
    """No admissible (simply connected, non-degenerate) droplet was found."""


class MisuseError(CoulombEdgeError):
    """Objects built for different ensembles were combined."""


class OracleError(CoulombEdgeError):
    """A brute-force oracle is unreliable or disagrees with a fast path."""


class GeometryError(CoulombEdgeError):
    """A geometric quantity could not be validated or the chart is degenerate."""
