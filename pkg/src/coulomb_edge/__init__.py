"""Exact 1-point densities of planar Coulomb gases and their edge expansions."""

__version__ = "0.1.0"

from .errors import (CoulombEdgeError, DomainError, DropletError, GeometryError, MisuseError,
                     NumericError, OracleError)
from .potential import (GINIBRE, MIXED, QUARTIC, EdgeData, EllipticGinibrePotential, RadialPotential,
                        droplet_radius, edge_data_elliptic, edge_data_radial, potential_from_spec)
from .opkernel import (density_radial, elliptic_density, gram_oracle, radial_density, radial_mass,
                       radial_norms)
from .edge import c_correction, c_hele_shaw, density_profile, edge_expansion, residual_study
from .fluct import TestFunction, expected_fluct, fluct_convergence, rho_half

__all__ = [
    "__version__",
    "CoulombEdgeError", "DomainError", "DropletError", "GeometryError", "MisuseError", "NumericError",
    "OracleError",
    "GINIBRE", "MIXED", "QUARTIC", "EdgeData", "EllipticGinibrePotential", "RadialPotential",
    "droplet_radius", "edge_data_elliptic", "edge_data_radial", "potential_from_spec",
    "density_radial", "elliptic_density", "gram_oracle", "radial_density", "radial_mass", "radial_norms",
    "c_correction", "c_hele_shaw", "density_profile", "edge_expansion", "residual_study",
    "TestFunction", "expected_fluct", "fluct_convergence", "rho_half",
]
