"""Exact solution toolkit for the monomer-dimer model with attraction.

Modules:
    special_functions -- the density function g, its inverse/derivatives,
                         and the pure-model pressure
    finite_system     -- exact finite-volume partition functions
    variational       -- limiting pressure and stationary-point structure
    phase_boundary    -- the coexistence line gamma(J)
    criticality       -- cubic normal form, amplitudes, exponent fits
    mcmc              -- Metropolis-Hastings sampler on the complete graph
    cli               -- command-line interface
"""

from .special_functions import (G1_MAX, H_C, J_C, M_C, XI_C, critical_point,
                                f_of_x, g, g_derivatives, g_inverse,
                                g_prime_threshold, one_minus_g, pressure_md,
                                pressure_md_x)

__version__ = "0.1.0"

__all__ = [
    "G1_MAX", "H_C", "J_C", "M_C", "XI_C", "critical_point", "f_of_x", "g",
    "g_derivatives", "g_inverse", "g_prime_threshold", "one_minus_g",
    "pressure_md", "pressure_md_x", "__version__",
]
