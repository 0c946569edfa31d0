"""Bubble calculus and reduced energies for the planar H-surface system.

Submodules:
  geometry   bubble family, rotations, constants, pointwise identities
  domains    Green data on the disk and conformal images
  annulus    deck-transformation series on round annuli
  poisson    harmonic extension on the disk
  energy     reduced k-bubble functionals with analytic gradients
  euler      quadrature oracle for the full Euler functional
  spheres    multi-sphere critical-point construction with certificates
  harmonics  linearized operator on vector spherical harmonics
  cli        command-line interface
"""

from .geometry import (A0, BUBBLE_ENERGY, BubbleParams, bubble_derivatives,
                       bubble_laplacian, bubble_value, constant_a0,
                       identity_integral_zero, pohozaev_residual,
                       rotation_aligning, rotation_from_angles,
                       rotation_relative, stereographic, wedge_xy)
from .domains import (AnnulusDomain, ConformalDomain, DiskDomain, green_data,
                      h_functions, h_tilde, mobius_domain, radii,
                      regular_part)
from .energy import (Configuration, ZeroDatum, d_r_g, f_single, g_omega,
                     interaction_pair, optimal_lambda,
                     rotation_extremal_datum, sigma_gradient, sigma_total,
                     two_bubble_extremal)

__version__ = "0.1.0"

__all__ = [
    "A0", "BUBBLE_ENERGY", "BubbleParams", "bubble_derivatives",
    "bubble_laplacian", "bubble_value", "constant_a0",
    "identity_integral_zero", "pohozaev_residual", "rotation_aligning",
    "rotation_from_angles", "rotation_relative", "stereographic", "wedge_xy",
    "AnnulusDomain", "ConformalDomain", "DiskDomain", "green_data",
    "h_functions", "h_tilde", "mobius_domain", "radii", "regular_part",
    "Configuration", "ZeroDatum", "d_r_g", "f_single", "g_omega",
    "interaction_pair", "optimal_lambda", "rotation_extremal_datum",
    "sigma_gradient", "sigma_total", "two_bubble_extremal",
    "__version__",
]
