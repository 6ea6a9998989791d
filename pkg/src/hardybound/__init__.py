"""Worst-case error bounds for analytic continuation of Hardy-space functions.

Given |f| ≤ ε in L²(Γ) on a curve Γ in the upper half-plane and ‖f‖_{H²} ≤ 1,
the package computes the sharp bound on |f(z)| at points z off Γ, the spectra
that govern it, the theoretical decay rates, and the closed forms for the case
where Γ is an interval of the real axis.
"""

__version__ = "0.1.0"

from .boundary import boundary_bound, explicit_u, gamma_exponent, kp_inverse, kp_transform, truncated_hilbert
from .continuation import bound_M, bound_report, eps_grid, eta_star, phi, solve_direct, solve_spectral
from .geometry import CurveSpec, discretize, parse_curve
from .operators import assemble_K, rhs_vector
from .quadrature import gauss_legendre, tanh_rule
from .spectral import decay_fit, eigendecompose, project_rhs

__all__ = [
    "__version__",
    "CurveSpec",
    "parse_curve",
    "discretize",
    "gauss_legendre",
    "tanh_rule",
    "assemble_K",
    "rhs_vector",
    "eigendecompose",
    "project_rhs",
    "decay_fit",
    "solve_spectral",
    "solve_direct",
    "bound_M",
    "bound_report",
    "eps_grid",
    "eta_star",
    "phi",
    "boundary_bound",
    "gamma_exponent",
    "explicit_u",
    "truncated_hilbert",
    "kp_transform",
    "kp_inverse",
]
