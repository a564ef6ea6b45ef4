"""Caputo-stationary functions: solve, blow up, and approximate.

A numerical toolkit around the Caputo fractional derivative of order
s in (0, 1): weakly singular product-integration quadrature, the exact
stationary-extension solver for piecewise-polynomial causal data, the
blow-up family converging to kappa x^s, and the constructive density
pipeline that builds a Caputo-stationary function within any C^k
tolerance of a smooth target on [0, 1].
"""

from .blowup import (
    BlowupMember,
    KappaEstimate,
    Psi0Profile,
    build_psi,
    check_blowup_convergence,
    estimate_kappa,
    eval_vj,
)
from .caputo_operator import ResidualReport, caputo_derivative, caputo_residual
from .density_builder import (
    ApproximationReport,
    JetCombination,
    approximate_function,
    approximate_monomial,
    jet_matrix,
    prescribe_jet,
)
from .extension_solver import (
    ExtensionSolution,
    JunctionProximityError,
    compute_g,
    extension_derivative,
    solve_extension,
)
from .piecewise import PiecewisePoly
from .profiles import CausalProfile, builtin_profile, quadratic_bump_profile, ramp_profile
from .singular_quadrature import (
    GradedMesh,
    integrate_singular,
    kernel_identity_check,
    kernel_identity_reference,
)
from .special_functions import FractionalOrder, beta, gamma, reflection

__all__ = [
    "FractionalOrder",
    "gamma",
    "beta",
    "reflection",
    "GradedMesh",
    "integrate_singular",
    "kernel_identity_check",
    "kernel_identity_reference",
    "PiecewisePoly",
    "CausalProfile",
    "ramp_profile",
    "quadratic_bump_profile",
    "builtin_profile",
    "caputo_derivative",
    "caputo_residual",
    "ResidualReport",
    "ExtensionSolution",
    "solve_extension",
    "compute_g",
    "extension_derivative",
    "JunctionProximityError",
    "Psi0Profile",
    "BlowupMember",
    "KappaEstimate",
    "build_psi",
    "eval_vj",
    "estimate_kappa",
    "check_blowup_convergence",
    "JetCombination",
    "jet_matrix",
    "prescribe_jet",
    "approximate_monomial",
    "approximate_function",
    "ApproximationReport",
]
