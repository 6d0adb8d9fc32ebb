from .cma import compatibility_constant, normalize_density, solve_auxiliary, solve_cma
from .rma import abp_check, abp_constants, gradient_norm, hessian_determinant, interior_gradient_check, radial_solution, solve_rma

__all__ = (
    "compatibility_constant",
    "normalize_density",
    "solve_auxiliary",
    "solve_cma",
    "abp_check",
    "abp_constants",
    "gradient_norm",
    "hessian_determinant",
    "interior_gradient_check",
    "radial_solution",
    "solve_rma",
)
