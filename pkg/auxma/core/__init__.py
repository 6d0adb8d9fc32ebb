from .calculus import complex_hessian, real_hessian, relative_eigenvalues, relative_endomorphism
from .operators import cone_margin, f_eval, f_gradient, hessian, in_cone, measure_gamma, monge_ampere, operator_spec, pma, sigma

__all__ = (
    "complex_hessian",
    "real_hessian",
    "relative_eigenvalues",
    "relative_endomorphism",
    "cone_margin",
    "f_eval",
    "f_gradient",
    "hessian",
    "in_cone",
    "measure_gamma",
    "monge_ampere",
    "operator_spec",
    "pma",
    "sigma",
)
