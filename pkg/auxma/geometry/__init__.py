from .green import (
    diameter_bound,
    flat_green_oracle,
    graph_distances,
    green_lower_bound,
    green_norms,
    green_slice,
    laplacian_apply,
    sup_bound_experiment,
)
from .symplectic import (
    christoffel_contraction,
    christoffel_residual,
    conformal_family,
    measure_CJ,
    metric_christoffel_contraction,
    run_mainnew,
    sheared_integrable_data,
    solve_linear_phi,
    standard_integrable_data,
    validate,
)

__all__ = (
    "diameter_bound",
    "flat_green_oracle",
    "graph_distances",
    "green_lower_bound",
    "green_norms",
    "green_slice",
    "laplacian_apply",
    "sup_bound_experiment",
    "christoffel_contraction",
    "christoffel_residual",
    "conformal_family",
    "measure_CJ",
    "metric_christoffel_contraction",
    "run_mainnew",
    "sheared_integrable_data",
    "solve_linear_phi",
    "standard_integrable_data",
    "validate",
)
