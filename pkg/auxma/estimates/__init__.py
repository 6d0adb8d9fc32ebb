from .comparison import (
    build_phi,
    choose_constants,
    critical_scale,
    epsilon_control,
    exponential_integrability,
    linfty_from_profile,
    measured_lemma_constant,
    verify_nonpositive,
)
from .degiorgi import lower_bound, vanishing_bound, vanishing_point, verify_growth
from .functionals import (
    build_profile,
    entropy_report,
    growth_constant,
    tau,
    trudinger_energy_check,
    trudinger_exponent,
    young_split,
)

__all__ = (
    "build_phi",
    "choose_constants",
    "critical_scale",
    "epsilon_control",
    "exponential_integrability",
    "linfty_from_profile",
    "measured_lemma_constant",
    "verify_nonpositive",
    "lower_bound",
    "vanishing_bound",
    "vanishing_point",
    "verify_growth",
    "build_profile",
    "entropy_report",
    "growth_constant",
    "tau",
    "trudinger_energy_check",
    "trudinger_exponent",
    "young_split",
)
