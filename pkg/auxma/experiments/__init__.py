from .runners import ExperimentResult, available, build_density, run_experiment
from .stability import beta_ref, family, normalize_log_density, run_stability, run_sweep

__all__ = (
    "ExperimentResult",
    "available",
    "build_density",
    "run_experiment",
    "beta_ref",
    "family",
    "normalize_log_density",
    "run_stability",
    "run_sweep",
)
