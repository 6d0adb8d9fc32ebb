from enum import Enum


class OperatorKind(str, Enum):
    MONGE_AMPERE = "monge_ampere"
    HESSIAN = "hessian"
    PMA = "pma"


class ComparisonVariant(str, Enum):
    KAHLER_LEMMA3 = "kahler_lemma3"
    ENERGY_SECTION4 = "energy_section4"
    SYMPLECTIC_SECTION12 = "symplectic_section12"


class GrowthVariant(str, Enum):
    DECREASING = "decreasing"
    INCREASING = "increasing"


class MeasureKind(str, Enum):
    BACKGROUND = "background"
    DENSITY = "density"
    CALABI_YAU = "calabi_yau"


class DensityRecipe(str, Enum):
    ZERO = "zero"
    CONSTANT = "constant"
    COSINE = "cosine"
    RANDOM = "random"


class ExperimentName(str, Enum):
    LINFTY = "linfty"
    ENTROPY_ENERGY = "entropy_energy"
    STABILITY = "stability"
    GREEN = "green"
    DIAMETER = "diameter"
    SYMPLECTIC = "symplectic"
    DEGIORGI_SUITE = "degiorgi_suite"


# Default tolerances shared across the solvers.
RESIDUAL_TOL = 1e-10
RMA_RESIDUAL_TOL = 1e-9
HERMITIAN_TOL = 1e-10
PHI_TOL = 1e-6
GMRES_RTOL = 1e-12
MASS_TOL = 1e-12
SLOPE_SLACK = 0.05
