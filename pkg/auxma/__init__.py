try:
    import uvloop as __uvloop

    __uvloop.install()
except ImportError:
    pass


__version__ = "0.1.0"


from .config import ExperimentConfig, load_config, parse_config
from .constants import ComparisonVariant, DensityRecipe, ExperimentName, GrowthVariant, MeasureKind, OperatorKind
from .errors import (
    ArgumentError,
    AuxmaError,
    ChartError,
    CompatibilityError,
    ConeViolation,
    ConfigError,
    ConvexityFailure,
    DomainMismatch,
    InvariantViolation,
    NonConvergence,
    PreconditionError,
    PremiseViolation,
    SingularSystem,
    SolverError,
    StageFailure,
    SymmetryViolation,
)
from .internal import FieldFile
from .lab import Laboratory
from .objects import MetricField, OperatorSpec, ScalarField, TorusGrid, BallMesh

__all__ = (
    "ExperimentConfig",
    "load_config",
    "parse_config",
    "ComparisonVariant",
    "DensityRecipe",
    "ExperimentName",
    "GrowthVariant",
    "MeasureKind",
    "OperatorKind",
    "ArgumentError",
    "AuxmaError",
    "ChartError",
    "CompatibilityError",
    "ConeViolation",
    "ConfigError",
    "ConvexityFailure",
    "DomainMismatch",
    "InvariantViolation",
    "NonConvergence",
    "PreconditionError",
    "PremiseViolation",
    "SingularSystem",
    "SolverError",
    "StageFailure",
    "SymmetryViolation",
    "FieldFile",
    "Laboratory",
    "MetricField",
    "OperatorSpec",
    "ScalarField",
    "TorusGrid",
    "BallMesh",
)
