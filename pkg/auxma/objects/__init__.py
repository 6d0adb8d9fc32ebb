from .abc import Record, jsonable
from .almost_complex import AlmostComplexData, standard_form, standard_structure
from .fields import HermitianField, MetricField, ScalarField
from .grid import BallMesh, TorusGrid, unit_ball_volume
from .operator import OperatorSpec
from .reports import (
    BoundCheck,
    ComparisonConstants,
    ControlReport,
    ConvexSolution,
    DensitySpec,
    EntropyReport,
    GreenSlice,
    GrowthCertificate,
    IntegrabilityReport,
    LinftyBound,
    PhiReport,
    PipelineReport,
    SolveReport,
    StabilityInstance,
    StabilitySweep,
    SublevelProfile,
    SupBoundMeasurement,
    SweepRow,
    TrudingerReport,
    ValidationReport,
    YoungSplit,
)

__all__ = (
    "Record",
    "jsonable",
    "AlmostComplexData",
    "standard_form",
    "standard_structure",
    "HermitianField",
    "MetricField",
    "ScalarField",
    "BallMesh",
    "TorusGrid",
    "unit_ball_volume",
    "OperatorSpec",
    "BoundCheck",
    "ComparisonConstants",
    "ControlReport",
    "ConvexSolution",
    "DensitySpec",
    "EntropyReport",
    "GreenSlice",
    "GrowthCertificate",
    "IntegrabilityReport",
    "LinftyBound",
    "PhiReport",
    "PipelineReport",
    "SolveReport",
    "StabilityInstance",
    "StabilitySweep",
    "SublevelProfile",
    "SupBoundMeasurement",
    "SweepRow",
    "TrudingerReport",
    "ValidationReport",
    "YoungSplit",
)
