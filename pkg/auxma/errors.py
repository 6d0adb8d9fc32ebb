from typing import Any, Mapping, Optional


class AuxmaError(Exception):
    pass


class DomainMismatch(AuxmaError):
    pass


class SymmetryViolation(AuxmaError):
    pass


class ConeViolation(AuxmaError):
    pass


class ArgumentError(AuxmaError, ValueError):
    pass


class PremiseViolation(AuxmaError):
    pass


class InvariantViolation(AuxmaError):
    pass


class PreconditionError(AuxmaError):
    pass


class CompatibilityError(AuxmaError):
    pass


class ChartError(AuxmaError):
    pass


class SolverError(AuxmaError):
    def __init__(self, report: Any, *args) -> None:
        self.report = report

        super().__init__(*args)


class NonConvergence(SolverError):
    pass


class ConvexityFailure(SolverError):
    pass


class SingularSystem(SolverError):
    pass


class StageFailure(AuxmaError):
    def __init__(self, stage: str, diagnostics: Optional[Mapping[str, Any]] = None, *args) -> None:
        self.stage = stage
        self.diagnostics = dict(diagnostics or {})

        super().__init__(f"stage {stage!r} failed", *args)


class ConfigError(AuxmaError):
    def __init__(self, field: str, message: str, line: Optional[int] = None) -> None:
        self.field = field
        self.line = line

        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{field}{where}: {message}")
