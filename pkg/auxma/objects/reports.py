from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..constants import SLOPE_SLACK, ComparisonVariant, GrowthVariant, MeasureKind
from .abc import Record
from .fields import ScalarField
from .grid import BallMesh
from .operator import OperatorSpec


@dataclass(frozen=True)
class SolveReport(Record):
    iterations: int
    final_residual: float
    positivity_margin: float
    continuation_steps: int
    rescale: float = 1.0
    converged: bool = True
    operator: Optional[OperatorSpec] = None
    kappa: float = 1.0
    linear_iterations: int = 0


@dataclass(frozen=True, eq=False)
class DensitySpec(Record):
    raw: ScalarField
    normalized: ScalarField
    c_omega: float
    n: int

    _skip_json = ("raw", "normalized")

    @property
    def k(self) -> ScalarField:
        """The right side ``k = c_ω e^{F_ω}``."""

        return self.normalized.map(lambda F: self.c_omega * np.exp(F))


@dataclass(frozen=True, eq=False)
class ConvexSolution(Record):
    psi: ScalarField
    convexity_margin: float
    boundary_residual: float
    residual: float
    mass: float
    iterations: int = 0
    dampings: int = 0
    nonconvex_trials: int = 0

    _skip_json = ("psi",)

    @property
    def mesh(self) -> BallMesh:
        return self.psi.grid


@dataclass(frozen=True)
class BoundCheck(Record):
    """An observed quantity against a proved bound."""

    observed: float
    bound: float
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class SublevelProfile(Record):
    s_samples: np.ndarray
    phi_values: np.ndarray
    A_values: np.ndarray
    measure_kind: MeasureKind = MeasureKind.DENSITY

    def rows(self):
        return zip(self.s_samples.tolist(), self.phi_values.tolist(), self.A_values.tolist())


@dataclass(frozen=True)
class EntropyReport(Record):
    ent_p: float
    ent_p_moment: float
    nash_p: float
    energy: Optional[float]
    c_omega: float
    V_omega: float
    p: float
    n: int


@dataclass(frozen=True)
class TrudingerReport(Record):
    exponential_integral: float
    energy_integral: float
    p: float
    q: float
    alpha: float


@dataclass(frozen=True, eq=False)
class YoungSplit(Record):
    lhs: np.ndarray
    middle: np.ndarray
    rhs: np.ndarray
    c_p: float
    passed: bool
    worst_margin: float

    _skip_json = ("lhs", "middle", "rhs")


@dataclass(frozen=True)
class ComparisonConstants(Record):
    variant: ComparisonVariant
    a: float
    n: int
    gamma: float
    A: float
    b: float
    epsilon: float
    Lambda: float
    extras: Dict[str, float] = field(default_factory=dict)

    def with_epsilon(self, epsilon: float) -> "ComparisonConstants":
        return ComparisonConstants(
            self.variant, self.a, self.n, self.gamma, self.A, self.b, epsilon, self.Lambda, dict(self.extras)
        )


@dataclass(frozen=True)
class PhiReport(Record):
    max_value: float
    argmax: Tuple[int, ...]
    slack_scale: float
    tol: float
    passed: bool
    diagnostics: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ControlReport(Record):
    """A comparison rebuilt with ε scaled by ``factor``, expected to break ``Φ ≤ 0``.

    ``applicable`` is false when ``critical_scale`` is zero: no ε breaks a
    comparison whose excess is nonpositive everywhere. ``passed`` is true when
    the perturbed comparison failed as expected.
    """

    factor: float
    critical_scale: float
    perturbed: PhiReport
    applicable: bool
    passed: bool


@dataclass(frozen=True)
class GrowthCertificate(Record):
    variant: GrowthVariant
    C0: float
    delta0: float
    worst_pair: Tuple[float, float]
    worst_ratio: float
    minimal_constant: float
    passed: bool
    semantics: str = "step"


@dataclass(frozen=True)
class LinftyBound(Record):
    S0: float
    B0: float
    delta0: float
    phi0: float
    observed_sup: Optional[float]
    passed: bool
    minimal_B0: Optional[float] = None
    measured_B0: bool = False


@dataclass(frozen=True, eq=False)
class IntegrabilityReport(Record):
    """``sup_family ∫e^{-αψ}`` per α, and the largest α whose sup stays below ``ceiling``."""

    alphas: np.ndarray
    log_integrals: np.ndarray
    alpha_proxy: float
    ceiling: float
    monotone: bool

    @property
    def integrals(self) -> np.ndarray:
        return np.exp(self.log_integrals)


@dataclass(frozen=True, eq=False)
class GreenSlice(Record):
    """One slice ``G(x, ·)``.

    ``conservation_residual`` is the max-norm of ``Δ_ω G - (-δ_x + 1/V_ω)``;
    the relative one divides it by the point mass height, which grows like
    ``N^m``.
    """

    source: Tuple[int, ...]
    values: ScalarField
    mean_residual: float
    conservation_residual: float
    relative_conservation_residual: float = 0.0

    _skip_json = ("values",)


@dataclass(frozen=True)
class SupBoundMeasurement(Record):
    """Measured ``C`` in ``sup v ≤ C(a + ‖v‖_{L¹})``."""

    sup_v: float
    l1_norm: float
    a: float
    ratio: float
    premise_margin: float


@dataclass(frozen=True, eq=False)
class StabilityInstance(Record):
    f: ScalarField
    h: ScalarField
    u: ScalarField
    v: ScalarField
    distance: float
    gap: float
    normalization_defect: float
    entropy_f: float
    entropy_h: float
    K: float
    beta_ref: float

    _skip_json = ("f", "h", "u", "v")


@dataclass(frozen=True)
class SweepRow(Record):
    t: float
    distance: float
    gap: float
    C: float


@dataclass(frozen=True)
class StabilitySweep(Record):
    """``gap`` against ``distance`` along ``h_t = log((1-t)e^f + t e^{f̃})``."""

    rows: Tuple[SweepRow, ...]
    beta_ref: float
    slope: float
    C: float
    monotone: bool
    K: float

    @property
    def passed(self) -> bool:
        """Gap shrinks along the family and decays at least at the reference rate."""

        return self.monotone and self.slope >= self.beta_ref - SLOPE_SLACK

    def to_json(self) -> dict:
        json = super().to_json()
        json["passed"] = self.passed
        return json


@dataclass(frozen=True)
class ValidationReport(Record):
    """Residuals of the almost complex data identities; failures are data."""

    j_square: float
    taming_margin: float
    d_omega: float
    compatibility: float
    omega_tilde_antisymmetry: float
    d_omega_tilde: float
    tol: float

    @property
    def structure_ok(self) -> bool:
        return self.j_square <= self.tol and self.taming_margin > 0 and self.d_omega <= self.tol

    @property
    def almost_kahler(self) -> bool:
        return (
            self.compatibility <= self.tol
            and self.omega_tilde_antisymmetry <= self.tol
            and self.d_omega_tilde <= self.tol
        )

    @property
    def passed(self) -> bool:
        return self.structure_ok and self.almost_kahler

    def to_json(self) -> dict:
        json = super().to_json()
        json.update(structure_ok=self.structure_ok, almost_kahler=self.almost_kahler, passed=self.passed)
        return json


@dataclass(frozen=True, eq=False)
class PipelineReport(Record):
    """Every constant and residual of one run of the symplectic L∞ pipeline."""

    validation: ValidationReport
    x0: Tuple[int, ...]
    r0: float
    ell: int
    K: float
    constants: Dict[str, float]
    residuals: Dict[str, float]
    phi_check: PhiReport
    critical_scale: float
    control: ControlReport
    growth: GrowthCertificate
    growth_step: GrowthCertificate
    profile: SublevelProfile
    sup_phi: float
    l1_phi: float
    checks: Dict[str, bool]
    passed: bool

    _skip_json = ("profile",)
