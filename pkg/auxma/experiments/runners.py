"""Named experiments.

Every experiment takes a resolved :class:`~auxma.config.ExperimentConfig` and
returns an :class:`ExperimentResult`; inequalities that fail land in the
result's ``checks`` and flip ``passed``, they are never raised.
"""

from dataclasses import dataclass, field
from logging import getLogger
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import DensityConfig, ExperimentConfig
from ..constants import SLOPE_SLACK, ComparisonVariant, DensityRecipe, ExperimentName, GrowthVariant
from ..core.operators import operator_spec
from ..errors import ArgumentError
from ..estimates.comparison import (
    build_phi,
    choose_constants,
    epsilon_control,
    exponential_integrability,
    linfty_from_profile,
    measured_lemma_constant,
    verify_nonpositive,
)
from ..estimates.degiorgi import lower_bound, vanishing_bound, verify_growth
from ..estimates.functionals import build_profile, entropy_report, tau, trudinger_energy_check, young_split
from ..geometry.green import (
    diameter_bound,
    flat_green_oracle,
    green_lower_bound,
    green_norms,
    green_slice,
    sup_bound_experiment,
)
from ..geometry.symplectic import (
    christoffel_residual,
    conformal_family,
    run_mainnew,
    sheared_integrable_data,
    standard_integrable_data,
    validate,
)
from ..objects.abc import Record, jsonable
from ..objects.fields import MetricField, ScalarField
from ..objects.grid import TorusGrid
from ..objects.reports import SublevelProfile
from ..solvers.cma import normalize_density, solve_auxiliary, solve_cma
from .stability import normalize_log_density, run_sweep

__all__ = (
    "ExperimentResult",
    "experiment",
    "run_experiment",
    "available",
    "build_density",
    "random_profile",
    "Table",
)

logger = getLogger("auxma.experiments")

Table = Tuple[Tuple[str, ...], List[Tuple[Any, ...]]]
Runner = Callable[[ExperimentConfig], "ExperimentResult"]

_RUNNERS: Dict[ExperimentName, Runner] = {}

CHRISTOFFEL_SIZES = (32, 64, 128)
MIN_CONVERGENCE_ORDER = 1.8
C8_SPREAD = 0.2
GREEN_TOL = 1e-10
CONSERVATION_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class ExperimentResult(Record):
    experiment: ExperimentName
    passed: bool
    config: Dict[str, Any]
    report: Dict[str, Any]
    checks: Dict[str, bool] = field(default_factory=dict)
    controls: Dict[str, bool] = field(default_factory=dict)
    profile: Optional[SublevelProfile] = None
    tables: Dict[str, Table] = field(default_factory=dict)
    fields: Dict[str, ScalarField] = field(default_factory=dict)

    _skip_json = ("profile", "tables", "fields")


def experiment(name: ExperimentName) -> Callable[[Runner], Runner]:
    def decorator(fn: Runner) -> Runner:
        _RUNNERS[ExperimentName(name)] = fn
        return fn

    return decorator


def available() -> List[Tuple[str, str]]:
    """``(name, one-line summary)`` for every registered experiment."""

    out = []
    for name in ExperimentName:
        doc = (_RUNNERS[name].__doc__ or "").strip().splitlines()
        out.append((name.value, doc[0] if doc else ""))
    return out


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    runner = _RUNNERS[config.experiment]
    logger.info("running %s (n=%d, N=%d, seed=%d)", config.experiment.value, config.n, config.N, config.density.seed)
    result = runner(config)
    failed = sorted(name for name, ok in result.checks.items() if not ok)
    if failed:
        logger.warning("%s: failed checks %s", config.experiment.value, ", ".join(failed))
    held = sorted(name for name, ok in result.controls.items() if not ok)
    if held:
        logger.warning("%s: controls that did not break %s", config.experiment.value, ", ".join(held))
    return result


def _result(
    config: ExperimentConfig,
    report: Dict[str, Any],
    checks: Dict[str, bool],
    controls: Optional[Dict[str, bool]] = None,
    **extra: Any,
) -> ExperimentResult:
    """``passed`` needs every check.

    A control is a perturbed rerun expected to break its inequality; one
    that holds anyway is recorded as false in ``controls`` without failing
    the run.
    """

    controls = controls or {}
    passed = all(checks.values())
    return ExperimentResult(
        experiment=config.experiment,
        passed=bool(passed),
        config=config.to_json(),
        report=jsonable(report),
        checks={name: bool(value) for name, value in checks.items()},
        controls={name: bool(value) for name, value in controls.items()},
        **extra,
    )


def _fields(config: ExperimentConfig, **fields: ScalarField) -> Dict[str, ScalarField]:
    return dict(fields) if config.param("dump_fields", False) else {}


def build_density(grid: TorusGrid, density: DensityConfig) -> ScalarField:
    """The log-density ``F`` described by a density recipe.

    ``random`` draws Fourier coefficients on ``[-modes, modes]^m`` from a
    seeded generator and scales the result to ``max|F| = amplitude``.
    """

    recipe = DensityRecipe(density.recipe)
    if recipe is DensityRecipe.ZERO:
        return ScalarField.zeros(grid)
    if recipe is DensityRecipe.CONSTANT:
        return ScalarField.constant(grid, density.amplitude)
    if 2 * density.modes >= grid.N:
        raise ArgumentError(f"{density.modes} modes do not resolve on N = {grid.N}")

    if recipe is DensityRecipe.COSINE:
        values = np.zeros(grid.shape)
        for coordinate in grid.coordinates():
            for j in range(1, density.modes + 1):
                values = values + np.cos(2 * np.pi * j * coordinate) / j
        return ScalarField(grid, density.amplitude * values)

    rng = np.random.default_rng(density.seed)
    spectrum = np.zeros(grid.shape, dtype=complex)
    width = 2 * density.modes + 1
    coefficients = rng.standard_normal((width,) * grid.m) + 1j * rng.standard_normal((width,) * grid.m)
    wavenumbers = np.arange(-density.modes, density.modes + 1) % grid.N
    spectrum[np.ix_(*([wavenumbers] * grid.m))] = coefficients
    values = np.real(np.fft.ifftn(spectrum)) * grid.node_count
    values = values - values.mean()
    peak = np.abs(values).max()
    if peak == 0:
        return ScalarField.zeros(grid)
    return ScalarField(grid, density.amplitude * values / peak)


def _grid(config: ExperimentConfig) -> TorusGrid:
    return TorusGrid(config.n, config.N)


def _metric(config: ExperimentConfig, grid: TorusGrid, F: ScalarField) -> MetricField:
    kind = config.param("metric", "conformal")
    if kind == "flat" or not np.any(F.values):
        return MetricField.flat(grid)
    if kind == "conformal":
        return MetricField.conformal(grid, np.exp(F.values), label="conformal")
    raise ArgumentError(f"unknown metric {kind!r}; expected flat or conformal")


@experiment(ExperimentName.LINFTY)
def linfty(config: ExperimentConfig) -> ExperimentResult:
    """Solve f(λ) = k, build the auxiliary comparison and bound sup|φ| from the sublevel profile."""

    grid = _grid(config)
    n = grid.n
    spec = operator_spec(config.operator.kind, n, config.operator.degree)
    density = normalize_density(build_density(grid, config.density), n)
    F = density.normalized
    tol = config.tolerances

    phi, solve = solve_cma(grid, spec, density.k, tol=tol.residual)
    k_solved = density.k * solve.rescale

    a = float(config.param("a", 1.0))
    ell = int(config.param("ell", 64))
    p = float(config.param("p", 2.0 * n))
    if not p > n:
        raise ArgumentError(f"the L∞ chain needs p > n, got p={p}")
    delta0 = (p - n) / (n * p)

    comparisons = []
    auxiliaries = []
    checks: Dict[str, bool] = {}
    controls: Dict[str, bool] = {}
    for s in config.param("s_values", [0.0]):
        s = float(s)
        weight = ScalarField(grid, tau(ell, -phi.values - s))
        psi, A, _ = solve_auxiliary(grid, weight, k_solved, a_power=a, tol=tol.residual)
        consts = choose_constants(ComparisonVariant.KAHLER_LEMMA3, a, n, spec.gamma, A)
        Phi = build_phi(phi, psi, consts, s=s)
        check = verify_nonpositive(Phi, tol=tol.phi, phi=phi, psi=psi)
        control = epsilon_control(phi, psi, consts, s=s, tol=tol.phi)
        comparisons.append(
            {
                "s": s,
                "constants": consts,
                "phi_check": check,
                "critical_scale": control.critical_scale,
                "lemma_constant": measured_lemma_constant(phi, psi, consts, s=s),
                "control": control,
            }
        )
        auxiliaries.append(psi)
        checks[f"phi_nonpositive[s={s:g}]"] = check.passed
        if control.applicable:
            controls[f"halved_epsilon[s={s:g}]"] = control.passed

    profile = build_profile(phi, density=np.exp(n * F.values))
    bound = linfty_from_profile(profile, delta0, phi=phi, tol=tol.phi)
    checks["linfty"] = bound.passed
    integrability = exponential_integrability(auxiliaries, config.param("alphas", [0.5, 1.0, 2.0, 4.0, 8.0]))

    first = comparisons[0]["constants"]
    report = {
        "operator": spec,
        "solve": solve,
        "b": first.b,
        "epsilon": first.epsilon,
        "Lambda": first.Lambda,
        "S0": bound.S0,
        "sup_phi": float(-phi.values.min()),
        "delta0": delta0,
        "bound": bound,
        "comparisons": comparisons,
        "entropy": entropy_report(F, p, n, phi=phi),
        "integrability": integrability,
    }
    logger.info("linfty: S₀ = %.6g against sup|φ| = %.6g", bound.S0, report["sup_phi"])
    return _result(config, report, checks, controls, profile=profile, fields=_fields(config, phi=phi, F=F))


@experiment(ExperimentName.ENTROPY_ENERGY)
def entropy_energy(config: ExperimentConfig) -> ExperimentResult:
    """Entropy conventions, the Trudinger-type energy bound and the Young split of e^{nF}(-φ)^p."""

    grid = _grid(config)
    n = grid.n
    density = normalize_density(build_density(grid, config.density), n)
    F = density.normalized
    phi, solve = solve_cma(grid, operator_spec(config.operator.kind, n, config.operator.degree), density.k, tol=config.tolerances.residual)

    p = float(config.param("p", 2.0 * n))
    trudinger_p = float(config.param("trudinger_p", 0.5 * n))
    entropy = entropy_report(F, p, n, phi=phi)
    trudinger = trudinger_energy_check(phi, F, trudinger_p, alpha=float(config.param("alpha", 1.0)))
    split = young_split(-phi, F, p)

    checks = {
        "young_split": split.passed,
        "trudinger_finite": bool(np.isfinite(trudinger.exponential_integral) and np.isfinite(trudinger.energy_integral)),
        "energy_nonnegative": entropy.energy is not None and entropy.energy >= 0,
    }
    report = {"solve": solve, "entropy": entropy, "trudinger": trudinger, "young_split": split}
    return _result(config, report, checks, fields=_fields(config, phi=phi, F=F))


@experiment(ExperimentName.STABILITY)
def stability(config: ExperimentConfig) -> ExperimentResult:
    """Gap sup|u - v| against ‖e^f - e^h‖_{L¹} along the mixture family h_t."""

    grid = _grid(config)
    n = grid.n
    p = float(config.param("p", 2.0 * n))
    f = normalize_log_density(build_density(grid, config.density) * float(n))
    perturbation = DensityConfig(
        recipe=DensityRecipe.RANDOM,
        amplitude=float(config.param("perturbation_amplitude", 0.5)),
        seed=config.density.seed + 1,
        modes=config.density.modes,
    )
    f_tilde = normalize_log_density(build_density(grid, perturbation) * float(n))

    entropies = [entropy_report(ScalarField(grid, g.values / n), p, n).ent_p for g in (f, f_tilde)]
    K = float(config.param("K", 2.0 * max(entropies)))
    sweep = run_sweep(
        f, f_tilde, p, K, exponents=config.param("exponents", range(9)), tol=config.tolerances.residual
    )

    checks = {
        "monotone": sweep.monotone,
        "slope": bool(sweep.slope >= sweep.beta_ref - SLOPE_SLACK) if np.isfinite(sweep.slope) else False,
        "bounded": bool(np.isfinite(sweep.C)),
    }
    rows = [(row.t, row.distance, row.gap, row.C) for row in sweep.rows]
    report = {"sweep": sweep, "entropies": entropies, "K": K}
    return _result(config, report, checks, tables={"sweep": (("t", "distance", "gap", "C"), rows)})


def _node(config: ExperimentConfig, name: str, default: Sequence[int]) -> Tuple[int, ...]:
    return tuple(int(i) for i in config.param(name, default))


@experiment(ExperimentName.GREEN)
def green(config: ExperimentConfig) -> ExperimentResult:
    """Green slices: mean-zero, conservation, symmetry, norms, lower bound and the sup bound."""

    grid = _grid(config)
    metric = _metric(config, grid, build_density(grid, config.density))
    x = _node(config, "source", (0,) * grid.m)
    y = _node(config, "target", (grid.N // 2,) * grid.m)

    gx = green_slice(metric, x)
    gy = green_slice(metric, y)
    scale = max(1.0, float(np.abs(gx.values.values).max()))
    x, y = gx.source, gy.source
    symmetry = abs(float(gx.values.values[y] - gy.values.values[x]))

    checks = {
        "mean_zero": gx.mean_residual <= GREEN_TOL * scale,
        "conservation": gx.conservation_residual <= CONSERVATION_TOL,
        "symmetry": symmetry <= GREEN_TOL * scale,
    }
    report: Dict[str, Any] = {"metric": metric.label, "source": gx, "target": gy, "symmetry": symmetry}

    if metric.label == "flat":
        oracle = float(np.abs(gx.values.values - flat_green_oracle(grid, x).values).max())
        checks["flat_oracle"] = oracle <= GREEN_TOL * scale
        report["oracle_difference"] = oracle

    value_norm, gradient_norm = green_norms(metric, gx)
    minimum, where = green_lower_bound(gx)
    sup_bound = sup_bound_experiment(metric, -gx.values, 1.0 / metric.total_volume)
    report.update(
        value_norm=value_norm, gradient_norm=gradient_norm, lower_bound=minimum, lower_bound_node=where, sup_bound=sup_bound
    )
    return _result(config, report, checks, fields=_fields(config, green=gx.values))


@experiment(ExperimentName.DIAMETER)
def diameter(config: ExperimentConfig) -> ExperimentResult:
    """Shortest-path diameter against the Green gradient bound on flat, conformal and scaled metrics."""

    grid = _grid(config)
    F = build_density(grid, config.density)
    if not np.any(F.values):
        F = build_density(grid, DensityConfig(DensityRecipe.COSINE, 0.3, config.density.seed, 1))
    scale = float(config.param("scale", 4.0))

    flat = MetricField.flat(grid)
    conformal = MetricField.conformal(grid, np.exp(F.values), label="conformal")
    metrics = [flat, conformal, conformal.scaled(scale)]
    bounds = [diameter_bound(metric) for metric in metrics]

    checks = {f"bound[{metric.label}]": bound.passed for metric, bound in zip(metrics, bounds)}
    # Scaling ω by c scales lengths by √c.
    exponent = float(np.log(bounds[2].observed / bounds[1].observed) / np.log(scale))
    bound_exponent = float(np.log(bounds[2].bound / bounds[1].bound) / np.log(scale))
    report = {
        "bounds": {metric.label: bound for metric, bound in zip(metrics, bounds)},
        "scale": scale,
        "diameter_exponent": exponent,
        "bound_exponent": bound_exponent,
    }
    rows = [(metric.label, bound.observed, bound.bound) for metric, bound in zip(metrics, bounds)]
    return _result(config, report, checks, tables={"diameter": (("metric", "diameter", "bound"), rows)})


def _almost_complex(config: ExperimentConfig, grid: TorusGrid, amplitude: float):
    family = config.param("family", "sheared")
    x, y = grid.coordinates()
    u = amplitude * np.cos(2 * np.pi * y) * np.ones(grid.shape)
    if family == "sheared":
        shear = float(config.param("shear", 0.05)) * np.sin(2 * np.pi * x) * np.ones(grid.shape)
        return sheared_integrable_data(grid, shear, u)
    if family == "conformal":
        return conformal_family(grid, 0.5 * u)
    if family == "standard":
        return standard_integrable_data(grid)
    raise ArgumentError(f"unknown almost complex family {family!r}; expected sheared, conformal or standard")


def _convergence_order(config: ExperimentConfig, amplitude: float) -> Tuple[List[float], float]:
    residuals = []
    for N in config.param("sizes", CHRISTOFFEL_SIZES):
        data = _almost_complex(config, TorusGrid(1, int(N)), amplitude)
        residuals.append(christoffel_residual(data, validate(data)))
    errors = np.asarray(residuals)
    if errors.size < 2 or np.any(errors[:-1] <= 0) or np.any(errors[1:] <= 0):
        return residuals, float("inf")
    return residuals, float(np.min(np.log2(errors[:-1] / errors[1:])))


@experiment(ExperimentName.SYMPLECTIC)
def symplectic(config: ExperimentConfig) -> ExperimentResult:
    """The almost-Kähler L∞ pipeline over a manufactured family, plus the Christoffel identity under refinement."""

    if config.n != 1:
        raise ArgumentError("the symplectic experiment runs on the two-torus (n = 1)")
    grid = _grid(config)
    amplitudes = [float(value) for value in config.param("amplitudes", [0.1, 0.15, 0.2])]
    r0 = float(config.param("r0", 0.1))

    pipelines = []
    for amplitude in amplitudes:
        data = _almost_complex(config, grid, amplitude)
        pipelines.append(
            run_mainnew(
                data,
                r0,
                ell=int(config.param("ell", 64)),
                resolution=int(config.param("resolution", 15)),
                angular=int(config.param("angular", 32)),
                phi_tol=config.tolerances.phi,
            )
        )

    residuals, order = _convergence_order(config, amplitudes[-1])
    C8 = np.array([pipeline.constants["C_8"] for pipeline in pipelines])
    spread = float(C8.max() / C8.min() - 1.0) if C8.min() > 0 else float("inf")

    checks = {f"pipeline[{amplitude:g}]": pipeline.passed for amplitude, pipeline in zip(amplitudes, pipelines)}
    checks["christoffel_order"] = order >= MIN_CONVERGENCE_ORDER
    controls = {
        f"halved_epsilon[{amplitude:g}]": pipeline.control.passed
        for amplitude, pipeline in zip(amplitudes, pipelines)
        if pipeline.control.applicable
    }
    controls["C8_stable"] = spread <= C8_SPREAD

    report = {
        "family": config.param("family", "sheared"),
        "amplitudes": amplitudes,
        "pipelines": pipelines,
        "christoffel_residuals": residuals,
        "christoffel_order": order,
        "C8_spread": spread,
    }
    rows = [(amplitude, pipeline.sup_phi, pipeline.l1_phi, pipeline.constants["C_8"]) for amplitude, pipeline in zip(amplitudes, pipelines)]
    return _result(
        config,
        report,
        checks,
        controls,
        profile=pipelines[-1].profile,
        tables={"family": (("amplitude", "sup_phi", "l1_phi", "C_8"), rows)},
    )


def random_profile(rng: np.random.Generator, variant: GrowthVariant, samples: int) -> SublevelProfile:
    """A synthetic monotone profile on sorted random samples.

    Decreasing profiles start at ``s = 0`` and vanish from a random sample on;
    increasing profiles are positive and start above ``s = 0``.
    """

    variant = GrowthVariant(variant)
    s = np.sort(rng.uniform(0.0, rng.uniform(0.5, 4.0), samples))
    factors = rng.uniform(0.3, 1.0, samples)
    if variant is GrowthVariant.DECREASING:
        s[0] = 0.0
        phi = rng.uniform(0.1, 1.0) * np.cumprod(factors)
        phi[int(rng.integers(1, samples)) :] = 0.0
    else:
        s = s + 1e-3
        phi = np.cumprod(factors)[::-1] * rng.uniform(0.1, 1.0)
    return SublevelProfile(s_samples=s, phi_values=phi, A_values=np.zeros(samples))


@experiment(ExperimentName.DEGIORGI_SUITE)
def degiorgi_suite(config: ExperimentConfig) -> ExperimentResult:
    """Soundness of the vanishing and lower-bound lemmas on random synthetic profiles."""

    rng = np.random.default_rng(config.density.seed)
    count = int(config.param("count", 1000))
    samples = int(config.param("samples", 32))
    semantics = config.param("semantics", "step")

    vanishing_violations = 0
    lower_violations = 0
    rows = []
    for index in range(count):
        delta0 = float(rng.uniform(0.25, 2.0))
        variant = GrowthVariant.DECREASING if index % 2 == 0 else GrowthVariant.INCREASING
        profile = random_profile(rng, variant, samples)
        C0 = verify_growth(profile, variant, 1.0, delta0, semantics=semantics).minimal_constant
        s, values = profile.s_samples, profile.phi_values

        if variant is GrowthVariant.DECREASING:
            S0 = float(s[0]) + vanishing_bound(C0, delta0, float(values[0]))
            violated = bool(np.any(values[s >= S0] > 0))
            vanishing_violations += violated
            rows.append((index, variant.value, delta0, C0, S0, violated))
        else:
            c0 = lower_bound(C0, delta0, float(s[-1]))
            violated = bool(values[-1] < c0)
            lower_violations += violated
            rows.append((index, variant.value, delta0, C0, c0, violated))

    checks = {"vanishing": vanishing_violations == 0, "lower_bound": lower_violations == 0}
    report = {
        "count": count,
        "samples": samples,
        "semantics": semantics,
        "vanishing_violations": vanishing_violations,
        "lower_bound_violations": lower_violations,
    }
    header = ("index", "variant", "delta0", "constant", "threshold", "violated")
    return _result(config, report, checks, tables={"profiles": (header, rows)})
