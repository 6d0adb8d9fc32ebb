from dataclasses import dataclass
from logging import getLogger
from math import comb
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from ..constants import MASS_TOL, RESIDUAL_TOL, OperatorKind
from ..core.operators import cone_margin, f_eval, f_gradient, monge_ampere
from ..errors import ArgumentError, ConeViolation, NonConvergence
from ..objects.fields import ScalarField
from ..objects.grid import TorusGrid
from ..objects.operator import OperatorSpec
from ..objects.reports import DensitySpec, SolveReport
from .linear import NewtonSystem, complex_hessian_values

__all__ = ("normalize_density", "solve_cma", "solve_auxiliary", "compatibility_constant")

logger = getLogger("auxma.solvers")

DEFAULT_STEPS = (0.25, 0.5, 0.75, 1.0)
MAX_NEWTON = 30
MAX_HALVINGS = 20
MIN_CONTINUATION_STEP = 1.0 / 64
STAGE_TOL = 1e-8


def normalize_density(raw: ScalarField, n: int) -> DensitySpec:
    """Split ``F`` into ``F_ω + const`` with ``mean e^{nF_ω} = 1``.

    On the flat desk torus the Kähler class equals the background class, so
    ``c_ω = (V_ω / V)^{1/n} = 1``.
    """

    grid = raw.require_torus()
    log_mean = logsumexp(n * raw.values) - np.log(raw.values.size)
    normalized = ScalarField(grid, raw.values - log_mean / n)
    return DensitySpec(raw=raw, normalized=normalized, c_omega=1.0, n=n)


def _identity_value(spec: OperatorSpec) -> float:
    value, _ = f_eval(spec, np.ones(spec.n))
    return float(value)


def _conserved_mean(spec: OperatorSpec) -> Optional[float]:
    """Discrete mean of ``f(λ)^degree`` fixed by the background, if any."""

    if spec.kind is OperatorKind.MONGE_AMPERE:
        return 1.0
    if spec.kind is OperatorKind.HESSIAN:
        return float(comb(spec.n, spec.degree))
    return None


@dataclass
class _State:
    phi: np.ndarray
    shift: float
    lam: np.ndarray
    vectors: np.ndarray
    value: np.ndarray
    member: np.ndarray


class _Newton:
    def __init__(self, grid: TorusGrid, spec: OperatorSpec) -> None:
        self.grid = grid
        self.spec = spec
        self.iterations = 0
        self.linear_iterations = 0

    def state(self, phi: np.ndarray, shift: float) -> _State:
        h = complex_hessian_values(phi, self.grid) + np.eye(self.spec.n)
        lam, vectors = np.linalg.eigh(h)
        value, member = f_eval(self.spec, lam)
        return _State(phi, shift, lam, vectors, value, member)

    @staticmethod
    def log_residual(state: _State, target: np.ndarray) -> np.ndarray:
        return np.log(state.value) - np.log(target) - state.shift

    def run(self, start: _State, target: np.ndarray, tol: float) -> Tuple[_State, bool, bool]:
        """Newton iteration towards ``f(λ) = target · e^{shift}``.

        :return: ``(state, converged, failed on a cone exit)``
        """

        state = start
        for _ in range(MAX_NEWTON):
            G = self.log_residual(state, target)
            if np.abs(state.value - target * np.exp(state.shift)).max() <= tol:
                return state, True, False

            grad, _ = f_gradient(self.spec, state.lam)
            weights = grad / state.value[..., None]
            V = state.vectors
            coefficients = np.einsum("...ij,...j,...kj->...ik", V, weights, np.conj(V))
            delta, dshift, inner = NewtonSystem(self.grid, coefficients).solve(G)
            self.linear_iterations += inner
            self.iterations += 1

            size = np.abs(G).max()
            step = 1.0
            cone_exit = False
            for halving in range(MAX_HALVINGS + 1):
                trial = self.state(state.phi + step * delta, state.shift + step * dshift)
                if not np.all(trial.member):
                    cone_exit = True
                elif np.abs(self.log_residual(trial, target)).max() < size:
                    if halving:
                        logger.debug("accepted damped step %g after %d halvings", step, halving)
                    state = trial
                    break
                step *= 0.5
            else:
                logger.debug("line search exhausted (cone exit: %s)", cone_exit)
                return state, False, cone_exit

        converged = np.abs(state.value - target * np.exp(state.shift)).max() <= tol
        return state, bool(converged), False


def solve_cma(
    grid: TorusGrid,
    spec: OperatorSpec,
    k: ScalarField,
    tol: float = RESIDUAL_TOL,
    steps: Sequence[float] = DEFAULT_STEPS,
) -> Tuple[ScalarField, SolveReport]:
    """Solve ``f(λ[I + Hess_c φ]) = k`` on the flat torus.

    The equation is solved up to a constant multiple of ``k``. For the
    Monge-Ampère and Hessian operators ``k`` is first rescaled so the
    discrete mass identity holds; the final multiple actually solved for is
    reported as ``rescale``.

    :raises ArgumentError: if ``k`` is not strictly positive.
    :raises ConeViolation: if Newton keeps leaving the cone.
    :raises NonConvergence: if continuation cannot be refined further.
    """

    if k.grid != grid:
        k.require_torus()
        raise ArgumentError("density lives on a different grid")
    if spec.n != grid.n:
        raise ArgumentError(f"operator dimension {spec.n} does not match grid dimension {grid.n}")
    if not np.all(k.values > 0):
        raise ArgumentError("density k must be positive at every node")

    rescale = 1.0
    conserved = _conserved_mean(spec)
    if conserved is not None:
        mass = float(np.mean(k.values**spec.degree))
        if abs(mass / conserved - 1.0) > MASS_TOL:
            rescale = (conserved / mass) ** (1.0 / spec.degree)
            logger.warning("density violates discrete mass compatibility; rescaled by %.6g", rescale)
    target = rescale * k.values
    base = _identity_value(spec)

    newton = _Newton(grid, spec)
    state = newton.state(np.zeros(grid.shape), 0.0)
    completed = 0.0
    stages = 0
    pending = list(steps)
    last_cone_exit = False

    if np.abs(state.value - target).max() <= tol:
        pending = []
        completed = 1.0

    while pending:
        t = pending[0]
        stage_target = (1.0 - t) * base + t * target
        stage_tol = tol if t >= 1.0 else max(tol, STAGE_TOL)
        result, converged, cone_exit = newton.run(state, stage_target, stage_tol)

        if converged:
            logger.debug("continuation stage t=%g converged after %d Newton steps", t, newton.iterations)
            state = result
            completed = t
            stages += 1
            pending.pop(0)
            continue

        last_cone_exit = cone_exit
        if t - completed <= MIN_CONTINUATION_STEP:
            report = _report(newton, spec, result, target, rescale, stages, converged=False)
            if last_cone_exit:
                raise ConeViolation(f"Newton left the cone of {spec.label} at t={t:g}")
            raise NonConvergence(report, f"continuation stalled at t={t:g}")
        pending.insert(0, 0.5 * (completed + t))
        logger.debug("refining continuation between t=%g and t=%g", completed, t)

    phi = state.phi - state.phi.max()
    report = _report(newton, spec, state, target, rescale, stages, converged=True)
    logger.info("solved %s: residual %.3e after %d Newton steps", spec.label, report.final_residual, report.iterations)
    return ScalarField(grid, phi), report


def _report(
    newton: _Newton,
    spec: OperatorSpec,
    state: _State,
    target: np.ndarray,
    rescale: float,
    stages: int,
    converged: bool,
) -> SolveReport:
    effective = np.exp(state.shift)
    residual = float(np.abs(state.value - target * effective).max()) if np.all(state.member) else float("inf")
    margin = float(cone_margin(spec, state.lam).min())
    return SolveReport(
        iterations=newton.iterations,
        final_residual=residual,
        positivity_margin=margin,
        continuation_steps=stages,
        rescale=rescale * effective,
        converged=converged,
        operator=spec,
        linear_iterations=newton.linear_iterations,
    )


def compatibility_constant(weight: ScalarField, k: ScalarField, n: int) -> float:
    """``A = mean(w · k^n)``, the constant making the auxiliary masses equal."""

    return float(np.mean(weight.values * k.values**n))


def solve_auxiliary(
    grid: TorusGrid,
    weight: ScalarField,
    k: ScalarField,
    a_power: float = 1.0,
    tol: float = RESIDUAL_TOL,
) -> Tuple[ScalarField, float, SolveReport]:
    """Solve ``(ω + i∂∂̄ψ)^n = (w^a / A) k^n ω_X^n`` with ``max ψ = 0``.

    ``weight`` is typically ``τ_ℓ(-φ + q - s)``; pass ``a_power = 1`` when it
    already carries its exponent.
    """

    if not np.all(weight.values > 0):
        raise ArgumentError("auxiliary weight must be strictly positive")
    w = weight.map(lambda values: values**a_power)
    A = compatibility_constant(w, k, grid.n)
    right = ScalarField(grid, (w.values / A) ** (1.0 / grid.n) * k.values)
    psi, report = solve_cma(grid, monge_ampere(grid.n), right, tol=tol)
    return psi, A, report

