from functools import lru_cache
from logging import getLogger
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.linalg import solve_banded

from ..constants import RMA_RESIDUAL_TOL
from ..errors import ArgumentError, ConvexityFailure, NonConvergence
from ..internal.polar import PolarOperators
from ..objects.fields import ScalarField
from ..objects.grid import BallMesh, unit_ball_volume
from ..objects.reports import BoundCheck, ConvexSolution

__all__ = (
    "solve_rma",
    "abp_check",
    "interior_gradient_check",
    "hessian_determinant",
    "gradient_norm",
    "radial_solution",
    "abp_constants",
)

logger = getLogger("auxma.rma")

MAX_NEWTON = 60
MAX_HALVINGS = 30
GRADIENT_SLACK = 1e-8


@lru_cache(maxsize=16)
def _operators(resolution: int, angular: int, radius: float) -> PolarOperators:
    return PolarOperators.build(resolution, angular, radius)


def _polar(mesh: BallMesh) -> PolarOperators:
    return _operators(mesh.resolution, mesh.angular, mesh.radius)


def _check_density(mesh: BallMesh, rho: ScalarField) -> np.ndarray:
    if rho.grid != mesh:
        raise ArgumentError("density must live on the ball mesh being solved")
    interior = rho.values[~mesh.boundary_mask]
    if not np.all(interior > 0):
        raise ArgumentError("density must be positive at every interior node")
    return rho.values


def _solve_interval(mesh: BallMesh, rho: np.ndarray) -> ConvexSolution:
    h = 2 * mesh.radius / mesh.resolution
    count = mesh.resolution - 1
    bands = np.zeros((3, count))
    bands[0, 1:] = 1.0
    bands[1, :] = -2.0
    bands[2, :-1] = 1.0
    interior = solve_banded((1, 1), bands / h**2, rho[1:-1])

    psi = np.zeros(mesh.shape)
    psi[1:-1] = interior
    second = (psi[:-2] - 2 * psi[1:-1] + psi[2:]) / h**2
    return ConvexSolution(
        psi=ScalarField(mesh, psi),
        convexity_margin=float(second.min()),
        boundary_residual=float(np.abs(psi[mesh.boundary_mask]).max()),
        residual=float(np.abs(second - rho[1:-1]).max()),
        mass=float((mesh.weights * rho).sum()),
    )


def _min_eigenvalue(A: np.ndarray, B: np.ndarray, C: np.ndarray) -> np.ndarray:
    return 0.5 * (A + C) - np.sqrt(0.25 * (A - C) ** 2 + B**2)


def _solve_disk(mesh: BallMesh, rho: np.ndarray, tol: float) -> ConvexSolution:
    ops = _polar(mesh)
    M = mesh.angular
    target = rho[1:, :].ravel()
    r = ops.r[M:]

    # Start from the convex quadratic with the mean density.
    u = 0.5 * np.sqrt(target.mean()) * (r**2 - mesh.radius**2)

    def evaluate(u: np.ndarray):
        A, B, C = ops.hessian_frame(u)
        A, B, C = A[M:], B[M:], C[M:]
        return A * C - B**2 - target, _min_eigenvalue(A, B, C)

    residual, lowest = evaluate(u)
    if lowest.min() <= 0:
        raise ConvexityFailure(None, "initial quadratic is not convex")

    iterations = dampings = nonconvex_trials = 0
    size = np.abs(residual).max()
    floor = 1e-14 * max(1.0, float(target.max()))
    while size > floor and iterations < MAX_NEWTON:
        J = ops.determinant_jacobian(u)[M:]
        delta = np.linalg.solve(J, -residual)
        iterations += 1

        step = 1.0
        for halving in range(MAX_HALVINGS + 1):
            trial = u + step * delta
            trial_residual, trial_lowest = evaluate(trial)
            if trial_lowest.min() <= 0:
                nonconvex_trials += 1
            elif np.abs(trial_residual).max() < size:
                dampings += halving
                break
            step *= 0.5
        else:
            if size <= tol:
                break
            report = _disk_solution(mesh, ops, u, rho, residual, lowest, iterations, dampings, nonconvex_trials)
            if trial_lowest.min() <= 0:
                raise ConvexityFailure(report, "damping could not keep the iterate convex")
            raise NonConvergence(report, f"real Monge-Ampère residual stalled at {size:.3e}")

        u, residual, lowest = trial, trial_residual, trial_lowest
        size = np.abs(residual).max()
        logger.debug("rma newton %d: residual %.3e, step %g", iterations, size, step)

    solution = _disk_solution(mesh, ops, u, rho, residual, lowest, iterations, dampings, nonconvex_trials)
    if solution.residual > tol:
        raise NonConvergence(solution, f"real Monge-Ampère residual {solution.residual:.3e} above {tol:g}")
    return solution


def _disk_solution(mesh, ops, u, rho, residual, lowest, iterations, dampings, nonconvex_trials) -> ConvexSolution:
    psi = np.zeros(mesh.shape)
    psi[1:, :] = u.reshape(mesh.radial_count, mesh.angular)
    return ConvexSolution(
        psi=ScalarField(mesh, psi),
        convexity_margin=float(lowest.min()),
        boundary_residual=float(np.abs(psi[mesh.boundary_mask]).max()),
        residual=float(np.abs(residual).max()),
        mass=float((mesh.weights * rho).sum()),
        iterations=iterations,
        dampings=dampings,
        nonconvex_trials=nonconvex_trials,
    )


def solve_rma(mesh: BallMesh, rho: ScalarField, tol: float = RMA_RESIDUAL_TOL) -> ConvexSolution:
    """Convex solution of ``det D²ψ = ρ`` in B(0, 2r0) with ``ψ = 0`` on the boundary.

    :raises ConvexityFailure: if Newton damping cannot keep the iterate convex.
    :raises NonConvergence: if the residual stalls above ``tol``.
    """

    values = _check_density(mesh, rho)
    if mesh.m == 1:
        solution = _solve_interval(mesh, values)
    else:
        solution = _solve_disk(mesh, values, tol)
    logger.info(
        "real MA on %s: residual %.3e, convexity margin %.3e",
        mesh.to_json(),
        solution.residual,
        solution.convexity_margin,
    )
    return solution


def hessian_determinant(solution: ConvexSolution) -> ScalarField:
    """``det D²ψ`` at interior nodes (zero on the boundary)."""

    mesh = solution.mesh
    out = np.zeros(mesh.shape)
    psi = solution.psi.values
    if mesh.m == 1:
        h = 2 * mesh.radius / mesh.resolution
        out[1:-1] = (psi[:-2] - 2 * psi[1:-1] + psi[2:]) / h**2
    else:
        A, B, C = _polar(mesh).hessian_frame(psi[1:, :].ravel())
        out[1:, :] = (A * C - B**2)[mesh.angular :].reshape(mesh.radial_count, mesh.angular)
    return ScalarField(mesh, out)


def gradient_norm(solution: ConvexSolution) -> ScalarField:
    mesh = solution.mesh
    psi = solution.psi.values
    if mesh.m == 1:
        return ScalarField(mesh, np.abs(np.gradient(psi, 2 * mesh.radius / mesh.resolution)))
    ops = _polar(mesh)
    u = psi[1:, :].ravel()
    ur = ops.Dr @ u
    ut = ops.Dt @ u
    return ScalarField(mesh, np.sqrt(ur**2 + (ut / ops.r) ** 2).reshape(mesh.shape))


def abp_constants(m: int):
    """The printed constant ``4/β`` and the dimensional ``4/β^{1/m}``, β the unit ball volume."""

    beta = unit_ball_volume(m)
    return 4.0 / beta, 4.0 / beta ** (1.0 / m)


def abp_check(solution: ConvexSolution, r0: float = None) -> BoundCheck:
    """Compare ``-inf ψ`` with the ABP bound ``(4/β)·r0·mass^{1/m}``.

    Both the printed constant ``4/β`` and the dimensional ``4/β^{1/m}`` are
    reported; the pass flag uses the larger of the two.
    """

    mesh = solution.mesh
    r0 = mesh.r0 if r0 is None else r0
    scale = r0 * max(solution.mass, 0.0) ** (1.0 / mesh.m)
    printed, dimensional = (c * scale for c in abp_constants(mesh.m))
    observed = float(-solution.psi.values.min())
    bound = max(printed, dimensional)
    return BoundCheck(
        observed=observed,
        bound=bound,
        passed=observed <= bound,
        details={
            "printed_bound": printed,
            "dimensional_bound": dimensional,
            "satisfies_printed": observed <= printed,
            "satisfies_dimensional": observed <= dimensional,
            "mass": solution.mass,
        },
    )


def interior_gradient_check(solution: ConvexSolution, r0: float = None) -> BoundCheck:
    """Compare ``sup_{B(0, r0)} |∇ψ|`` with ``4/β`` times ``mass^{1/m}``."""

    mesh = solution.mesh
    r0 = mesh.r0 if r0 is None else r0
    inside = (mesh.norms <= r0) & ~mesh.boundary_mask
    grad = gradient_norm(solution).values
    observed = float(grad[inside].max()) if np.any(inside) else 0.0
    scale = max(solution.mass, 0.0) ** (1.0 / mesh.m)
    printed, dimensional = (c * scale for c in abp_constants(mesh.m))
    bound = max(printed, dimensional)
    return BoundCheck(
        observed=observed,
        bound=bound,
        passed=observed <= bound + GRADIENT_SLACK,
        details={"printed_bound": printed, "dimensional_bound": dimensional, "mass": solution.mass},
    )


def radial_solution(rho: Callable[[float], float], radius: float, r: np.ndarray) -> np.ndarray:
    """Radial convex solution of ``det D²u = ρ(|x|)`` in the plane, by quadrature.

    ``u_r² = 2∫_0^r tρ(t) dt`` and ``u(r) = -∫_r^R u_r``.
    """

    def slope(t: float) -> float:
        mass, _ = quad(lambda s: s * rho(s), 0.0, t, epsabs=1e-14, epsrel=1e-13)
        return np.sqrt(2.0 * mass)

    values = [-quad(slope, float(x), radius, epsabs=1e-13, epsrel=1e-12)[0] for x in np.ravel(r)]
    return np.reshape(values, np.shape(r))
