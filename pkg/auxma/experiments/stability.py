"""Stability of the complex Monge-Ampère equation under perturbation of the right side.

For ``(ω + i∂∂̄u)^n = e^f ω^n`` and ``(ω + i∂∂̄v)^n = e^h ω^n`` with
``∫e^f = ∫e^h = 1`` the gap ``sup|u - v|`` is bounded by
``C ‖e^f - e^h‖_{L¹}^β`` with ``β = (n + 3 + (p - n)/(pn))^{-1}``.
"""

from logging import getLogger
from typing import Iterable, Tuple

import numpy as np
from scipy.special import logsumexp

from ..constants import RESIDUAL_TOL
from ..core.operators import monge_ampere
from ..errors import ArgumentError, PremiseViolation
from ..estimates.functionals import entropy_report
from ..objects.fields import ScalarField
from ..objects.reports import StabilityInstance, StabilitySweep, SweepRow
from ..solvers.cma import solve_cma

__all__ = ("beta_ref", "normalize_log_density", "family", "run_stability", "run_sweep", "SWEEP_EXPONENTS")

logger = getLogger("auxma.experiments")

SWEEP_EXPONENTS = tuple(range(9))
NORMALIZATION_TOL = 1e-10


def beta_ref(n: int, p: float) -> float:
    """``(n + 3 + (p - n)/(pn))^{-1}``, defined for ``p > n``."""

    if n < 1:
        raise ArgumentError(f"n must be a positive integer, got {n}")
    if not p > n:
        raise ArgumentError(f"the stability exponent needs p > n, got p={p}, n={n}")
    return 1.0 / (n + 3 + (p - n) / (p * n))


def normalize_log_density(f: ScalarField) -> ScalarField:
    """Shift ``f`` so that ``mean e^f = 1``."""

    grid = f.require_torus()
    return ScalarField(grid, f.values - (logsumexp(f.values) - np.log(f.values.size)))


def family(f: ScalarField, f_tilde: ScalarField, t: float) -> ScalarField:
    """``h_t = log((1 - t)e^f + t e^{f̃})``; normalised whenever ``f`` and ``f̃`` are."""

    if not 0 <= t <= 1:
        raise ArgumentError(f"family parameter must lie in [0, 1], got {t}")
    if f.grid != f_tilde.grid:
        raise ArgumentError("f and f̃ must share a grid")
    if t == 0:
        return f
    if t == 1:
        return f_tilde
    return ScalarField(f.grid, np.logaddexp(np.log1p(-t) + f.values, np.log(t) + f_tilde.values))


def _admissible(f: ScalarField, p: float, K: float, name: str) -> float:
    grid = f.require_torus()
    mass = float(np.exp(f.values).mean())
    if abs(mass - 1.0) > NORMALIZATION_TOL:
        raise ArgumentError(f"{name} must satisfy mean e^{name} = 1, got {mass:.12g}")
    entropy = entropy_report(ScalarField(grid, f.values / grid.n), p, grid.n).ent_p
    if entropy > K:
        raise PremiseViolation(f"entropy of e^{name} is {entropy:.6g}, above K = {K:.6g}")
    return entropy


def _solve(f: ScalarField, tol: float) -> ScalarField:
    grid = f.require_torus()
    u, _ = solve_cma(grid, monge_ampere(grid.n), f.map(lambda values: np.exp(values / grid.n)), tol=tol)
    return u


def _instance(
    f: ScalarField, h: ScalarField, u: ScalarField, v: ScalarField, p: float, K: float, entropies: Tuple[float, float]
) -> StabilityInstance:
    difference = u.values - v.values
    # Shift v by the midpoint of max(u - v) and -max(v - u).
    shift = 0.5 * (difference.max() - (-difference).max())
    v = v + shift
    difference = u.values - v.values
    return StabilityInstance(
        f=f,
        h=h,
        u=u,
        v=v,
        distance=float(np.abs(np.exp(f.values) - np.exp(h.values)).mean()),
        gap=float(np.abs(difference).max()),
        normalization_defect=float(abs(difference.max() - (-difference).max())),
        entropy_f=entropies[0],
        entropy_h=entropies[1],
        K=float(K),
        beta_ref=beta_ref(f.grid.n, p),
    )


def run_stability(
    f: ScalarField, h: ScalarField, p: float, K: float, tol: float = RESIDUAL_TOL
) -> StabilityInstance:
    """Solve both equations and measure ``sup|u - v|`` against ``‖e^f - e^h‖_{L¹}``.

    :raises ArgumentError: if a density is not normalised.
    :raises PremiseViolation: if an entropy exceeds ``K``.
    """

    if f.grid != h.grid:
        raise ArgumentError("f and h must share a grid")
    beta_ref(f.require_torus().n, p)
    entropies = (_admissible(f, p, K, "f"), _admissible(h, p, K, "h"))
    u = _solve(f, tol)
    v = u if np.array_equal(f.values, h.values) else _solve(h, tol)
    instance = _instance(f, h, u, v, p, K, entropies)
    logger.info("stability: distance %.4e, gap %.4e", instance.distance, instance.gap)
    return instance


def _slope(distances: np.ndarray, gaps: np.ndarray) -> float:
    usable = (distances > 0) & (gaps > 0)
    if usable.sum() < 2:
        return float("nan")
    slope, _ = np.polyfit(np.log(distances[usable]), np.log(gaps[usable]), 1)
    return float(slope)


def run_sweep(
    f: ScalarField,
    f_tilde: ScalarField,
    p: float,
    K: float,
    exponents: Iterable[int] = SWEEP_EXPONENTS,
    tol: float = RESIDUAL_TOL,
) -> StabilitySweep:
    """Gaps along ``h_t`` for ``t = 2^{-j}``.

    The measured ``C`` is the smallest constant with ``gap ≤ C distance^β``
    on every row.
    """

    grid = f.require_torus()
    beta = beta_ref(grid.n, p)
    entropy_f = _admissible(f, p, K, "f")
    u = _solve(f, tol)

    instances = []
    for j in sorted(exponents):
        t = 2.0**-j
        h = family(f, f_tilde, t)
        instance = _instance(f, h, u, _solve(h, tol), p, K, (entropy_f, _admissible(h, p, K, "h")))
        logger.debug("sweep t=%g: distance %.4e, gap %.4e", t, instance.distance, instance.gap)
        instances.append((t, instance))

    distances = np.array([instance.distance for _, instance in instances])
    gaps = np.array([instance.gap for _, instance in instances])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(distances > 0, gaps / distances**beta, 0.0)
    measured = float(ratios.max())

    rows = tuple(
        SweepRow(t=t, distance=instance.distance, gap=instance.gap, C=float(ratio))
        for (t, instance), ratio in zip(instances, ratios)
    )
    # Rows run from t = 1 down, so the gap must not grow.
    monotone = bool(np.all(np.diff(gaps) <= 1e-12 * max(1.0, float(gaps.max()))))
    sweep = StabilitySweep(rows=rows, beta_ref=beta, slope=_slope(distances, gaps), C=measured, monotone=monotone, K=K)
    logger.info("stability sweep: slope %.4f against β = %.4f, C = %.4g", sweep.slope, beta, measured)
    return sweep
