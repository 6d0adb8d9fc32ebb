from logging import getLogger
from typing import Mapping, Optional, Sequence, Union

import numpy as np
from scipy.special import logsumexp

from ..constants import PHI_TOL, ComparisonVariant, GrowthVariant
from ..core.calculus import relative_eigenvalues, relative_endomorphism
from ..errors import ArgumentError, PremiseViolation
from ..internal import spectral
from ..objects.fields import ScalarField
from ..objects.reports import (
    ComparisonConstants,
    ControlReport,
    IntegrabilityReport,
    LinftyBound,
    PhiReport,
    SublevelProfile,
)
from .degiorgi import vanishing_bound, verify_growth
from .functionals import growth_constant

__all__ = (
    "choose_constants",
    "build_phi",
    "verify_nonpositive",
    "critical_scale",
    "epsilon_control",
    "measured_lemma_constant",
    "linfty_from_profile",
    "exponential_integrability",
)

logger = getLogger("auxma.estimates")

Shift = Union[float, np.ndarray, ScalarField]


def _positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise ArgumentError(f"{name} must be positive, got {value}")


def choose_constants(
    variant: ComparisonVariant,
    a: float,
    n: int,
    gamma: float,
    A: float,
    extras: Optional[Mapping[str, float]] = None,
) -> ComparisonConstants:
    """The constants ``b``, ``ε`` and ``Λ`` of a comparison function.

    ``kahler_lemma3``::

        b = n/(n+a),  ε = (n b γ^{1/n})^{-n/(a+n)} A^{1/(a+n)},  Λ^{1-b} = ε b

    ``energy_section4`` gives the same numbers, evaluated through the
    closed form ``Λ = b^{1/(1-b)} (γ^{1/(n+a)}(nb)^{n/(n+a)})^{-1/(1-b)} A^{1/a}``.

    ``symplectic_section12`` needs ``extras = {"C_J": ..., "C_2": ...}``::

        b = 2n/(2n+1),  Λ = (2n/(1+2n)) (10 C_J C_2)^{2n+1} A,
        ε = ((2n+1)/(2n))^{2n/(2n+1)} A^{1/(2n+1)}
    """

    variant = ComparisonVariant(variant)
    if n < 1:
        raise ArgumentError(f"n must be a positive integer, got {n}")
    _positive(a=a, gamma=gamma, A=A)
    extras = dict(extras or {})

    if variant is ComparisonVariant.KAHLER_LEMMA3:
        b = n / (n + a)
        epsilon = (n * b * gamma ** (1.0 / n)) ** (-n / (a + n)) * A ** (1.0 / (a + n))
        Lambda = (epsilon * b) ** (1.0 / (1.0 - b))
    elif variant is ComparisonVariant.ENERGY_SECTION4:
        b = n / (n + a)
        scale = gamma ** (1.0 / (n + a)) * (n * b) ** (n / (n + a))
        epsilon = A ** (1.0 / (n + a)) / scale
        Lambda = b ** (1.0 / (1.0 - b)) / scale ** (1.0 / (1.0 - b)) * A ** (1.0 / a)
    else:
        missing = {"C_J", "C_2"} - extras.keys()
        if missing:
            raise ArgumentError(f"symplectic constants need extras {sorted(missing)}")
        C_J, C_2 = float(extras["C_J"]), float(extras["C_2"])
        if C_J < 0:
            raise ArgumentError(f"C_J must be nonnegative, got {C_J}")
        _positive(C_2=C_2)
        b = 2 * n / (2 * n + 1)
        Lambda = (2 * n / (1 + 2 * n)) * (10 * C_J * C_2) ** (2 * n + 1) * A
        epsilon = ((2 * n + 1) / (2 * n)) ** (2 * n / (2 * n + 1)) * A ** (1.0 / (2 * n + 1))

    return ComparisonConstants(
        variant=variant,
        a=float(a),
        n=n,
        gamma=float(gamma),
        A=float(A),
        b=b,
        epsilon=float(epsilon),
        Lambda=float(Lambda),
        extras=extras,
    )


def _shift_values(shift: Shift, phi: ScalarField) -> np.ndarray:
    if isinstance(shift, ScalarField):
        if shift.grid != phi.grid:
            raise ArgumentError("shift field lives on a different grid")
        return shift.values
    return np.broadcast_to(np.asarray(shift, dtype=float), phi.grid.shape)


def _base(psi: ScalarField, q: np.ndarray, consts: ComparisonConstants) -> np.ndarray:
    # Zero is allowed: with Λ = 0 the base vanishes where ψ does.
    base = -psi.values + q + consts.Lambda
    if np.any(base < 0):
        node = tuple(int(i) for i in np.unravel_index(int(np.argmin(base)), base.shape))
        raise ArgumentError(f"-ψ + q + Λ = {base[node]:.6g} is negative at node {node}")
    return base


def build_phi(
    phi: ScalarField,
    psi: ScalarField,
    consts: ComparisonConstants,
    q: Shift = 0.0,
    q_tilde: Shift = 0.0,
    s: float = 0.0,
) -> ScalarField:
    """``Φ = -ε(-ψ + q + Λ)^b - φ + q̃ - s``.

    The symplectic shape ``-ε(-ψ + Λ)^b - u_s`` is obtained by passing
    ``u_s`` as ``phi`` with ``q = q̃ = s = 0``.
    """

    if phi.grid != psi.grid:
        raise ArgumentError("φ and ψ must share a grid")
    q_values = _shift_values(q, phi)
    base = _base(psi, q_values, consts)
    values = -consts.epsilon * base**consts.b - phi.values + _shift_values(q_tilde, phi) - s
    return ScalarField(phi.grid, values)


def _diagnostics(node, phi: Optional[ScalarField], psi: Optional[ScalarField]) -> dict:
    diagnostics = {}
    if phi is not None and phi.on_torus:
        lam = relative_eigenvalues(relative_endomorphism(phi))
        diagnostics["lambda"] = lam[node]
    if psi is not None and psi.on_torus:
        grid = psi.grid
        gradient = [spectral.derivative(psi.values, grid, (axis,))[node] for axis in range(grid.m)]
        diagnostics["grad_psi"] = np.asarray(gradient)
        diagnostics["psi"] = float(psi.values[node])
    if phi is not None:
        diagnostics["phi"] = float(phi.values[node])
    return diagnostics


def verify_nonpositive(
    Phi: ScalarField,
    tol: float = PHI_TOL,
    phi: Optional[ScalarField] = None,
    psi: Optional[ScalarField] = None,
) -> PhiReport:
    """Whether ``max Φ ≤ tol · max(|φ|, |ψ|, 1)``.

    A failed check is returned, not raised; the argmax node then carries the
    eigenvalues of ``I + Hess_c φ`` and the gradient of ψ when those fields
    are supplied on the torus.
    """

    scale = 1.0
    for field in (phi, psi):
        if field is not None:
            scale = max(scale, float(np.abs(field.values).max()))

    node = tuple(int(i) for i in np.unravel_index(int(np.argmax(Phi.values)), Phi.values.shape))
    max_value = float(Phi.values[node])
    passed = max_value <= tol * scale
    diagnostics = {} if passed else _diagnostics(node, phi, psi)
    if not passed:
        logger.info("Φ ≤ 0 fails: max %.6g at node %s (tolerance %.3g)", max_value, node, tol * scale)
    return PhiReport(
        max_value=max_value,
        argmax=node,
        slack_scale=scale,
        tol=tol,
        passed=passed,
        diagnostics=diagnostics,
    )


def critical_scale(
    phi: ScalarField,
    psi: ScalarField,
    consts: ComparisonConstants,
    q: Shift = 0.0,
    q_tilde: Shift = 0.0,
    s: float = 0.0,
) -> float:
    """Smallest multiplier ``θ ≥ 0`` of ε for which ``Φ ≤ 0`` holds node-wise.

    ``Φ`` built with ``θ·ε`` is nonpositive exactly when ``θ`` is at least
    ``max (-φ + q̃ - s) / (ε(-ψ + q + Λ)^b)``.
    """

    scale = consts.epsilon * _base(psi, _shift_values(q, phi), consts) ** consts.b
    excess = -phi.values + _shift_values(q_tilde, phi) - s
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(scale > 0, excess / scale, np.where(excess > 0, np.inf, 0.0))
    return max(float(ratio.max()), 0.0)


def epsilon_control(
    phi: ScalarField,
    psi: ScalarField,
    consts: ComparisonConstants,
    factor: float = 0.5,
    s: float = 0.0,
    tol: float = PHI_TOL,
) -> ControlReport:
    """Rebuild ``Φ`` with ``factor·ε`` and expect ``Φ ≤ 0`` to fail."""

    if not 0 < factor < 1:
        raise ArgumentError(f"control factor must lie in (0, 1), got {factor}")
    theta = critical_scale(phi, psi, consts, s=s)
    perturbed = verify_nonpositive(build_phi(phi, psi, consts.with_epsilon(factor * consts.epsilon), s=s), tol=tol)
    applicable = theta > 0
    passed = applicable and not perturbed.passed
    if applicable and not passed:
        logger.warning("ε·%g leaves Φ ≤ 0 intact at s=%g (critical scale %.4g)", factor, s, theta)
    return ControlReport(
        factor=float(factor), critical_scale=theta, perturbed=perturbed, applicable=applicable, passed=passed
    )


def measured_lemma_constant(
    phi: ScalarField, psi: ScalarField, consts: ComparisonConstants, s: float = 0.0
) -> float:
    """Smallest ``c`` with ``-φ - s ≤ c A^{1/(a+n)} (-ψ + Λ)^{n/(n+a)}`` on the grid."""

    exponent = consts.n / (consts.n + consts.a)
    base = _base(psi, np.zeros(psi.grid.shape), consts)
    scale = consts.A ** (1.0 / (consts.a + consts.n)) * base**exponent
    excess = -phi.values - s
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(scale > 0, excess / scale, np.where(excess > 0, np.inf, 0.0))
    return max(float(ratio.max()), 0.0)


def linfty_from_profile(
    profile: SublevelProfile,
    delta0: float,
    B0: Optional[float] = None,
    phi: Optional[ScalarField] = None,
    tol: float = PHI_TOL,
) -> LinftyBound:
    """``S₀`` from the halving iteration and the check ``min φ ≥ -S₀``.

    Without ``B0`` the measured constant ``max_s A_s/φ(s)^{1+δ₀}`` of
    :func:`growth_constant` is used. Since ``r φ(s + r) ≤ A_s``, it also
    bounds the decreasing growth pairs. The smallest constant passing the
    growth check is reported as ``minimal_B0`` and never used for ``S₀``.

    :raises PremiseViolation: if the profile does not vanish on its samples,
        or a supplied ``B0`` fails the decreasing growth check.
    """

    if profile.phi_values[-1] > 0:
        raise PremiseViolation("profile does not vanish on its sample grid; no finite growth constant")

    measured = B0 is None
    if measured:
        B0 = growth_constant(profile, delta0)
    certificate = verify_growth(profile, GrowthVariant.DECREASING, B0, delta0)
    if not measured and not certificate.passed:
        raise PremiseViolation(
            f"growth premise fails with B₀={B0:.6g}: pair {certificate.worst_pair} needs {certificate.minimal_constant:.6g}"
        )

    phi0 = float(profile.phi_values[0])
    S0 = float(profile.s_samples[0]) + vanishing_bound(B0, delta0, phi0)

    observed = None
    passed = True
    if phi is not None:
        observed = float(-phi.values.min())
        passed = observed <= S0 + tol * max(1.0, S0)
    logger.debug(
        "L∞ bound S₀=%.6g from B₀=%.6g (minimal %.6g), φ(0)=%.6g", S0, B0, certificate.minimal_constant, phi0
    )
    return LinftyBound(
        S0=S0,
        B0=float(B0),
        delta0=float(delta0),
        phi0=phi0,
        observed_sup=observed,
        passed=passed,
        minimal_B0=certificate.minimal_constant,
        measured_B0=measured,
    )


def _log_integral(psi: ScalarField, alpha: float) -> float:
    if psi.on_torus:
        weights = np.full(psi.grid.shape, psi.grid.cell_volume)
    else:
        weights = psi.grid.weights
    return float(logsumexp(-alpha * psi.values, b=weights))


def exponential_integrability(
    family: Sequence[ScalarField],
    alpha_grid: Sequence[float],
    ceiling: float = 1e12,
) -> IntegrabilityReport:
    """Measured ``sup_ψ ∫e^{-αψ}`` across a family of potentials.

    The α-proxy is the largest α of the grid whose supremum stays below
    ``ceiling``; integrals are accumulated in log space.
    """

    if not family:
        raise ArgumentError("exponential_integrability needs at least one potential")
    alphas = np.sort(np.asarray(alpha_grid, dtype=float))
    if alphas.size == 0 or np.any(alphas < 0):
        raise ArgumentError("α grid must be nonempty and nonnegative")
    for psi in family:
        if psi.values.max() > 1e-12:
            raise ArgumentError("potentials must be max-normalized to be nonpositive")

    logs = np.array([max(_log_integral(psi, alpha) for psi in family) for alpha in alphas])
    below = alphas[logs <= np.log(ceiling)]
    proxy = float(below.max()) if below.size else 0.0
    return IntegrabilityReport(
        alphas=alphas,
        log_integrals=logs,
        alpha_proxy=proxy,
        ceiling=ceiling,
        monotone=bool(np.all(np.diff(logs) >= -1e-12)),
    )
