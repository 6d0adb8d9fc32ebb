"""Quantitative De Giorgi lemmas for sampled profiles.

A sampled profile ``φ_0, ..., φ_K`` at ``s_0 < ... < s_K`` is read as a step
function. Decreasing profiles are right-continuous, ``φ(s) = φ_j`` on
``[s_j, s_{j+1})`` with ``s_{K+1} = ∞``. Increasing profiles are
left-continuous, ``φ(s) = φ_j`` on ``(s_{j-1}, s_j]`` with ``s_{-1} = 0``.
Under that reading the growth inequality holds for every real pair exactly
when it holds at the interval endpoints, which is what ``semantics="step"``
checks. ``semantics="samples"`` only looks at pairs of samples.
"""

from logging import getLogger
from typing import Optional, Tuple

import numpy as np

from ..constants import GrowthVariant
from ..errors import ArgumentError, InvariantViolation
from ..objects.reports import GrowthCertificate, SublevelProfile

__all__ = (
    "verify_growth",
    "vanishing_bound",
    "lower_bound",
    "vanishing_point",
    "SEMANTICS",
)

logger = getLogger("auxma.estimates")

SEMANTICS = ("step", "samples")


def _check_monotone(values: np.ndarray, variant: GrowthVariant) -> None:
    steps = np.diff(values)
    if variant is GrowthVariant.DECREASING and np.any(steps > 0):
        bad = int(np.argmax(steps > 0))
        raise InvariantViolation(f"profile increases between samples {bad} and {bad + 1}")
    if variant is GrowthVariant.INCREASING and np.any(steps < 0):
        bad = int(np.argmax(steps < 0))
        raise InvariantViolation(f"profile decreases between samples {bad} and {bad + 1}")


def _pair_terms(
    s: np.ndarray, phi: np.ndarray, variant: GrowthVariant, semantics: str
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Left sides, the bases ``φ`` raised on the right, and the pair coordinates.

    Entry ``[i, j]`` of each array describes one pair; masked entries are
    excluded from the check.
    """

    K = s.size
    i, j = np.meshgrid(np.arange(K), np.arange(K), indexing="ij")

    if variant is GrowthVariant.DECREASING:
        # r·φ(s + r) ≤ C·φ(s)^{1+δ}; base index i, shifted index j ≥ i.
        if semantics == "step":
            upper = np.append(s[1:], np.inf)
            mask = j >= i
            gap = upper[j] - s[i]
        else:
            mask = j > i
            gap = s[j] - s[i]
        with np.errstate(invalid="ignore"):
            lhs = np.where(phi[j] > 0, gap * phi[j], 0.0)
        base = phi[i]
        pair = (s[i], gap)
    else:
        # t·φ(s - t) ≤ C·φ(s)^{1+δ}; base index i, shifted index j ≤ i.
        if semantics == "step":
            lower = np.concatenate([[0.0], s[:-1]])
            mask = j <= i
            gap = s[i] - lower[j]
        else:
            mask = j < i
            gap = s[i] - s[j]
        lhs = gap * phi[j]
        base = phi[i]
        pair = (s[i], gap)

    return np.where(mask, lhs, 0.0), np.broadcast_to(base, lhs.shape), mask, pair


def verify_growth(
    profile: SublevelProfile,
    variant: GrowthVariant,
    C0: float,
    delta0: float,
    semantics: str = "step",
) -> GrowthCertificate:
    """Check the De Giorgi growth premise over every pair of the profile.

    Decreasing: ``r φ(s + r) ≤ C₀ φ(s)^{1+δ₀}``.
    Increasing: ``t φ(s - t) ≤ C₀ φ(s)^{1+δ₀}``.

    The certificate carries the smallest constant that would pass. Failures
    are reported through ``passed``.

    :raises InvariantViolation: if the profile is not monotone for ``variant``.
    """

    variant = GrowthVariant(variant)
    if semantics not in SEMANTICS:
        raise ArgumentError(f"unknown semantics {semantics!r}; expected one of {SEMANTICS}")
    if delta0 <= 0:
        raise ArgumentError("δ₀ must be positive")
    if C0 < 0:
        raise ArgumentError("C₀ must be nonnegative")

    s = np.asarray(profile.s_samples, dtype=float)
    phi = np.asarray(profile.phi_values, dtype=float)
    if s.size == 0:
        raise ArgumentError("profile has no samples")
    _check_monotone(phi, variant)

    lhs, base, mask, (at_s, gap) = _pair_terms(s, phi, variant, semantics)
    active = mask & (lhs > 0)
    powered = base ** (1.0 + delta0)

    with np.errstate(divide="ignore", invalid="ignore"):
        needed = np.where(active, lhs / powered, 0.0)
        needed = np.where(active & (powered == 0), np.inf, needed)
        ratio = np.where(active, lhs / (C0 * powered), 0.0)
        ratio = np.where(active & (C0 * powered == 0), np.inf, ratio)

    minimal = float(needed.max()) if needed.size else 0.0
    worst = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    worst_ratio = float(ratio[worst])
    passed = bool(worst_ratio <= 1.0 + 1e-12)
    logger.debug(
        "%s growth (%s): minimal constant %.6g against C₀=%.6g", variant.value, semantics, minimal, C0
    )

    return GrowthCertificate(
        variant=variant,
        C0=float(C0),
        delta0=float(delta0),
        worst_pair=(float(at_s[worst]), float(gap[worst])),
        worst_ratio=worst_ratio,
        minimal_constant=minimal,
        passed=passed,
        semantics=semantics,
    )


def vanishing_bound(B0: float, delta0: float, phi0: float) -> float:
    """``S₀ = 2B₀φ₀^{δ₀}/(1 - 2^{-δ₀})``.

    Halving iteration: ``s_{j+1} = s_j + 2B₀φ(s_j)^{δ₀}`` forces
    ``φ(s_{j+1}) ≤ φ(s_j)/2``; the steps sum to at most ``S₀``.
    """

    if delta0 <= 0:
        raise ArgumentError("δ₀ must be positive")
    if B0 < 0 or phi0 < 0:
        raise ArgumentError("B₀ and φ₀ must be nonnegative")
    if phi0 == 0:
        return 0.0
    return 2.0 * B0 * phi0**delta0 / (1.0 - 2.0**-delta0)


def lower_bound(C0: float, delta0: float, s0: float) -> float:
    """``c₀ = (s₀(1 - 2^{-δ₀})/(2C₀))^{1/δ₀}``, a floor for ``φ(s₀)``.

    Inverts ``2C₀φ(s₀)^{δ₀}/(1 - 2^{-δ₀}) ≥ s₀``, which any positive
    increasing profile satisfying the growth premise obeys.
    """

    if delta0 <= 0:
        raise ArgumentError("δ₀ must be positive")
    if C0 <= 0 or s0 <= 0:
        raise ArgumentError("C₀ and s₀ must be positive")
    return (s0 * (1.0 - 2.0**-delta0) / (2.0 * C0)) ** (1.0 / delta0)


def vanishing_point(profile: SublevelProfile) -> Optional[float]:
    """First sample where the profile is zero, or ``None``."""

    zero = np.flatnonzero(np.asarray(profile.phi_values) == 0)
    if zero.size == 0:
        return None
    return float(profile.s_samples[zero[0]])
