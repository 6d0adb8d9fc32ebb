from logging import getLogger
from typing import Optional, Sequence, Union

import numpy as np

from ..constants import MeasureKind
from ..errors import ArgumentError
from ..objects.fields import ScalarField
from ..objects.reports import EntropyReport, SublevelProfile, TrudingerReport, YoungSplit

__all__ = (
    "tau",
    "default_s_grid",
    "build_profile",
    "growth_constant",
    "entropy_report",
    "trudinger_exponent",
    "trudinger_energy_check",
    "young_split",
    "young_constant",
)

logger = getLogger("auxma.estimates")

ArrayLike = Union[float, np.ndarray]
PROFILE_SAMPLES = 64


def tau(ell: int, t: ArrayLike) -> ArrayLike:
    """Smooth positive approximation ``τ_ℓ(t) = (t + √(t² + ℓ^{-2}))/2`` of ``max(t, 0)``."""

    if ell < 1:
        raise ArgumentError(f"tau needs ell >= 1, got {ell}")
    t = np.asarray(t, dtype=float)
    eps2 = float(ell) ** -2
    root = np.sqrt(t * t + eps2)
    # For t < 0 the direct form cancels; use the conjugate expression.
    with np.errstate(divide="ignore"):
        value = np.where(t >= 0, 0.5 * (t + root), 0.5 * eps2 / (root - np.minimum(t, 0.0)))
    return value if value.ndim else float(value)


def _weights(field: ScalarField, density: Optional[np.ndarray]) -> np.ndarray:
    grid = field.grid
    if field.on_torus:
        cell = np.full(grid.shape, grid.cell_volume)
    else:
        cell = np.asarray(grid.weights)
    if density is None:
        return cell
    density = np.asarray(density, dtype=float)
    if np.any(density < 0):
        raise ArgumentError("profile density must be nonnegative")
    return cell * density


def default_s_grid(phi: ScalarField, samples: int = PROFILE_SAMPLES) -> np.ndarray:
    """``samples`` uniform points from 0 to ``max(-φ)``."""

    top = max(float(-phi.values.min()), 0.0)
    return np.linspace(0.0, top, samples)


def build_profile(
    phi: ScalarField,
    density: Optional[np.ndarray] = None,
    s_grid: Optional[Sequence[float]] = None,
    volume: Optional[float] = None,
    measure_kind: MeasureKind = MeasureKind.DENSITY,
) -> SublevelProfile:
    """Sublevel masses ``φ(s)`` and excess integrals ``A_s`` of a field.

    ``φ(s) = (1/V) Σ_{φ<-s} density·vol`` and
    ``A_s = (1/V) Σ_{φ<-s} (-φ - s)·density·vol``.
    """

    if s_grid is None:
        s_grid = default_s_grid(phi)
    s = np.asarray(s_grid, dtype=float)
    if s.size == 0:
        raise ArgumentError("s_grid must not be empty")
    if np.any(np.diff(s) < 0):
        raise ArgumentError("s_grid must be ascending")

    weights = _weights(phi, density).ravel()
    values = phi.values.ravel()
    if volume is None:
        volume = float(phi.grid.volume) if phi.on_torus else float(phi.grid.weights.sum())

    below = values[None, :] < -s[:, None]
    excess = np.where(below, -values[None, :] - s[:, None], 0.0)
    phi_values = (below * weights).sum(axis=1) / volume
    A_values = (excess * weights).sum(axis=1) / volume
    return SublevelProfile(s_samples=s, phi_values=phi_values, A_values=A_values, measure_kind=measure_kind)


def growth_constant(profile: SublevelProfile, delta0: float) -> float:
    """Smallest ``B₀`` with ``A_s ≤ B₀ φ(s)^{1+δ₀}`` at every sample."""

    mask = profile.phi_values > 0
    if not np.any(mask):
        return 0.0
    ratios = profile.A_values[mask] / profile.phi_values[mask] ** (1.0 + delta0)
    return float(ratios.max())


def entropy_report(
    F: ScalarField,
    p: float,
    n: int,
    c_omega: float = 1.0,
    phi: Optional[ScalarField] = None,
) -> EntropyReport:
    """Entropies of the density ``e^{nF}`` on the flat torus.

    * ``ent_p``: ``mean e^{nF} (log(1 + e^{nF}))^p``, the Orlicz value.
    * ``ent_p_moment``: ``mean e^{nF} |F|^p``.
    * ``nash_p``: ``mean |nF|^p e^{nF}``, the Nash entropy of the relative
      volume density.

    The energy ``E = mean (-φ) c^n e^{nF}`` is filled in when ``φ`` is given.
    """

    grid = F.require_torus()
    if p < 0:
        raise ArgumentError("entropy exponent must be nonnegative")
    nF = n * F.values
    density = np.exp(nF)
    ent_p = float(np.mean(density * np.log1p(density) ** p))
    moment = float(np.mean(density * np.abs(F.values) ** p))
    nash = float(np.mean(np.abs(nF) ** p * density))

    energy = None
    if phi is not None:
        if phi.grid != grid:
            raise ArgumentError("potential and density must share a grid")
        energy = float(np.mean(-phi.values * c_omega**n * density))

    return EntropyReport(
        ent_p=ent_p,
        ent_p_moment=moment,
        nash_p=nash,
        energy=energy,
        c_omega=c_omega,
        V_omega=grid.volume * c_omega**n,
        p=p,
        n=n,
    )


def trudinger_exponent(n: int, p: float) -> float:
    if not 0 < p < n:
        raise ArgumentError(f"the Trudinger exponent needs 0 < p < n, got p={p}, n={n}")
    return n / (n - p)


def trudinger_energy_check(
    phi: ScalarField,
    F: ScalarField,
    p: float,
    q: Optional[float] = None,
    alpha: float = 1.0,
) -> TrudingerReport:
    """``(∫e^{α(-φ)^q}, ∫(-φ)^{pq} e^{nF})`` over the unit torus."""

    grid = phi.require_torus()
    if q is None:
        q = trudinger_exponent(grid.n, p)
    depth = np.maximum(-phi.values, 0.0)
    exponential = float(np.mean(np.exp(alpha * depth**q)))
    energy = float(np.mean(depth ** (p * q) * np.exp(grid.n * F.values)))
    return TrudingerReport(exponential_integral=exponential, energy_integral=energy, p=p, q=q, alpha=alpha)


def young_constant(p: float) -> float:
    """``c_p`` with ``log^p(1+e^x) ≤ c_p(1+|x|^p)`` and ``v^p e^v ≤ c_p e^{2v}``."""

    first = 2.0 ** max(p - 1.0, 0.0)
    second = p**p * np.exp(-p) if p > 0 else 1.0
    return float(max(first, second, 1.0))


def young_split(v: ScalarField, F: ScalarField, p: float) -> YoungSplit:
    """Pointwise reverse-Hölder split of ``e^{nF} v^p``.

    Young's inequality with ``η(u) = log^p(1 + u)`` gives::

        e^{nF} v^p ≤ e^{nF} η(e^{nF}) + v^p η^{-1}(v^p)
                   ≤ c_p {e^{nF}(1 + |nF|^p) + e^{2v}}
    """

    if np.any(v.values < 0):
        raise ArgumentError("young_split needs v >= 0")
    if p <= 0:
        raise ArgumentError("young_split needs p > 0")
    n = F.grid.n
    nF = n * F.values
    U = np.exp(nF)
    V = v.values**p

    lhs = U * V
    middle = U * np.log1p(U) ** p + V * np.expm1(v.values)
    c_p = young_constant(p)
    rhs = c_p * (U * (1.0 + np.abs(nF) ** p) + np.exp(2.0 * v.values))

    slack = 1e-12 * np.maximum(1.0, rhs)
    first = middle - lhs
    second = rhs - middle
    return YoungSplit(
        lhs=lhs,
        middle=middle,
        rhs=rhs,
        c_p=c_p,
        passed=bool(np.all(first >= -slack) and np.all(second >= -slack)),
        worst_margin=float(min(first.min(), second.min())),
    )
