from functools import lru_cache
from itertools import combinations
from typing import NamedTuple

import numpy as np

from ..constants import OperatorKind
from ..errors import ArgumentError, ConeViolation
from ..objects.operator import OperatorSpec

__all__ = (
    "Evaluation",
    "elementary",
    "sigma",
    "in_cone",
    "f_eval",
    "f_gradient",
    "cone_margin",
    "measure_gamma",
    "monge_ampere",
    "hessian",
    "pma",
    "operator_spec",
)

GAMMA_SAFETY = 0.9


class Evaluation(NamedTuple):
    value: np.ndarray
    member: np.ndarray


def elementary(lam: np.ndarray) -> np.ndarray:
    """All elementary symmetric polynomials ``σ_0..σ_n`` along the last axis."""

    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    E = np.zeros(lam.shape[:-1] + (n + 1,))
    E[..., 0] = 1.0
    for i in range(n):
        E[..., 1 : i + 2] = E[..., 1 : i + 2] + lam[..., i, None] * E[..., 0 : i + 1]
    return E


def sigma(lam: np.ndarray, j: int) -> np.ndarray:
    return elementary(lam)[..., j]


@lru_cache(maxsize=None)
def _multi_indices(n: int, p: int) -> np.ndarray:
    return np.array(list(combinations(range(n), p)), dtype=int)


def _partial_sums(lam: np.ndarray, p: int) -> np.ndarray:
    return lam[..., _multi_indices(lam.shape[-1], p)].sum(axis=-1)


def in_cone(spec: OperatorSpec, lam: np.ndarray) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    if spec.kind is OperatorKind.MONGE_AMPERE:
        return np.all(lam > 0, axis=-1)
    if spec.kind is OperatorKind.HESSIAN:
        return np.all(elementary(lam)[..., 1 : spec.degree + 1] > 0, axis=-1)
    smallest = np.sort(lam, axis=-1)[..., : spec.degree].sum(axis=-1)
    return smallest > 0


def _value(spec: OperatorSpec, lam: np.ndarray) -> np.ndarray:
    with np.errstate(invalid="ignore", divide="ignore"):
        if spec.kind is OperatorKind.MONGE_AMPERE:
            return np.exp(np.log(lam).mean(axis=-1))
        if spec.kind is OperatorKind.HESSIAN:
            return sigma(lam, spec.degree) ** (1.0 / spec.degree)
        return np.exp(np.log(_partial_sums(lam, spec.degree)).mean(axis=-1))


def f_eval(spec: OperatorSpec, lam: np.ndarray) -> Evaluation:
    """Value of f where λ ∈ Γ (NaN elsewhere) and the membership flag."""

    lam = np.asarray(lam, dtype=float)
    if lam.shape[-1] != spec.n:
        raise ArgumentError(f"expected {spec.n} eigenvalues, got {lam.shape[-1]}")
    if not np.all(np.isfinite(lam)):
        raise ArgumentError("eigenvalues must be finite")
    member = in_cone(spec, lam)
    value = np.where(member, _value(spec, np.where(member[..., None], lam, 1.0)), np.nan)
    return Evaluation(value, member)


def _gradient(spec: OperatorSpec, lam: np.ndarray, value: np.ndarray) -> np.ndarray:
    n = spec.n
    if spec.kind is OperatorKind.MONGE_AMPERE:
        return value[..., None] / (n * lam)

    if spec.kind is OperatorKind.HESSIAN:
        k = spec.degree
        scale = sigma(lam, k) ** (1.0 / k - 1.0) / k
        reduced = np.stack([sigma(np.delete(lam, j, axis=-1), k - 1) for j in range(n)], axis=-1)
        return scale[..., None] * reduced

    indices = _multi_indices(n, spec.degree)
    inverse = 1.0 / _partial_sums(lam, spec.degree)
    contains = np.zeros((len(indices), n))
    contains[np.arange(len(indices))[:, None], indices] = 1.0
    return (value / len(indices))[..., None] * (inverse @ contains)


def f_gradient(spec: OperatorSpec, lam: np.ndarray):
    """Gradient of f and the structural margin ``∏ ∂f/∂λ_j - γ``.

    :raises ConeViolation: if any λ lies outside Γ.
    """

    value, member = f_eval(spec, lam)
    if not np.all(member):
        raise ConeViolation(f"{np.size(member) - np.count_nonzero(member)} point(s) outside the cone of {spec.label}")
    lam = np.asarray(lam, dtype=float)
    grad = _gradient(spec, lam, value)
    return grad, np.prod(grad, axis=-1) - spec.gamma


def cone_margin(spec: OperatorSpec, lam: np.ndarray) -> np.ndarray:
    """Largest t with ``λ - t·𝟙 ∈ Γ``; positive exactly on the open cone."""

    lam = np.asarray(lam, dtype=float)
    if spec.kind is OperatorKind.MONGE_AMPERE:
        return lam.min(axis=-1)
    if spec.kind is OperatorKind.PMA:
        return np.sort(lam, axis=-1)[..., : spec.degree].sum(axis=-1) / spec.degree

    low = lam.min(axis=-1) - 1.0
    high = lam.mean(axis=-1)
    for _ in range(64):
        mid = 0.5 * (low + high)
        inside = in_cone(spec, lam - mid[..., None])
        low = np.where(inside, mid, low)
        high = np.where(inside, high, mid)
    return low


@lru_cache(maxsize=None)
def measure_gamma(kind: OperatorKind, n: int, degree: int, samples: int = 4096, seed: int = 0) -> float:
    """Lower bound for ``∏ ∂f/∂λ_j`` over a seeded sample of the cone.

    The sample always contains the diagonal point 𝟙; the returned value is
    the sample minimum times a 10% safety factor.
    """

    kind = OperatorKind(kind)
    if kind is OperatorKind.MONGE_AMPERE:
        return float(n ** (-n))

    probe = OperatorSpec(kind, n, degree, gamma=1.0)
    rng = np.random.default_rng(seed)
    scales = np.logspace(-2, 1, samples)[:, None]
    points = np.vstack([np.ones((1, n)), 1.0 + scales * rng.standard_normal((samples, n))])
    points = points[in_cone(probe, points)]
    points = points / np.linalg.norm(points, axis=-1, keepdims=True)

    grad, _ = f_gradient(probe, points)
    return float(GAMMA_SAFETY * np.prod(grad, axis=-1).min())


def monge_ampere(n: int) -> OperatorSpec:
    return OperatorSpec(OperatorKind.MONGE_AMPERE, n, n, measure_gamma(OperatorKind.MONGE_AMPERE, n, n))


def hessian(n: int, k: int) -> OperatorSpec:
    if not 1 <= k <= n:
        raise ArgumentError(f"sigma_k needs 1 <= k <= n, got k={k}, n={n}")
    return OperatorSpec(OperatorKind.HESSIAN, n, k, measure_gamma(OperatorKind.HESSIAN, n, k))


def pma(n: int, p: int) -> OperatorSpec:
    if not 1 <= p <= n:
        raise ArgumentError(f"p-MA needs 1 <= p <= n, got p={p}, n={n}")
    return OperatorSpec(OperatorKind.PMA, n, p, measure_gamma(OperatorKind.PMA, n, p))


def operator_spec(kind, n: int, degree: int = None) -> OperatorSpec:
    kind = OperatorKind(kind)
    if kind is OperatorKind.MONGE_AMPERE:
        return monge_ampere(n)
    if degree is None:
        raise ArgumentError(f"{kind.value} needs a degree")
    if kind is OperatorKind.HESSIAN:
        return hessian(n, degree)
    return pma(n, degree)

