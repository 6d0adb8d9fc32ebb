from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from ..errors import ArgumentError, DomainMismatch
from .grid import BallMesh, TorusGrid

Domain = Union[TorusGrid, BallMesh]


def _frozen(values: np.ndarray, dtype=float) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class ScalarField:
    """A real function sampled at every node of a torus grid or ball mesh."""

    grid: Domain
    values: np.ndarray

    def __post_init__(self) -> None:
        values = _frozen(self.values)
        if values.shape != self.grid.shape:
            raise ArgumentError(f"field shape {values.shape} does not match grid shape {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise ArgumentError("field values must be finite at every node")
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: Domain) -> "ScalarField":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def constant(cls, grid: Domain, value: float) -> "ScalarField":
        return cls(grid, np.full(grid.shape, float(value)))

    @property
    def on_torus(self) -> bool:
        return isinstance(self.grid, TorusGrid)

    @property
    def is_normalized(self) -> bool:
        """Whether the maximum over nodes is exactly zero."""

        return float(self.values.max()) == 0.0

    def require_torus(self) -> TorusGrid:
        if not isinstance(self.grid, TorusGrid):
            raise DomainMismatch("operation needs a field on a periodic torus grid")
        return self.grid

    def max_normalized(self) -> "ScalarField":
        return ScalarField(self.grid, self.values - self.values.max())

    def translated(self, shift) -> "ScalarField":
        """Periodic translation by whole nodes along each axis."""

        grid = self.require_torus()
        return ScalarField(grid, np.roll(self.values, shift, axis=tuple(range(grid.m))))

    def mean(self) -> float:
        if self.on_torus:
            return float(self.values.mean())
        weights = self.grid.weights
        return float((weights * self.values).sum() / weights.sum())

    def map(self, fn) -> "ScalarField":
        return ScalarField(self.grid, fn(self.values))

    def __neg__(self) -> "ScalarField":
        return ScalarField(self.grid, -self.values)

    def __add__(self, other: Union["ScalarField", float]) -> "ScalarField":
        return ScalarField(self.grid, self.values + _values(other))

    def __sub__(self, other: Union["ScalarField", float]) -> "ScalarField":
        return ScalarField(self.grid, self.values - _values(other))

    def __mul__(self, other: Union["ScalarField", float]) -> "ScalarField":
        return ScalarField(self.grid, self.values * _values(other))

    __radd__ = __add__
    __rmul__ = __mul__


def _values(other: Union[ScalarField, float]):
    if isinstance(other, ScalarField):
        return other.values
    return other


@dataclass(frozen=True, eq=False)
class HermitianField:
    """Per-node n×n Hermitian matrices on a torus grid."""

    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = _frozen(self.values, dtype=complex)
        n = self.grid.n
        if values.shape != self.grid.shape + (n, n):
            raise ArgumentError(f"matrix field shape {values.shape} does not match grid and dimension {n}")
        object.__setattr__(self, "values", values)

    @classmethod
    def identity(cls, grid: TorusGrid) -> "HermitianField":
        return cls(grid, np.broadcast_to(np.eye(grid.n), grid.shape + (grid.n, grid.n)))

    def plus_identity(self) -> "HermitianField":
        return HermitianField(self.grid, self.values + np.eye(self.grid.n))

    def symmetry_defect(self) -> float:
        """Largest ``|H - H^*|`` entry, relative to the largest entry."""

        defect = np.abs(self.values - np.conj(np.swapaxes(self.values, -1, -2))).max()
        scale = max(1.0, float(np.abs(self.values).max()))
        return float(defect / scale)


@dataclass(frozen=True, eq=False)
class MetricField:
    """A Kähler metric in the flat chart: one positive Hermitian matrix per node."""

    grid: TorusGrid
    values: np.ndarray
    label: Optional[str] = field(default=None)

    def __post_init__(self) -> None:
        values = _frozen(self.values, dtype=complex)
        n = self.grid.n
        if values.shape != self.grid.shape + (n, n):
            raise ArgumentError(f"metric shape {values.shape} does not match grid and dimension {n}")
        values = 0.5 * (values + np.conj(np.swapaxes(values, -1, -2)))
        if np.linalg.eigvalsh(values).min() <= 0:
            raise ArgumentError("metric must be positive-definite at every node")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def flat(cls, grid: TorusGrid) -> "MetricField":
        return cls(grid, np.broadcast_to(np.eye(grid.n), grid.shape + (grid.n, grid.n)), label="flat")

    @classmethod
    def conformal(cls, grid: TorusGrid, factor: np.ndarray, label: Optional[str] = None) -> "MetricField":
        """The metric ``factor · I`` for a positive node function ``factor``."""

        return cls(grid, factor[..., None, None] * np.eye(grid.n), label=label)

    def scaled(self, c: float) -> "MetricField":
        return MetricField(self.grid, c * self.values, label=f"{self.label}*{c:g}" if self.label else None)

    def real_form(self) -> np.ndarray:
        """The real m×m symmetric metric, shape ``grid.shape + (m, m)``.

        For ``v = a + ib`` the real inner product is ``Re(v^* H v)``, which in
        the interleaved basis (x_1, y_1, x_2, y_2, ...) reads
        ``[[Re H, -Im H], [Im H, Re H]]`` blockwise.
        """

        H = self.values
        n = self.grid.n
        G = np.empty(self.grid.shape + (2 * n, 2 * n))
        G[..., 0::2, 0::2] = H.real
        G[..., 1::2, 1::2] = H.real
        G[..., 0::2, 1::2] = -H.imag
        G[..., 1::2, 0::2] = H.imag
        return G

    @property
    def density(self) -> np.ndarray:
        """Volume density ``det ω`` relative to the background."""

        return np.real(np.linalg.det(self.values))

    @property
    def total_volume(self) -> float:
        return float(self.density.sum() * self.grid.cell_volume)
