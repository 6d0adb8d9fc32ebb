from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import ArgumentError
from .grid import TorusGrid

__all__ = ("AlmostComplexData", "standard_structure", "standard_form")


def _frozen(values: np.ndarray) -> np.ndarray:
    array = np.array(values, dtype=float, copy=True)
    array.setflags(write=False)
    return array


def standard_structure(n: int) -> np.ndarray:
    """``J`` with ``J ∂_{x_j} = ∂_{y_j}``, as the matrix ``[J_i^j]``."""

    J = np.zeros((2 * n, 2 * n))
    for j in range(n):
        J[2 * j, 2 * j + 1] = 1.0
        J[2 * j + 1, 2 * j] = -1.0
    return J


def standard_form(n: int) -> np.ndarray:
    """``Σ dx_j ∧ dy_j`` as an antisymmetric matrix."""

    return standard_structure(n)


@dataclass(frozen=True, eq=False)
class AlmostComplexData:
    """An almost complex structure with a taming form and a candidate metric.

    ``J[..., i, j] = J_i^j`` so that ``J(∂_i) = J_i^j ∂_j``; the endomorphism
    acting on column vectors is ``Jᵀ``. ``Omega`` and ``g_tilde`` are the
    coefficient matrices of the 2-form and the metric.
    """

    grid: TorusGrid
    J: np.ndarray
    Omega: np.ndarray
    g_tilde: np.ndarray
    label: Optional[str] = field(default=None)

    def __post_init__(self) -> None:
        m = self.grid.m
        expected = self.grid.shape + (m, m)
        for name in ("J", "Omega", "g_tilde"):
            values = np.broadcast_to(np.asarray(getattr(self, name), dtype=float), expected)
            if not np.all(np.isfinite(values)):
                raise ArgumentError(f"{name} must be finite at every node")
            object.__setattr__(self, name, _frozen(values))

    @property
    def g(self) -> np.ndarray:
        """``g(Y, Z) = ½Ω(Y, JZ) + ½Ω(Z, JY)``, i.e. ``½(ΩJᵀ - JΩ)``."""

        JT = np.swapaxes(self.J, -1, -2)
        return 0.5 * (self.Omega @ JT - self.J @ self.Omega)

    @property
    def omega_tilde(self) -> np.ndarray:
        """``ω̃_ij = g̃_ik J_j^k``."""

        return self.g_tilde @ np.swapaxes(self.J, -1, -2)

    @property
    def F(self) -> np.ndarray:
        """``F`` read off from ``det g̃ = e^{2F} det g``."""

        return 0.5 * np.log(np.linalg.det(self.g_tilde) / np.linalg.det(self.g))

    def translated(self, shift) -> "AlmostComplexData":
        axes = tuple(range(self.grid.m))
        return AlmostComplexData(
            self.grid,
            np.roll(self.J, shift, axis=axes),
            np.roll(self.Omega, shift, axis=axes),
            np.roll(self.g_tilde, shift, axis=axes),
            label=self.label,
        )

    def to_json(self) -> dict:
        return {"grid": self.grid.to_json(), "label": self.label}
