"""Fourier-multiplier calculus on the periodic unit torus."""

from typing import Sequence

import numpy as np

from ..objects.grid import TorusGrid

__all__ = (
    "multiplier",
    "derivative",
    "tensor_derivative",
    "real_hessian",
    "laplacian",
    "poisson",
    "interpolate",
)


def _axis_wavenumbers(grid: TorusGrid, axis: int, odd: bool) -> np.ndarray:
    k = grid.wavenumbers()
    if odd:
        # An odd-order factor has no real Nyquist mode.
        k = k.copy()
        k[grid.N // 2] = 0.0
    shape = [1] * grid.m
    shape[axis] = grid.N
    return k.reshape(shape)


def multiplier(grid: TorusGrid, axes: Sequence[int]) -> np.ndarray:
    """Fourier symbol of ``∂_{axes[0]} ∂_{axes[1]} ...``."""

    symbol = np.ones(grid.shape, dtype=complex)
    counts = {axis: list(axes).count(axis) for axis in set(axes)}
    for axis, count in counts.items():
        k = _axis_wavenumbers(grid, axis, odd=bool(count % 2))
        symbol = symbol * (1j * k) ** count
    return symbol


def derivative(values: np.ndarray, grid: TorusGrid, axes: Sequence[int]) -> np.ndarray:
    return np.real(np.fft.ifftn(multiplier(grid, axes) * np.fft.fftn(values)))


def tensor_derivative(values: np.ndarray, grid: TorusGrid, axis: int) -> np.ndarray:
    """``∂_axis`` of a field whose trailing axes are components, e.g. a matrix per node."""

    spatial = tuple(range(grid.m))
    symbol = multiplier(grid, (axis,)).reshape(grid.shape + (1,) * (values.ndim - grid.m))
    return np.real(np.fft.ifftn(symbol * np.fft.fftn(values, axes=spatial), axes=spatial))


def real_hessian(values: np.ndarray, grid: TorusGrid) -> np.ndarray:
    """All second partial derivatives, shape ``grid.shape + (m, m)``."""

    m = grid.m
    spectrum = np.fft.fftn(values)
    out = np.empty(grid.shape + (m, m))
    for a in range(m):
        for b in range(a, m):
            entry = np.real(np.fft.ifftn(multiplier(grid, (a, b)) * spectrum))
            out[..., a, b] = entry
            out[..., b, a] = entry
    return out


def laplacian_symbol(grid: TorusGrid) -> np.ndarray:
    symbol = np.zeros(grid.shape)
    for axis in range(grid.m):
        symbol = symbol - _axis_wavenumbers(grid, axis, odd=False) ** 2
    return symbol


def laplacian(values: np.ndarray, grid: TorusGrid) -> np.ndarray:
    return np.real(np.fft.ifftn(laplacian_symbol(grid) * np.fft.fftn(values)))


def poisson(rhs: np.ndarray, grid: TorusGrid, scale: float = 1.0) -> np.ndarray:
    """Mean-zero solution of ``scale · Δu = rhs - mean(rhs)``."""

    symbol = scale * laplacian_symbol(grid)
    spectrum = np.fft.fftn(rhs)
    zero = (0,) * grid.m
    symbol[zero] = 1.0
    spectrum[zero] = 0.0
    return np.real(np.fft.ifftn(spectrum / symbol))


def interpolate(values: np.ndarray, grid: TorusGrid, points: np.ndarray) -> np.ndarray:
    """Evaluate the trigonometric interpolant of ``values`` at ``points``.

    ``points`` has shape ``(..., m)``; coordinates are taken modulo 1.
    """

    points = np.asarray(points, dtype=float)
    flat = points.reshape(-1, grid.m) % 1.0
    coefficients = np.fft.fftn(values) / grid.node_count
    k = np.fft.fftfreq(grid.N, d=1.0 / grid.N)

    # Contract one axis at a time: phase factors per axis keep memory at O(P·N^{m-1}).
    result = np.broadcast_to(coefficients, (flat.shape[0],) + coefficients.shape)
    for axis in range(grid.m):
        phase = np.exp(2j * np.pi * flat[:, axis, None] * k[None, :])
        result = np.einsum("pk,pk...->p...", phase, result)
    return np.real(result).reshape(points.shape[:-1])
