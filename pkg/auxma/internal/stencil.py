"""Periodic finite-difference stencils on torus grids."""

from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import factorized

from ..objects.grid import TorusGrid

__all__ = (
    "forward_difference",
    "divergence_form",
    "riemannian_form",
    "pinned_solve",
    "central_difference",
    "forward_gradient",
)


@lru_cache(maxsize=32)
def _shift(N: int) -> sp.csr_matrix:
    # (S u)_i = u_{i+1} with periodic wrap.
    return sp.csr_matrix(sp.eye(N, k=1) + sp.eye(N, k=-(N - 1)))


def forward_difference(grid: TorusGrid, axis: int) -> sp.csr_matrix:
    """``(u(x + h e_axis) - u(x)) / h`` as a sparse matrix on row-major node order."""

    factors = [sp.identity(grid.N, format="csr")] * grid.m
    factors[axis] = (_shift(grid.N) - sp.identity(grid.N)) / grid.h
    out = factors[0]
    for factor in factors[1:]:
        out = sp.kron(out, factor, format="csr")
    return out


def divergence_form(grid: TorusGrid, coefficients: np.ndarray) -> sp.csr_matrix:
    """``L = Σ_ij D_iᵀ diag(M_ij) D_j`` for per-node symmetric ``M``.

    ``L`` is symmetric positive semidefinite with the constants as kernel
    when ``M`` is positive-definite everywhere.
    """

    D = [forward_difference(grid, axis) for axis in range(grid.m)]
    L = sp.csr_matrix((grid.node_count, grid.node_count))
    for i in range(grid.m):
        for j in range(grid.m):
            weight = sp.diags(coefficients[..., i, j].ravel())
            L = L + D[i].T @ weight @ D[j]
    return sp.csr_matrix(L)


def forward_gradient(values: np.ndarray, grid: TorusGrid) -> np.ndarray:
    """Forward differences along every axis, shape ``grid.shape + (m,)``."""

    h = grid.h
    return np.stack([(np.roll(values, -1, axis=axis) - values) / h for axis in range(grid.m)], axis=-1)


def central_difference(values: np.ndarray, grid: TorusGrid, axis: int) -> np.ndarray:
    """Second-order central difference along ``axis``; trailing axes are carried along."""

    return (np.roll(values, -1, axis=axis) - np.roll(values, 1, axis=axis)) / (2 * grid.h)


def riemannian_form(grid: TorusGrid, metric: np.ndarray):
    """``(L, w)`` for a real metric field: ``Δ_g = -(1/w) L`` with ``w = √det g``."""

    w = np.sqrt(np.linalg.det(metric))
    return divergence_form(grid, w[..., None, None] * np.linalg.inv(metric)), w


def pinned_solve(L: sp.spmatrix, rhs: np.ndarray) -> np.ndarray:
    """Solve ``L u = rhs`` for a matrix whose kernel is the constants, pinning the last node to 0.

    :raises RuntimeError: if the reduced matrix is singular.
    """

    keep = L.shape[0] - 1
    solve = factorized(sp.csc_matrix(L[:keep, :keep]))
    out = np.zeros(L.shape[0])
    out[:keep] = solve(rhs[:keep])
    return out
