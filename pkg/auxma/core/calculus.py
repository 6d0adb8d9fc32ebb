from typing import Optional

import numpy as np

from ..constants import HERMITIAN_TOL
from ..errors import DomainMismatch, SymmetryViolation
from ..internal import spectral
from ..objects.fields import HermitianField, ScalarField
from ..objects.grid import TorusGrid

__all__ = ("real_hessian", "complex_from_real", "complex_hessian", "relative_endomorphism", "relative_eigenvalues")


def _torus(field: ScalarField, grid: Optional[TorusGrid]) -> TorusGrid:
    if not isinstance(field.grid, TorusGrid):
        raise DomainMismatch("complex derivatives are only defined on torus grids")
    if grid is not None and grid != field.grid:
        raise DomainMismatch(f"field lives on {field.grid}, not on {grid}")
    return field.grid


def real_hessian(field: ScalarField, grid: Optional[TorusGrid] = None) -> np.ndarray:
    return spectral.real_hessian(field.values, _torus(field, grid))


def complex_from_real(R: np.ndarray) -> np.ndarray:
    """Mixed derivatives ``∂²/∂z_j∂z̄_k`` from the real Hessian.

    With ``z_j = x_j + i y_j`` (real axes 2j and 2j+1)::

        H_jk = ¼[(R_{xj xk} + R_{yj yk}) + i(R_{xj yk} - R_{yj xk})]
    """

    xx = R[..., 0::2, 0::2]
    yy = R[..., 1::2, 1::2]
    xy = R[..., 0::2, 1::2]
    yx = R[..., 1::2, 0::2]
    return 0.25 * ((xx + yy) + 1j * (xy - yx))


def complex_hessian(field: ScalarField, grid: Optional[TorusGrid] = None) -> HermitianField:
    torus = _torus(field, grid)
    return HermitianField(torus, complex_from_real(spectral.real_hessian(field.values, torus)))


def relative_endomorphism(field: ScalarField) -> HermitianField:
    """``h_φ = I + Hess_c φ`` against the flat background."""

    return complex_hessian(field).plus_identity()


def relative_eigenvalues(h: HermitianField, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Eigenvalues per node, ascending, shape ``grid.shape + (n,)``."""

    defect = h.symmetry_defect()
    if defect > tol:
        raise SymmetryViolation(f"matrix field is not Hermitian (relative defect {defect:.3e})")
    return np.linalg.eigvalsh(h.values)
