"""The Newton step of the complex Hessian equations.

The linearisation of ``log f(λ[I + Hess_c φ])`` in the direction δ is
``Re tr(F · Hess_c δ)`` with ``F = U diag(∂f/f) U^*``. Constants lie in its
kernel, so the step is solved together with an unknown shift ``c`` of the
right side and the gauge ``mean δ = 0``.
"""

from dataclasses import dataclass
from logging import getLogger
from typing import Tuple

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from ..constants import GMRES_RTOL
from ..core.calculus import complex_from_real
from ..internal import spectral
from ..objects.grid import TorusGrid

logger = getLogger("auxma.solvers")

RESTART = 60
MAX_CYCLES = 20


def complex_hessian_values(values: np.ndarray, grid: TorusGrid) -> np.ndarray:
    return complex_from_real(spectral.real_hessian(values, grid))


@dataclass
class NewtonSystem:
    grid: TorusGrid
    coefficients: np.ndarray

    @property
    def size(self) -> int:
        return self.grid.node_count + 1

    def apply(self, delta: np.ndarray) -> np.ndarray:
        H = complex_hessian_values(delta, self.grid)
        return np.real(np.einsum("...jk,...kj->...", self.coefficients, H))

    def _matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.real(np.asarray(x)).ravel()
        delta = x[:-1].reshape(self.grid.shape)
        out = np.empty(self.size)
        out[:-1] = (self.apply(delta) - x[-1]).ravel()
        out[-1] = delta.mean()
        return out

    def _preconditioner(self) -> LinearOperator:
        # Flat operator (a/4)Δ with the node-averaged trace of the coefficients.
        a = float(np.real(np.trace(self.coefficients, axis1=-2, axis2=-1)).mean()) / self.grid.n
        scale = 0.25 * a

        def solve(r: np.ndarray) -> np.ndarray:
            r = np.real(np.asarray(r)).ravel()
            body = r[:-1].reshape(self.grid.shape)
            shift = body.mean()
            out = np.empty(self.size)
            out[:-1] = (spectral.poisson(body - shift, self.grid, scale) + r[-1]).ravel()
            out[-1] = -shift
            return out

        return LinearOperator((self.size, self.size), matvec=solve, dtype=float)

    def solve(self, residual: np.ndarray, rtol: float = GMRES_RTOL) -> Tuple[np.ndarray, float, int]:
        """Solve ``J δ - c = -residual`` with ``mean δ = 0``.

        :return: ``(δ, c, inner iterations)``
        """

        A = LinearOperator((self.size, self.size), matvec=self._matvec, dtype=float)
        b = np.concatenate([-residual.ravel(), [0.0]])
        counter = {"iterations": 0}

        def count(_):
            counter["iterations"] += 1

        x, info = gmres(
            A,
            b,
            rtol=rtol,
            atol=0.0,
            restart=RESTART,
            maxiter=MAX_CYCLES,
            M=self._preconditioner(),
            callback=count,
            callback_type="pr_norm",
        )
        if info:
            logger.debug("gmres stopped before reaching rtol=%g after %d iterations", rtol, counter["iterations"])
        return x[:-1].reshape(self.grid.shape), float(x[-1]), counter["iterations"]
