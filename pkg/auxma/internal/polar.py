"""Chebyshev-Fourier collocation on the disk.

The radius runs over the whole diameter [-R, R] at Chebyshev points with an
odd number of intervals, so no node sits at the centre. Values at negative
radii are folded onto ``(|r|, θ + π)``, which leaves the non-negative radii
times all angles as the unknowns.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev, legendre

__all__ = ("chebyshev_matrix", "fourier_matrices", "radial_weights", "PolarOperators")


def chebyshev_matrix(N: int):
    """Chebyshev points ``cos(jπ/N)`` and their differentiation matrix."""

    j = np.arange(N + 1)
    x = np.cos(np.pi * j / N)
    c = np.where((j == 0) | (j == N), 2.0, 1.0) * (-1.0) ** j

    X = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (X + np.eye(N + 1))
    D -= np.diag(D.sum(axis=1))
    return x, D


def fourier_matrices(M: int):
    """First and second periodic spectral differentiation matrices on M points."""

    k = np.fft.fftfreq(M, d=1.0 / M)
    first = 1j * k
    first[M // 2] = 0.0
    eye = np.eye(M)
    D1 = np.real(np.fft.ifft(first[:, None] * np.fft.fft(eye, axis=0), axis=0))
    D2 = np.real(np.fft.ifft(-(k**2)[:, None] * np.fft.fft(eye, axis=0), axis=0))
    return D1, D2


@lru_cache(maxsize=None)
def radial_weights(N: int) -> np.ndarray:
    """Weights ``w_j`` at the positive interior radii for ``∫_{-1}^{1} p(x)|x| dx``.

    The rule uses all interior Chebyshev nodes and is exact for polynomials of
    degree ``N - 2``. By symmetry only the positive half is returned.
    """

    x = np.cos(np.pi * np.arange(1, N) / N)
    degree = N - 2

    nodes, gauss = legendre.leggauss(N + 8)
    t = 0.5 * (nodes + 1.0)
    T = chebyshev.chebvander(t, degree)
    half = 0.5 * (gauss * t) @ T
    signs = (-1.0) ** np.arange(degree + 1)
    moments = half * (1.0 + signs)

    V = chebyshev.chebvander(x, degree).T
    w = np.linalg.solve(V, moments)
    w.setflags(write=False)
    return w[: (N - 1) // 2]


@dataclass(frozen=True)
class PolarOperators:
    """Dense collocation operators mapping unknowns to values at all non-negative radii.

    Rows are ordered radius-major over ``(radial_count + 1) × angular`` nodes
    with the boundary circle first; columns over the ``radial_count ×
    angular`` unknowns.
    """

    r: np.ndarray
    Dr: np.ndarray
    Drr: np.ndarray
    Dt: np.ndarray
    Dtt: np.ndarray
    Drt: np.ndarray

    @classmethod
    def build(cls, N: int, M: int, radius: float) -> "PolarOperators":
        x, D = chebyshev_matrix(N)
        D = D / radius
        D2 = D @ D
        half = (N - 1) // 2
        rows = np.arange(half + 1)
        positive = np.arange(1, half + 1)
        mirrored = N - positive

        shift = np.zeros((M, M))
        shift[np.arange(M), (np.arange(M) + M // 2) % M] = 1.0
        eye = np.eye(M)

        def fold(matrix: np.ndarray) -> np.ndarray:
            return np.kron(matrix[np.ix_(rows, positive)], eye) + np.kron(matrix[np.ix_(rows, mirrored)], shift)

        F1, F2 = fourier_matrices(M)
        lift = np.kron(np.eye(half + 1)[:, 1:], eye)

        Dr = fold(D)
        Dt = lift @ np.kron(np.eye(half), F1)
        return cls(
            r=np.repeat(radius * x[rows], M),
            Dr=Dr,
            Drr=fold(D2),
            Dt=Dt,
            Dtt=lift @ np.kron(np.eye(half), F2),
            Drt=Dr @ np.kron(np.eye(half), F1),
        )

    def hessian_frame(self, u: np.ndarray):
        """Entries ``(A, B, C)`` of D²u in the orthonormal polar frame at every node."""

        r = self.r
        A = self.Drr @ u
        C = (self.Dr @ u) / r + (self.Dtt @ u) / r**2
        B = (self.Drt @ u) / r - (self.Dt @ u) / r**2
        return A, B, C

    def laplacian(self) -> np.ndarray:
        r = self.r[:, None]
        return self.Drr + self.Dr / r + self.Dtt / r**2

    def determinant_jacobian(self, u: np.ndarray) -> np.ndarray:
        """Derivative of ``det D²u`` with respect to the unknowns."""

        A, B, C = self.hessian_frame(u)
        r = self.r[:, None]
        dA = self.Drr
        dC = self.Dr / r + self.Dtt / r**2
        dB = self.Drt / r - self.Dt / r**2
        return C[:, None] * dA + A[:, None] * dC - 2.0 * B[:, None] * dB
