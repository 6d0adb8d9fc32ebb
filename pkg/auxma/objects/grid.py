from dataclasses import dataclass
from functools import cached_property
from typing import Tuple

import numpy as np

from ..errors import ArgumentError


@dataclass(frozen=True)
class TorusGrid:
    """A uniform periodic grid on the unit torus [0, 1)^m with m = 2n.

    Real axis ``2j`` and ``2j + 1`` carry the real and imaginary parts of the
    complex coordinate ``z_j``.
    """

    n: int
    N: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ArgumentError(f"complex dimension must be positive, got {self.n}")
        if self.N < 4 or self.N % 2:
            raise ArgumentError(f"nodes per axis must be even and at least 4, got {self.N}")

    @property
    def m(self) -> int:
        return 2 * self.n

    @property
    def h(self) -> float:
        return 1.0 / self.N

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.N,) * self.m

    @property
    def node_count(self) -> int:
        return self.N**self.m

    @property
    def volume(self) -> float:
        return 1.0

    @property
    def cell_volume(self) -> float:
        return self.h**self.m

    def axis(self) -> np.ndarray:
        return np.arange(self.N) * self.h

    def coordinates(self) -> Tuple[np.ndarray, ...]:
        """Node coordinates, one broadcastable array per real axis."""

        return tuple(np.meshgrid(*([self.axis()] * self.m), indexing="ij", sparse=True))

    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers ``2π k`` in FFT order."""

        return 2 * np.pi * np.fft.fftfreq(self.N, d=self.h)

    def to_json(self) -> dict:
        return {"kind": "torus", "n": self.n, "N": self.N}

    @classmethod
    def from_json(cls, json: dict) -> "TorusGrid":
        return cls(n=int(json["n"]), N=int(json["N"]))


def unit_ball_volume(m: int) -> float:
    """Volume of the unit ball in R^m, ``π^{m/2} / Γ(m/2 + 1)``."""

    from scipy.special import gammaln

    return float(np.exp(0.5 * m * np.log(np.pi) - gammaln(0.5 * m + 1)))


@dataclass(frozen=True)
class BallMesh:
    """Nodes covering the closed ball B(0, 2·r0) in R^m.

    For ``m = 1`` the nodes are ``resolution + 1`` equispaced points of the
    interval, the two endpoints being the boundary. For ``m = 2`` the nodes
    are polar: Chebyshev radii ``R·cos(jπ/resolution)`` for the non-negative
    half (``resolution`` odd, so the centre is never a node) times
    ``angular`` equispaced angles. Row 0 is the boundary circle.
    """

    m: int
    r0: float
    resolution: int
    angular: int = 0

    def __post_init__(self) -> None:
        if self.m not in (1, 2):
            raise ArgumentError(f"unsupported ball dimension {self.m}; only m = 1 and m = 2 are solved")
        if not self.r0 > 0:
            raise ArgumentError(f"radius must be positive, got {self.r0}")
        if self.m == 1 and self.resolution < 2:
            raise ArgumentError("interval meshes need at least two cells")
        if self.m == 2:
            if self.resolution < 3 or self.resolution % 2 == 0:
                raise ArgumentError("polar meshes need an odd Chebyshev resolution of at least 3")
            if self.angular < 4 or self.angular % 2:
                raise ArgumentError("polar meshes need an even angular resolution of at least 4")

    @property
    def radius(self) -> float:
        return 2.0 * self.r0

    @property
    def radial_count(self) -> int:
        """Number of interior radii (m = 2) or interior points (m = 1)."""

        if self.m == 1:
            return self.resolution - 1
        return (self.resolution - 1) // 2

    @property
    def shape(self) -> Tuple[int, ...]:
        if self.m == 1:
            return (self.resolution + 1,)
        return (self.radial_count + 1, self.angular)

    @cached_property
    def radii(self) -> np.ndarray:
        """Non-negative Chebyshev radii, boundary first (m = 2 only)."""

        j = np.arange(self.radial_count + 1)
        return self.radius * np.cos(np.pi * j / self.resolution)

    @cached_property
    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.angular) / self.angular

    @cached_property
    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        if self.m == 1:
            mask[0] = mask[-1] = True
        else:
            mask[0, :] = True
        mask.setflags(write=False)
        return mask

    @cached_property
    def points(self) -> np.ndarray:
        """Cartesian node coordinates with shape ``self.shape + (m,)``."""

        if self.m == 1:
            x = np.linspace(-self.radius, self.radius, self.resolution + 1)
            return x[:, None]

        r = self.radii[:, None]
        return np.stack([r * np.cos(self.angles), r * np.sin(self.angles)], axis=-1)

    @cached_property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.points, axis=-1)

    @cached_property
    def weights(self) -> np.ndarray:
        """Quadrature weights over interior nodes; zero on the boundary."""

        w = np.zeros(self.shape)
        if self.m == 1:
            w[1:-1] = 2 * self.radius / self.resolution
        else:
            from ..internal.polar import radial_weights

            w[1:, :] = (self.radius**2 * radial_weights(self.resolution))[:, None] * (2 * np.pi / self.angular)
        w.setflags(write=False)
        return w

    @property
    def volume(self) -> float:
        return unit_ball_volume(self.m) * self.radius**self.m

    def to_json(self) -> dict:
        return {
            "kind": "ball",
            "m": self.m,
            "r0": self.r0,
            "resolution": self.resolution,
            "angular": self.angular,
        }

    @classmethod
    def from_json(cls, json: dict) -> "BallMesh":
        return cls(
            m=int(json["m"]),
            r0=float(json["r0"]),
            resolution=int(json["resolution"]),
            angular=int(json.get("angular", 0)),
        )
