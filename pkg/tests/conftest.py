import numpy as np
import pytest
from hypothesis import settings

from auxma import ScalarField, TorusGrid

settings.register_profile("auxma", max_examples=25, deadline=None)
settings.load_profile("auxma")


def smooth_field(grid: TorusGrid, rng, modes: int = 2, amplitude: float = 0.3) -> ScalarField:
    """Random mean-zero field with Fourier modes in ``[-modes, modes]^m`` and ``max|F| = amplitude``."""

    spectrum = np.zeros(grid.shape, dtype=complex)
    index = np.r_[0 : modes + 1, -modes:0]
    size = (len(index),) * grid.m
    spectrum[np.ix_(*([index] * grid.m))] = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    values = np.real(np.fft.ifftn(spectrum))
    values -= values.mean()
    return ScalarField(grid, amplitude * values / np.abs(values).max())


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def torus1():
    return TorusGrid(n=1, N=32)


@pytest.fixture
def torus2():
    return TorusGrid(n=2, N=8)


@pytest.fixture
def smooth(rng):
    def make(grid: TorusGrid, modes: int = 2, amplitude: float = 0.3) -> ScalarField:
        return smooth_field(grid, rng, modes, amplitude)

    return make
