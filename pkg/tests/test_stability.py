import numpy as np
import pytest

from auxma import ArgumentError, PremiseViolation, ScalarField, TorusGrid
from auxma.experiments.stability import beta_ref, family, normalize_log_density, run_stability, run_sweep


def _mode(grid: TorusGrid, axis: int, amplitude: float = 0.3) -> ScalarField:
    coordinate = grid.coordinates()[axis]
    return normalize_log_density(ScalarField(grid, amplitude * np.cos(2 * np.pi * coordinate) * np.ones(grid.shape)))


def test_beta_ref():
    assert beta_ref(2, 4.0) == pytest.approx(1 / 5.25, rel=1e-15)
    assert beta_ref(1, 2.0) == pytest.approx(1 / 4.5, rel=1e-15)
    with pytest.raises(ArgumentError):
        beta_ref(2, 2.0)


def test_normalized_log_density_has_unit_mass(torus1, smooth):
    f = normalize_log_density(smooth(torus1, amplitude=2.0))
    assert np.exp(f.values).mean() == pytest.approx(1.0, rel=1e-14)


def test_family_endpoints_and_mass(torus1):
    f, f_tilde = _mode(torus1, 0), _mode(torus1, 1)
    assert family(f, f_tilde, 0.0) is f
    assert family(f, f_tilde, 1.0) is f_tilde
    assert np.exp(family(f, f_tilde, 0.3).values).mean() == pytest.approx(1.0, rel=1e-14)
    with pytest.raises(ArgumentError):
        family(f, f_tilde, 1.5)


def test_identical_data_has_no_gap(torus1):
    f = _mode(torus1, 0)
    instance = run_stability(f, f, p=2.0, K=10.0)
    assert instance.gap == 0.0
    assert instance.distance == 0.0


def test_gap_is_centred(torus2):
    instance = run_stability(_mode(torus2, 0), _mode(torus2, 3), p=4.0, K=10.0)
    assert instance.gap > 0
    assert instance.normalization_defect <= 1e-12
    assert instance.beta_ref == pytest.approx(1 / 5.25)


def test_unnormalized_density_is_rejected(torus1):
    f = _mode(torus1, 0)
    with pytest.raises(ArgumentError):
        run_stability(f, f + 0.1, p=2.0, K=10.0)


def test_entropy_premise(torus1):
    f = _mode(torus1, 0, amplitude=3.0)
    with pytest.raises(PremiseViolation):
        run_stability(f, f, p=2.0, K=1e-3)


def test_sweep_on_the_two_torus(torus1):
    sweep = run_sweep(_mode(torus1, 0), _mode(torus1, 1), p=2.0, K=10.0, exponents=range(5))
    assert [row.t for row in sweep.rows] == [1.0, 0.5, 0.25, 0.125, 0.0625]
    assert sweep.monotone
    # on T² the equation is linear, so the gap scales with t
    assert sweep.slope == pytest.approx(1.0, abs=1e-5)
    assert sweep.passed
    for row in sweep.rows:
        assert row.gap <= sweep.C * row.distance**sweep.beta_ref * (1 + 1e-12)
