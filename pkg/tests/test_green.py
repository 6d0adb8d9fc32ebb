import numpy as np
import pytest

from auxma import ArgumentError, MetricField, PremiseViolation, ScalarField, TorusGrid
from auxma.geometry import (
    diameter_bound,
    flat_green_oracle,
    graph_distances,
    green_lower_bound,
    green_norms,
    green_slice,
    laplacian_apply,
    sup_bound_experiment,
)
from auxma.objects import GreenSlice


def _bump(grid: TorusGrid, amplitude: float = 0.3) -> MetricField:
    x, y = grid.coordinates()
    factor = np.exp(amplitude * np.cos(2 * np.pi * x) * np.cos(2 * np.pi * y))
    return MetricField.conformal(grid, np.broadcast_to(factor, grid.shape), label="bump")


@pytest.fixture
def grid():
    return TorusGrid(n=1, N=16)


def test_flat_slice_matches_the_fft_oracle(grid):
    green = green_slice(MetricField.flat(grid), (3, 5))
    oracle = flat_green_oracle(grid, (3, 5)).values
    assert np.abs(green.values.values - oracle).max() <= 1e-10 * np.abs(oracle).max()
    assert green.conservation_residual < 1e-9


def test_conservation_residual_is_absolute(grid):
    metric = _bump(grid)
    green = green_slice(metric, (4, 4))
    assert green.conservation_residual < 1e-9
    # the point mass is of height N^m / ω^n, far above 1 here
    assert green.relative_conservation_residual <= green.conservation_residual
    assert green.to_json()["conservation_residual"] == green.conservation_residual


def test_slice_is_mean_zero(grid):
    metric = _bump(grid)
    green = green_slice(metric, (0, 0))
    assert green.mean_residual < 1e-12
    assert abs((green.values.values * metric.density).sum()) < 1e-9 * np.abs(green.values.values).max()


def test_slices_are_symmetric(grid):
    metric = _bump(grid)
    x, y = (1, 2), (9, 12)
    forward = green_slice(metric, x).values.values[y]
    backward = green_slice(metric, y).values.values[x]
    assert forward == pytest.approx(backward, rel=1e-8)


def test_slice_solves_the_green_equation(grid):
    metric = _bump(grid)
    green = green_slice(metric, (4, 4))
    lap = laplacian_apply(metric, green.values).values
    expected = np.full(grid.shape, 1.0 / metric.total_volume)
    expected[4, 4] -= 1.0 / (metric.density[4, 4] * grid.cell_volume)
    assert np.abs(lap - expected).max() <= 1e-8 * np.abs(expected).max()


def test_flat_norms_match_the_oracle(grid):
    metric = MetricField.flat(grid)
    oracle = GreenSlice(
        source=(0, 0), values=flat_green_oracle(grid, (0, 0)), mean_residual=0.0, conservation_residual=0.0
    )
    solved = green_norms(metric, green_slice(metric, (0, 0)))
    assert solved == pytest.approx(green_norms(metric, oracle), rel=1e-8)


def test_l1_norm_is_the_first_exponent(grid):
    metric = MetricField.flat(grid)
    green = green_slice(metric, (0, 0))
    value, _ = green_norms(metric, green, q=1.0)
    assert value == pytest.approx(np.abs(green.values.values).sum() * grid.cell_volume, rel=1e-12)


def test_value_norm_is_stable_under_refinement():
    norms = []
    for N in (16, 32):
        metric = MetricField.flat(TorusGrid(n=1, N=N))
        norms.append(green_norms(metric, green_slice(metric, (0, 0)))[0])
    assert norms[1] == pytest.approx(norms[0], rel=0.05)
    assert all(np.isfinite(norms))


def test_norm_exponents_must_be_at_least_one(grid):
    metric = MetricField.flat(grid)
    with pytest.raises(ArgumentError):
        green_norms(metric, green_slice(metric, (0, 0)), q=0.5)


def test_flat_lower_bound_matches_the_oracle(grid):
    value, node = green_lower_bound(green_slice(MetricField.flat(grid), (0, 0)))
    oracle = flat_green_oracle(grid, (0, 0)).values
    assert value == pytest.approx(oracle.min(), rel=1e-10)
    assert node == (8, 8)


def test_lower_bound_is_negative_for_a_bump(grid):
    value, _ = green_lower_bound(green_slice(_bump(grid), (2, 3)))
    assert value < 0


def test_sup_bound_of_zero(grid):
    measurement = sup_bound_experiment(MetricField.flat(grid), ScalarField.zeros(grid), 1.0)
    assert measurement.ratio == 0.0


def test_sup_bound_for_negated_green(grid):
    metric = _bump(grid)
    v = -green_slice(metric, (0, 0)).values
    measurement = sup_bound_experiment(metric, v, 1.0 / metric.total_volume)
    assert measurement.premise_margin >= -1e-8
    assert 0 < measurement.ratio < np.inf


def test_sup_bound_for_a_cosine_mode():
    ratios = []
    for N in (16, 32):
        grid = TorusGrid(n=1, N=N)
        x, _ = grid.coordinates()
        v = ScalarField(grid, np.broadcast_to(np.cos(2 * np.pi * x), grid.shape))
        eigenvalue = (2 - 2 * np.cos(2 * np.pi * grid.h)) / grid.h**2
        ratios.append(sup_bound_experiment(MetricField.flat(grid), v, eigenvalue).ratio)
    assert ratios[1] == pytest.approx(ratios[0], rel=0.05)


def test_sup_bound_premise(grid):
    x, _ = grid.coordinates()
    v = ScalarField(grid, np.broadcast_to(np.cos(2 * np.pi * x), grid.shape))
    with pytest.raises(PremiseViolation):
        sup_bound_experiment(MetricField.flat(grid), v, 0.0)
    with pytest.raises(PremiseViolation):
        sup_bound_experiment(MetricField.flat(grid), v + 1.0, 100.0)


def test_flat_diameter():
    grid = TorusGrid(n=1, N=8)
    diameter, _, _, method = graph_distances(MetricField.flat(grid))
    assert diameter == pytest.approx(np.sqrt(2) / 2, rel=1e-12)
    assert method == "all_pairs"

    check = diameter_bound(MetricField.flat(grid))
    assert check.passed
    assert check.bound >= check.observed


def test_bump_diameter():
    assert diameter_bound(_bump(TorusGrid(n=1, N=8), amplitude=0.5)).passed


def test_diameter_scaling():
    metric = _bump(TorusGrid(n=1, N=8))
    first = diameter_bound(metric)
    second = diameter_bound(metric.scaled(4.0))
    assert second.observed / first.observed == pytest.approx(2.0, rel=1e-10)
    assert second.bound / first.bound == pytest.approx(2.0, rel=1e-8)
    assert first.details["scaling_exponent"] == 0.5
