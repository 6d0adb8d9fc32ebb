import numpy as np
import pytest

from auxma import (
    ArgumentError,
    ChartError,
    CompatibilityError,
    PreconditionError,
    StageFailure,
    TorusGrid,
)
from auxma.geometry import (
    christoffel_contraction,
    christoffel_residual,
    conformal_family,
    measure_CJ,
    metric_christoffel_contraction,
    run_mainnew,
    sheared_integrable_data,
    solve_linear_phi,
    standard_integrable_data,
    validate,
)
from auxma.objects import AlmostComplexData
from auxma.objects.almost_complex import standard_form, standard_structure


def _sheared(grid: TorusGrid, shear: float = 0.05, amplitude: float = 0.1) -> AlmostComplexData:
    x, y = grid.coordinates()
    a = shear * np.sin(2 * np.pi * x) * np.ones(grid.shape)
    u = amplitude * np.cos(2 * np.pi * y) * np.ones(grid.shape)
    return sheared_integrable_data(grid, a, u)


def _conformal(grid: TorusGrid, amplitude: float) -> AlmostComplexData:
    y = grid.coordinates()[1]
    return conformal_family(grid, amplitude * np.cos(2 * np.pi * y) * np.ones(grid.shape))


@pytest.mark.parametrize("n", [1, 2])
def test_standard_data_validates(n):
    report = validate(standard_integrable_data(TorusGrid(n=n, N=8)))
    assert report.passed
    assert report.j_square <= 1e-12
    assert report.compatibility <= 1e-12
    assert report.d_omega_tilde <= 1e-12
    assert report.taming_margin == pytest.approx(1.0)


def test_sheared_data_validates():
    report = validate(_sheared(TorusGrid(n=1, N=32)))
    assert report.passed
    assert report.taming_margin > 0


def test_scaled_structure_is_flagged():
    grid = TorusGrid(n=1, N=8)
    data = AlmostComplexData(grid, 1.1 * standard_structure(1), standard_form(1), np.eye(2))
    report = validate(data)
    assert report.j_square == pytest.approx(0.21, rel=1e-12)
    assert not report.structure_ok
    assert not report.passed


def test_incompatible_metric_is_flagged():
    grid = TorusGrid(n=1, N=8)
    data = AlmostComplexData(grid, standard_structure(1), standard_form(1), np.diag([1.0, 2.0]))
    report = validate(data)
    assert report.structure_ok
    assert report.compatibility > 0.1
    assert not report.almost_kahler


def test_conformal_family_in_higher_dimension_is_not_closed():
    report = validate(_conformal(TorusGrid(n=2, N=8), 0.2))
    assert report.compatibility <= 1e-12
    assert report.d_omega_tilde > 1e-3
    assert not report.almost_kahler


def test_contraction_of_a_constant_structure_is_zero():
    data = standard_integrable_data(TorusGrid(n=1, N=16))
    assert np.all(christoffel_contraction(data, validate(data)) == 0.0)
    assert christoffel_residual(data, validate(data)) == 0.0


def test_contraction_needs_an_almost_kahler_report():
    grid = TorusGrid(n=1, N=8)
    data = standard_integrable_data(grid)
    with pytest.raises(PreconditionError):
        christoffel_contraction(data, None)

    incompatible = AlmostComplexData(grid, standard_structure(1), standard_form(1), np.diag([1.0, 2.0]))
    with pytest.raises(PreconditionError):
        christoffel_contraction(incompatible, validate(incompatible))


@pytest.mark.parametrize("N", [32, 64])
def test_conformal_metric_contraction_vanishes_on_surfaces(N):
    # g̃^{ik}Γ^q_{ik} = (2 - m)e^{-2u}∂_q u for g̃ = e^{2u}δ
    data = _conformal(TorusGrid(n=1, N=N), 0.2)
    lhs = metric_christoffel_contraction(data.grid, data.g_tilde)
    assert np.abs(lhs).max() <= 1e-12
    assert christoffel_residual(data, validate(data)) <= 1e-10


def test_contraction_identity_converges_at_second_order():
    residuals = []
    for N in (32, 64, 128):
        data = _sheared(TorusGrid(n=1, N=N), amplitude=0.2)
        residuals.append(christoffel_residual(data, validate(data)))
    residuals = np.asarray(residuals)
    assert np.all(residuals > 0)
    assert np.log2(residuals[:-1] / residuals[1:]).min() >= 1.8


def test_CJ_of_a_constant_structure_is_zero():
    assert measure_CJ(standard_integrable_data(TorusGrid(n=1, N=16)), (3, 4), 0.1) <= 1e-10


def test_CJ_is_translation_invariant():
    data = _sheared(TorusGrid(n=1, N=32), shear=0.1)
    here = measure_CJ(data, (4, 6), 0.1)
    there = measure_CJ(data.translated((3, 5)), (7, 11), 0.1)
    assert here > 0
    assert there == pytest.approx(here, rel=1e-12)


def test_CJ_chart_condition():
    grid = TorusGrid(n=1, N=8)
    data = AlmostComplexData(grid, standard_structure(1), 3.0 * standard_form(1), 3.0 * np.eye(2))
    with pytest.raises(ChartError):
        measure_CJ(data, (0, 0), 0.1)


def test_CJ_arguments():
    data = standard_integrable_data(TorusGrid(n=1, N=8))
    with pytest.raises(ArgumentError):
        measure_CJ(data, (0,), 0.1)
    with pytest.raises(ArgumentError):
        measure_CJ(data, (0, 0), 0.0)


def test_linear_phi_of_equal_metrics_is_zero():
    data = standard_integrable_data(TorusGrid(n=1, N=16))
    phi, residual = solve_linear_phi(data.grid, data.g_tilde, data.g)
    assert np.abs(phi.values).max() <= 1e-12
    assert residual <= 1e-12


def test_linear_phi_for_the_conformal_family():
    data = _conformal(TorusGrid(n=1, N=32), 0.2)
    phi, residual = solve_linear_phi(data.grid, data.g_tilde, data.g)
    assert residual <= 1e-8
    assert phi.values.max() == 0.0
    assert phi.values.min() < 0


def test_linear_phi_needs_a_compatible_right_side():
    grid = TorusGrid(n=1, N=8)
    with pytest.raises(CompatibilityError):
        solve_linear_phi(grid, 2.0 * np.broadcast_to(np.eye(2), grid.shape + (2, 2)), np.eye(2))


def test_pipeline_on_standard_data():
    report = run_mainnew(standard_integrable_data(TorusGrid(n=1, N=32)), 0.1)
    assert report.sup_phi == 0.0
    assert report.constants["C_J"] <= 1e-10
    assert report.checks["containment"]
    assert report.checks["linfty"]
    assert report.passed
    assert np.isfinite(report.constants["C_8"])


def test_pipeline_on_the_conformal_family():
    report = run_mainnew(_conformal(TorusGrid(n=1, N=32), 0.1), 0.1)
    assert report.sup_phi > 0
    assert report.checks["phi_nonpositive"]
    assert report.checks["linfty"]
    assert report.sup_phi <= report.constants["C_8"] * (1 + report.l1_phi)


def test_pipeline_records_a_scaled_epsilon():
    data = standard_integrable_data(TorusGrid(n=1, N=16))
    full = run_mainnew(data, 0.1)
    half = run_mainnew(data, 0.1, epsilon_scale=0.5)
    assert half.constants["epsilon"] == pytest.approx(0.5 * full.constants["epsilon"], rel=1e-14)
    assert half.constants["Lambda"] == full.constants["Lambda"]
    assert full.control.factor == 0.5
    assert full.control.critical_scale == full.critical_scale
    assert half.critical_scale == pytest.approx(2 * full.critical_scale, rel=1e-12)


def test_pipeline_arguments():
    with pytest.raises(ArgumentError):
        run_mainnew(standard_integrable_data(TorusGrid(n=2, N=8)), 0.1)
    with pytest.raises(ArgumentError):
        run_mainnew(standard_integrable_data(TorusGrid(n=1, N=16)), 0.3)
    with pytest.raises(ArgumentError):
        run_mainnew(standard_integrable_data(TorusGrid(n=1, N=16)), 0.1, epsilon_scale=0.0)


def test_pipeline_stops_at_validation():
    grid = TorusGrid(n=1, N=16)
    data = AlmostComplexData(grid, standard_structure(1), standard_form(1), np.diag([1.0, 2.0]))
    with pytest.raises(StageFailure) as info:
        run_mainnew(data, 0.1)
    assert info.value.stage == "validate"
    assert "compatibility" in info.value.diagnostics
