import json

import numpy as np
import pytest

from auxma import ArgumentError, DensityRecipe, ExperimentName, TorusGrid, parse_config
from auxma.config import DensityConfig
from auxma.experiments.runners import _result, available, build_density, run_experiment


def _config(experiment: str, n: int = 1, N: int = 16, density: str = "{recipe: zero}", params: str = "{}"):
    return parse_config(f"experiment: {experiment}\nn: {n}\nN: {N}\ndensity: {density}\nparams: {params}\n")


def test_every_experiment_is_registered():
    names = [name for name, _ in available()]
    assert names == [name.value for name in ExperimentName]
    assert all(summary for _, summary in available())


def test_build_density_recipes(torus1):
    assert np.all(build_density(torus1, DensityConfig()).values == 0.0)
    assert np.all(build_density(torus1, DensityConfig(DensityRecipe.CONSTANT, 0.5)).values == 0.5)

    cosine = build_density(torus1, DensityConfig(DensityRecipe.COSINE, 0.2, modes=1))
    x, y = torus1.coordinates()
    assert np.allclose(cosine.values, 0.2 * (np.cos(2 * np.pi * x) + np.cos(2 * np.pi * y)), atol=1e-15)


def test_random_density_is_seeded_and_scaled(torus2):
    recipe = DensityConfig(DensityRecipe.RANDOM, 0.3, seed=5, modes=2)
    first = build_density(torus2, recipe)
    assert np.array_equal(first.values, build_density(torus2, recipe).values)
    assert np.abs(first.values).max() == pytest.approx(0.3, rel=1e-14)
    assert abs(first.values.mean()) < 1e-15
    other = build_density(torus2, DensityConfig(DensityRecipe.RANDOM, 0.3, seed=6, modes=2))
    assert not np.array_equal(first.values, other.values)


def test_too_many_modes():
    with pytest.raises(ArgumentError):
        build_density(TorusGrid(n=1, N=8), DensityConfig(DensityRecipe.RANDOM, 0.3, modes=4))


def test_linfty_of_zero_density():
    result = run_experiment(_config("linfty"))
    assert result.passed
    assert result.report["S0"] == 0.0
    assert result.report["sup_phi"] == 0.0
    assert result.profile is not None
    # Φ = -εΛ^b is strictly negative; no ε breaks it
    assert result.controls == {}


def test_linfty_of_a_random_density():
    result = run_experiment(_config("linfty", density="{recipe: random, amplitude: 0.3, seed: 3}", params="{s_values: [0.0, 0.5]}"))
    assert result.passed
    assert set(result.checks) == {"phi_nonpositive[s=0]", "phi_nonpositive[s=0.5]", "linfty"}
    # s = 0.5 lies above sup|φ|, so only s = 0 has a comparison to break
    assert set(result.controls) == {"halved_epsilon[s=0]"}
    assert result.report["comparisons"][0]["control"]["applicable"]
    assert result.report["comparisons"][1]["critical_scale"] == 0.0
    assert result.report["S0"] >= result.report["sup_phi"]
    json.dumps(result.to_json())


def test_controls_are_reported_without_failing_the_run():
    config = _config("linfty")
    result = _result(config, {}, {"linfty": True}, {"halved_epsilon[s=0]": False})
    assert result.passed
    assert result.controls == {"halved_epsilon[s=0]": False}
    assert result.to_json()["controls"] == {"halved_epsilon[s=0]": False}
    assert not _result(config, {}, {"linfty": False}, {"halved_epsilon[s=0]": True}).passed


def test_reruns_are_identical():
    config = _config("linfty", density="{recipe: random, amplitude: 0.3, seed: 4}")
    assert run_experiment(config).to_json() == run_experiment(config).to_json()


@pytest.mark.slow
def test_linfty_hessian_on_the_four_torus():
    config = parse_config(
        "experiment: linfty\nn: 2\nN: 16\noperator: {kind: hessian, k: 2}\n"
        "density: {recipe: random, amplitude: 0.3, seed: 7}\n"
    )
    result = run_experiment(config)
    assert result.passed
    assert {"b", "epsilon", "Lambda", "S0", "sup_phi"} <= set(result.report)
    assert result.report["S0"] >= result.report["sup_phi"]


def test_linfty_needs_p_above_n():
    with pytest.raises(ArgumentError):
        run_experiment(_config("linfty", params="{p: 1.0}"))


def test_entropy_energy():
    result = run_experiment(_config("entropy_energy", density="{recipe: cosine, amplitude: 0.2, modes: 1}"))
    assert result.passed
    assert result.report["entropy"]["energy"] >= 0


def test_stability():
    result = run_experiment(_config("stability", density="{recipe: random, amplitude: 0.3, seed: 1}", params="{exponents: [0, 1, 2, 3]}"))
    assert result.passed
    header, rows = result.tables["sweep"]
    assert header == ("t", "distance", "gap", "C")
    assert [row[0] for row in rows] == [1.0, 0.5, 0.25, 0.125]


def test_flat_green():
    result = run_experiment(_config("green"))
    assert result.passed
    assert "flat_oracle" in result.checks


def test_conformal_green():
    result = run_experiment(_config("green", density="{recipe: cosine, amplitude: 0.3, modes: 1}"))
    assert result.passed
    assert result.report["metric"] == "conformal"


def test_diameter():
    result = run_experiment(_config("diameter", N=8))
    assert result.passed
    assert result.report["diameter_exponent"] == pytest.approx(0.5, rel=1e-10)


def test_degiorgi_suite():
    result = run_experiment(_config("degiorgi_suite", params="{count: 50, samples: 16}"))
    assert result.passed
    assert result.report["vanishing_violations"] == 0
    assert len(result.tables["profiles"][1]) == 50


def test_fields_are_dumped_on_request():
    result = run_experiment(_config("green", params="{dump_fields: true}"))
    assert set(result.fields) == {"green"}
    assert run_experiment(_config("green")).fields == {}


def test_symplectic_needs_the_two_torus():
    with pytest.raises(ArgumentError):
        run_experiment(_config("symplectic", n=2, N=8))


@pytest.mark.slow
def test_symplectic():
    result = run_experiment(_config("symplectic", N=32, params="{amplitudes: [0.1, 0.15]}"))
    assert result.checks["christoffel_order"]
    assert all(result.checks[f"pipeline[{amplitude:g}]"] for amplitude in (0.1, 0.15))
    assert "C8_stable" in result.controls
    assert "C8_stable" not in result.checks
    assert result.passed
    header, rows = result.tables["family"]
    assert header == ("amplitude", "sup_phi", "l1_phi", "C_8")
    assert len(rows) == 2
