from pathlib import Path

import pytest

from auxma import ConfigError, ExperimentName, OperatorKind, load_config, parse_config
from auxma.config import OUT_DIR_ENV

VALID = """\
experiment: linfty
n: 2
N: 16
operator: {kind: hessian, k: 2}
density: {recipe: random, amplitude: 0.3, seed: 7, modes: 2}
tolerances: {residual: 1.0e-10, phi: 1.0e-6}
params: {ell: 32}
output: runs/linfty
"""


def _error(text: str, experiment=None) -> ConfigError:
    with pytest.raises(ConfigError) as info:
        parse_config(text, experiment)
    return info.value


def test_valid_config():
    config = parse_config(VALID)
    assert config.experiment is ExperimentName.LINFTY
    assert (config.n, config.N) == (2, 16)
    assert config.operator.kind is OperatorKind.HESSIAN
    assert config.operator.degree == 2
    assert config.density.seed == 7
    assert config.param("ell") == 32
    assert config.param("missing", 5) == 5


def test_subcommand_fills_in_the_experiment():
    config = parse_config("n: 1\nN: 8\n", "green")
    assert config.experiment is ExperimentName.GREEN
    assert config.operator.kind is OperatorKind.MONGE_AMPERE


def test_negative_size_names_its_line():
    error = _error("experiment: linfty\nn: 2\nN: -4\n")
    assert error.field == "N"
    assert error.line == 3


def test_odd_size_is_rejected():
    error = _error("experiment: linfty\nn: 1\nN: 9\n")
    assert error.field == "N"
    assert error.line == 3


def test_unknown_key():
    error = _error(VALID + "solver: gmres\n")
    assert error.field == "solver"
    assert error.line == 9


def test_mismatched_subcommand():
    error = _error(VALID, "green")
    assert error.field == "experiment"
    assert error.line == 1
    assert _error(VALID, "nonsense").field == "experiment"


def test_degree_above_dimension():
    error = _error("experiment: linfty\nn: 2\nN: 8\noperator: {kind: pma, p: 3}\n")
    assert error.field == "operator"
    assert error.line == 4


def test_degree_is_required_off_monge_ampere():
    assert _error("experiment: linfty\nn: 2\nN: 8\noperator:\n  kind: hessian\n").field == "operator"


def test_nested_field_errors():
    error = _error("experiment: linfty\nn: 1\nN: 8\ntolerances:\n  residual: -1.0\n")
    assert error.field == "tolerances.residual"
    assert error.line == 5

    error = _error("experiment: linfty\nn: 1\nN: 8\ndensity:\n  recipe: spiky\n")
    assert error.field == "density.recipe"


def test_invalid_yaml():
    error = _error("experiment: linfty\nn: [1, 2\nN: 8\n")
    assert error.field == "yaml"
    assert error.line is not None


def test_missing_experiment():
    assert _error("n: 1\nN: 8\n").field == "experiment"


def test_output_precedence(monkeypatch, tmp_path):
    config = parse_config(VALID)
    monkeypatch.delenv(OUT_DIR_ENV, raising=False)
    assert config.resolved().output_dir() == Path("runs/linfty")

    monkeypatch.setenv(OUT_DIR_ENV, str(tmp_path / "env"))
    assert config.resolved().output_dir() == tmp_path / "env" / "linfty"
    assert config.resolved(out=tmp_path / "cli").output_dir() == tmp_path / "cli"


def test_default_output_directory(monkeypatch):
    monkeypatch.delenv(OUT_DIR_ENV, raising=False)
    config = parse_config("experiment: green\nn: 1\nN: 8\n")
    assert config.resolved().output_dir() == Path("auxma-out") / "green"


def test_seed_override():
    config = parse_config(VALID).resolved(seed=11)
    assert config.density.seed == 11
    with pytest.raises(ConfigError):
        parse_config(VALID).resolved(seed=-1)


def test_load_config(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text(VALID, encoding="utf-8")
    assert load_config(path).to_json() == parse_config(VALID).to_json()
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.yaml")
