import json

import pytest

from auxma import ArgumentError, FieldFile, Laboratory, parse_config
from auxma.cli import EXIT_CONFIG, EXIT_FAILED, EXIT_OK, main


@pytest.fixture
def lab():
    lab = Laboratory(field_format="csv")
    yield lab
    lab.close()


def _write(tmp_path, text: str):
    path = tmp_path / "run.yaml"
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_list(capsys):
    assert main(["list"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "linfty" in out
    assert "degiorgi_suite" in out


def test_validate_config(tmp_path, capsys):
    path = _write(tmp_path, "experiment: green\nn: 1\nN: 8\n")
    assert main(["validate-config", "--config", path]) == EXIT_OK
    assert "ok" in capsys.readouterr().out


def test_corrupted_config_exits_with_two(tmp_path):
    path = _write(tmp_path, "experiment: green\nn: 1\nN: -8\n")
    assert main(["validate-config", "--config", path]) == EXIT_CONFIG
    assert main(["green", "--config", path, "--out", str(tmp_path / "out")]) == EXIT_CONFIG
    assert not (tmp_path / "out").exists()


def test_mismatched_subcommand_exits_with_two(tmp_path):
    path = _write(tmp_path, "experiment: green\nn: 1\nN: 8\n")
    assert main(["diameter", "--config", path]) == EXIT_CONFIG


def test_run_writes_a_report(tmp_path):
    path = _write(tmp_path, "experiment: green\nn: 1\nN: 8\n")
    out = tmp_path / "out"
    assert main(["green", "--config", path, "--out", str(out), "--quiet"]) == EXIT_OK

    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert report["experiment"] == "green"
    assert report["passed"] is True
    assert report["config"]["output"] == str(out)


def test_raised_errors_exit_with_one(tmp_path):
    path = _write(tmp_path, "experiment: linfty\nn: 1\nN: 8\nparams: {p: 1.0}\n")
    assert main(["linfty", "--config", path, "--out", str(tmp_path / "out")]) == EXIT_FAILED


def test_seed_override_is_recorded(tmp_path):
    path = _write(tmp_path, "experiment: degiorgi_suite\nn: 1\nN: 8\nparams: {count: 10}\n")
    out = tmp_path / "out"
    assert main(["degiorgi_suite", "--config", path, "--out", str(out), "--seed", "9"]) == EXIT_OK
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert report["config"]["density"]["seed"] == 9
    assert (out / "profiles.csv").read_text(encoding="utf-8").startswith("index,variant,delta0")


def test_laboratory_writes_every_artifact(lab, tmp_path):
    config = parse_config("experiment: linfty\nn: 1\nN: 8\nparams: {dump_fields: true}\n").resolved(out=tmp_path)
    result = lab.run(config)
    assert result.passed

    names = sorted(path.name for path in tmp_path.iterdir())
    assert names == ["F.field", "phi.field", "profile.csv", "report.json"]
    assert (tmp_path / "profile.csv").read_text(encoding="utf-8").splitlines()[0] == "s,phi,A"

    dump = FieldFile.decode((tmp_path / "phi.field").read_bytes())
    assert dump.format == "csv"
    assert dump.field.values.shape == (8, 8)


def test_run_many_numbers_shared_directories(lab, tmp_path):
    config = parse_config("experiment: degiorgi_suite\nn: 1\nN: 8\nparams: {count: 10}\n").resolved(out=tmp_path)
    results = lab.run_many([config, config.resolved(seed=1, out=tmp_path)], concurrency=2)
    assert all(result.passed for result in results)
    assert (tmp_path / "000" / "report.json").exists()
    assert (tmp_path / "001" / "report.json").exists()


def test_run_many_needs_a_positive_concurrency(lab):
    with pytest.raises(ArgumentError):
        lab.run_many([], concurrency=0)
