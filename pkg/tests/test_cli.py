import json

import jsonschema
import pytest

from rmuq import cli
from rmuq.report import report_schema


def run(tmp_path, *args, out="out"):
    target = tmp_path / out
    code = cli.run([*args, "--out", str(target)])
    return code, target


def test_dice_writes_valid_report(tmp_path, capsys):
    code, out = run(tmp_path, "dice")
    assert code == cli.EXIT_OK
    report = json.loads((out / "report.json").read_text())
    jsonschema.validate(report, report_schema())
    assert report["metadata"]["command"] == "dice"
    assert (out / "dice.csv").read_text().splitlines()[0] == "index,low,high,mean,sides"
    assert "PASS" in capsys.readouterr().out


def test_json_tables_and_svg(tmp_path):
    code, out = run(tmp_path, "maxent", "--seed", "0", "--format", "json", "--svg")
    assert code == cli.EXIT_OK
    table = json.loads((out / "density.json").read_text())
    assert table["columns"] == ["x", "density", "reference"]
    assert (out / "density.svg").read_text().startswith("<svg")


def test_verdict_failure_exit_code(tmp_path):
    code, out = run(tmp_path, "example", "gpr", "--seed", "0")
    assert code == cli.EXIT_VERDICT
    jsonschema.validate(json.loads((out / "report.json").read_text()), report_schema())


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"seed": 1, "colour": "red"}))
    assert run(tmp_path, "dice", "--config", str(bad))[0] == cli.EXIT_CONFIG
    params = tmp_path / "params.json"
    params.write_text(json.dumps({"params": {"nonsense": 1}}))
    assert run(tmp_path, "dice", "--config", str(params))[0] == cli.EXIT_CONFIG
    assert run(tmp_path, "laplace")[0] == cli.EXIT_CONFIG
    assert run(tmp_path, "dice", "--seed", "-1")[0] == cli.EXIT_CONFIG
    assert run(tmp_path, "construct", "--seed", "0", "--name", "bogus")[0] == cli.EXIT_CONFIG
    assert cli.run(["frobnicate"]) == cli.EXIT_CONFIG
    (tmp_path / "broken.json").write_text("{")
    assert run(tmp_path, "dice", "--config", str(tmp_path / "broken.json"))[0] == cli.EXIT_CONFIG


def test_numerical_failure_exit_code(tmp_path, monkeypatch):
    def boom(*args):
        raise ArithmeticError("overflow")

    monkeypatch.setitem(cli.COMMANDS, "dice", boom)
    assert run(tmp_path, "dice")[0] == cli.EXIT_NUMERIC


def test_config_file_supplies_run_keys(tmp_path, monkeypatch):
    # the run writes the override into os.environ; setting it here lets monkeypatch restore it
    monkeypatch.setenv("RMUQ_QUAD_NODES", "64")
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"seed": 3, "nodes": 48, "format": "json", "params": {"n": 6}}))
    code, out = run(tmp_path, "maxent", "--config", str(cfg))
    assert code == cli.EXIT_OK
    report = json.loads((out / "report.json").read_text())
    assert report["metadata"]["seed"] == 3
    assert report["metadata"]["config"]["n"] == 6
    assert (out / "density.json").exists()


def test_timestamp_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    _, out = run(tmp_path, "field")
    assert json.loads((out / "report.json").read_text())["metadata"]["timestamp"] == 1700000000


def artifacts(path):
    return {p.name: p.read_bytes() for p in sorted(path.iterdir())}


@pytest.mark.parametrize(
    "args",
    [
        ("dice",),
        ("field",),
        ("laplace", "--seed", "5", "--reps", "5000"),
        ("construct", "--seed", "5", "--reps", "5000", "--name", "negative_binomial"),
    ],
)
def test_threads_do_not_change_artifacts(tmp_path, args):
    _, one = run(tmp_path, *args, "--threads", "1", out="one")
    _, two = run(tmp_path, *args, "--threads", "2", out="two")
    assert artifacts(one) == artifacts(two)


def test_version(capsys):
    assert cli.run(["--version"]) == cli.EXIT_OK
    assert "rmuq" in capsys.readouterr().out
