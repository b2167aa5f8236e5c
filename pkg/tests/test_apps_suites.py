import pytest

from rmuq.apps.suites import SUITES, example_suites, resolve_config
from rmuq.errors import ConfigError
from rmuq.report import emit_plot_data


def test_registry():
    expected = {"sympoly", "bernoulli", "ishigami", "gpr", "classifier", "cluster", "wiener", "rct", "dsa", "graph", "ising", "corrpoly"}
    assert expected <= set(SUITES)


def test_unknown_keys_and_names():
    with pytest.raises(ConfigError):
        resolve_config({"a": 1}, {"b": 2})
    assert resolve_config({"a": 1}, {"a": 3}) == {"a": 3}
    with pytest.raises(ConfigError):
        example_suites("nope")
    with pytest.raises(ConfigError):
        example_suites("rct", {"bogus": 1})


@pytest.mark.parametrize("name", ["sympoly", "bernoulli", "rct", "ising", "corrpoly", "dsa"])
def test_fast_suites_pass(name):
    rep = example_suites(name, seed=None)
    failed = [v.line() for v in rep.verdicts if not v.passed]
    assert not failed, failed
    assert rep.verdicts


def test_plot_tables():
    t = emit_plot_data("line", [[0, 1], [1, 2]])
    assert t.columns == ["x", "y"]
    assert t.to_csv().splitlines()[1] == "0,1"
    with pytest.raises(ValueError):
        emit_plot_data("line", [[0, 1, 2]])
    with pytest.raises(ValueError):
        emit_plot_data("pie", [])
