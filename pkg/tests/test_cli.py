"""Command-line interface."""

import json

import pytest

from eqrf import __version__, cli
from eqrf.acceptance import SuiteResult
from tests.test_study import SCALAR_STUDY


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.mark.parametrize(
    "lam, re, im, value, method",
    [
        ("1", "1", "0", 1.718281828459045, "taylor_series"),
        ("0.5", "0", "0", 1.128379167095513, "taylor_series"),
    ],
)
def test_phi(capsys, lam, re, im, value, method):
    code, out, _ = run(capsys, "phi", "--lambda", lam, "--re", re, "--im", im)
    assert code == 0
    document = json.loads(out)
    assert document["value"]["re"] == pytest.approx(value, rel=1e-14)
    assert document["value"]["im"] == 0.0
    assert document["method"] == method
    assert document["lambda"] == float(lam)
    assert document["z"] == {"re": float(re), "im": float(im)}


def test_phi_asymptotic_branch(capsys):
    code, out, _ = run(capsys, "phi", "--lambda", "1.75", "--re", "-50")
    assert code == 0
    assert json.loads(out)["method"] == "asymptotic_plus_exponential"


def test_phi_domain_error(capsys):
    code, out, err = run(capsys, "phi", "--lambda", "0", "--re", "1")
    assert code == 1
    assert out == ""
    assert err.startswith("error: ")


def test_debug_prints_the_exception(capsys):
    code, _, err = run(capsys, "--debug", "phi", "--lambda", "-1", "--re", "1")
    assert code == 1
    document = json.loads(err)
    assert document["type"] == "PhiDomainError"
    assert any("Traceback" in line for line in document["traceback"])


def test_debug_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("EQRF_DEBUG", "1")
    code, _, err = run(capsys, "phi", "--lambda", "-1", "--re", "1")
    assert code == 1
    assert json.loads(err)["type"] == "PhiDomainError"


def test_missing_arguments_exit_with_usage(capsys):
    with pytest.raises(SystemExit) as exc_info:
        cli.main(["phi", "--re", "1"])
    assert exc_info.value.code == 2
    assert "--lambda" in capsys.readouterr().err


def test_version(capsys):
    with pytest.raises(SystemExit):
        cli.main(["--version"])
    assert __version__ in capsys.readouterr().out


def test_presets(capsys):
    code, out, _ = run(capsys, "presets", "heat")
    assert code == 0
    document = json.loads(out)
    assert list(document) == ["heat"]
    assert document["heat"]["operator"]["size"] == 1000

    code, out, _ = run(capsys, "presets")
    assert set(json.loads(out)) == {"scalar_intro", "perbc", "per", "perrad", "heat"}


def test_study(capsys, tmp_path):
    config = tmp_path / "scalar.json"
    config.write_text(json.dumps({**SCALAR_STUDY, "N": [4, 8, 16]}))
    out_dir = tmp_path / "results"
    code, out, _ = run(capsys, "study", "--config", str(config), "--out", str(out_dir))
    assert code == 0
    assert out.startswith("scalar: ")
    assert (out_dir / "scalar.csv").read_text().startswith("method,formulation,nodes,N,error,seconds\n")
    assert json.loads((out_dir / "scalar.json").read_text())["study"] == "scalar"


def test_invalid_study(capsys, tmp_path):
    config = tmp_path / "bad.json"
    config.write_text(json.dumps({**SCALAR_STUDY, "N": [16, 4]}))
    code, _, err = run(capsys, "study", "--config", str(config), "--out", str(tmp_path))
    assert code == 2
    assert "studies.0.N" in err


class TestAccept:
    def test_failing_suite_exits_nonzero(self, capsys, monkeypatch):
        def fake_run_suite(suite, out_dir=None, debug=False):
            result = SuiteResult(suite)
            result.check("order", True, "2.01")
            result.check("spot value", False, "off by 5%")
            return result

        monkeypatch.setattr(cli, "run_suite", fake_run_suite)
        code, out, _ = run(capsys, "accept", "--suite", "fig4")
        assert code == 1
        lines = out.splitlines()
        assert lines[:2] == ["PASS order: 2.01", "FAIL spot value: off by 5%"]
        assert lines[-1] == "fig4: 1 passed, 1 failed"

    def test_passing_suite(self, capsys, monkeypatch):
        def fake_run_suite(suite, out_dir=None, debug=False):
            result = SuiteResult(suite)
            result.check("recurrence", True)
            return result

        monkeypatch.setattr(cli, "run_suite", fake_run_suite)
        code, out, _ = run(capsys, "accept", "--suite", "props")
        assert code == 0
        assert out.splitlines() == ["PASS recurrence", "props: 1 passed, 0 failed"]

    def test_unknown_suite(self, capsys):
        with pytest.raises(SystemExit):
            cli.main(["accept", "--suite", "fig9"])
        capsys.readouterr()
