import json

import pandas as pd
import pytest

from src.cli import build_parser, run_cli


@pytest.fixture(autouse=True)
def in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)


def _report(path):
    return json.loads(path.read_text())


def test_parser_knows_every_command():
    parser = build_parser()
    args = parser.parse_args(["kronecker-certify", "--N", "3", "--q", "4"])
    assert args.N == 3 and args.q == 4
    with pytest.raises(SystemExit):
        parser.parse_args(["not-a-command"])


def test_certify_independent_frequencies(tmp_path, capsys):
    out = tmp_path / "certify.json"
    assert run_cli(["kronecker-certify", "--N", "3", "--q", "4", "--output", str(out)]) == 0
    report = _report(out)
    assert report["sum_abs"] == "256"
    assert report["target"] == "256"
    assert report["collisions"] == 0
    printed = capsys.readouterr().out
    assert "KRONECKER-CERTIFY REPORT" in printed
    assert "✅ PASSED" in printed


def test_certify_cancellation_fails(tmp_path, configs):
    out = tmp_path / "cancel.json"
    code = run_cli(
        ["kronecker-certify", "--config", str(configs / "kronecker_certify_cancellation.json"), "--output", str(out), "--quiet"]
    )
    assert code == 1
    report = _report(out)
    assert report["sum_abs"] == "1"
    assert report["strict_deficit"] is True


def test_default_output_location(tmp_path):
    assert run_cli(["kronecker-certify", "--N", "2", "--q", "2", "--quiet"]) == 0
    assert (tmp_path / "reports" / "kronecker-certify.json").exists()


def test_resource_cap_exit_code():
    assert run_cli(["kronecker-certify", "--N", "8", "--q", "9", "--quiet"]) == 3


def test_bad_n_is_a_configuration_error():
    assert run_cli(["kronecker-certify", "--N", "0", "--quiet"]) == 2


def test_malformed_config(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run_cli(["poisson-check", "--config", str(bad)]) == 2
    assert "ConfigurationError" in capsys.readouterr().err


def test_missing_config(tmp_path):
    assert run_cli(["poisson-check", "--config", str(tmp_path / "nowhere.json")]) == 2


def test_config_without_spec(tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text("{}")
    assert run_cli(["theorem3", "--config", str(empty)]) == 2


def test_poisson_check_on_a_bundled_config(tmp_path, configs):
    out = tmp_path / "poisson.json"
    assert run_cli(["poisson-check", "--config", str(configs / "poisson_unit_comb.json"), "--output", str(out), "--quiet"]) == 0
    assert _report(out)["passed"] is True


def test_parseval_writes_a_series(tmp_path, configs):
    out, csv = tmp_path / "parseval.json", tmp_path / "parseval.csv"
    code = run_cli(
        ["parseval", "--config", str(configs / "parseval_sqrt2.json"), "--output", str(out), "--csv", str(csv), "--quiet"]
    )
    assert code == 0
    frame = pd.read_csv(csv)
    assert list(frame.columns) == ["r", "value"]
    assert frame["r"].tolist() == [100, 1000, 10000]
    assert frame["value"].iloc[-1] == pytest.approx(5.0, abs=5e-3)


def test_growth_commands(tmp_path, configs):
    assert run_cli(["growth", "--config", str(configs / "growth_unit_comb.json"), "--quiet"]) == 0
    report = _report(tmp_path / "reports" / "growth.json")
    assert report["fitted_exponent"] == pytest.approx(1.0, abs=0.05)
    assert run_cli(["growth", "--config", str(configs / "growth_exponential.json"), "--quiet"]) == 0
    assert _report(tmp_path / "reports" / "growth.json")["polynomial"] is False


def test_relations_command(tmp_path, configs):
    out = tmp_path / "relations.json"
    config = configs / "kronecker_relations_unsolvable.json"
    assert run_cli(["kronecker-relations", "--config", str(config), "--output", str(out), "--quiet"]) == 0
    report = _report(out)
    assert report["solvable"] is False
    assert report["violations"] == [[2, -1]]


def test_translation_bound_command(tmp_path, configs):
    out = tmp_path / "tb.json"
    config = configs / "translation_bound_unit_square.json"
    assert run_cli(["translation-bound", "--config", str(config), "--output", str(out), "--quiet"]) == 0
    assert _report(out)["sup_estimate"] >= 4.0


def test_same_seed_same_bytes(tmp_path, configs):
    config = str(configs / "almost_periods_sqrt2.json")
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert run_cli(["almost-periods", "--config", config, "--seed", "11", "--output", str(first), "--quiet"]) == 0
    assert run_cli(["almost-periods", "--config", config, "--seed", "11", "--output", str(second), "--quiet"]) == 0
    assert first.read_bytes() == second.read_bytes()
