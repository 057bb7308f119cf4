import json
import math

import pytest

from src.app.cli.main import EXIT_FAILED, EXIT_INPUT, EXIT_OK, cli_main


def _write(path, document):
    path.write_text(json.dumps(document), encoding="utf-8")
    return str(path)


def _data_rows(path):
    return len(path.read_text(encoding="utf-8").splitlines()) - 1


@pytest.fixture(scope="module")
def precession_csv(tmp_path_factory):
    """ω = 4, μ = 3 on one period, 10000 steps."""
    root = tmp_path_factory.mktemp("cli")
    spec = _write(root / "cp.json", {
        "family": "constant_precession",
        "params": {"omega": 4, "mu": 3},
        "domain": [0, 2 * math.pi],
        "samples": 10000,
    })
    out = root / "cp.csv"
    assert cli_main(["generate", spec, "--out", str(out)]) == EXIT_OK
    return out


def test_generate_writes_one_row_per_node(precession_csv):
    assert _data_rows(precession_csv) == 10001


def test_generated_precession_closes(precession_csv, capsys):
    assert cli_main(["verify", str(precession_csv), "--checks", "closure", "hyperboloid"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert [c["name"] for c in report["checks"]] == ["closure", "hyperboloid"]
    assert all(c["passed"] for c in report["checks"])


def test_generate_to_stdout(tmp_path, capsys):
    spec = _write(tmp_path / "helix.json", {
        "family": "helix",
        "params": {"theta": 0.5, "kappa": "1 + s/10"},
        "domain": [0, 1],
        "samples": 16,
    })
    assert cli_main(["generate", spec]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("s,x,y,z,")
    assert len(lines) == 18


def test_open_curve_fails_closure(tmp_path):
    spec = _write(tmp_path / "salkowski.json", {
        "family": "salkowski",
        "params": {"m": 0.5},
        "domain": [-1.5, 1.5],
        "samples": 3000,
    })
    out = tmp_path / "salkowski.csv"
    assert cli_main(["generate", spec, "--out", str(out)]) == EXIT_OK
    assert cli_main(["verify", str(out), "--checks", "closure"]) == EXIT_FAILED


def test_successor_needs_phi0(precession_csv, caplog):
    assert cli_main(["transform", str(precession_csv), "--op", "successor"]) == EXIT_INPUT
    assert "--phi0" in caplog.text


def test_bishop_round_trip(precession_csv, tmp_path):
    bishop = tmp_path / "bishop.csv"
    assert cli_main(["transform", str(precession_csv), "--op", "bishop", "--phi0", "0.3", "--out", str(bishop)]) == EXIT_OK
    assert cli_main(["verify", str(bishop), "--kind", "bishop", "--checks", "orthonormality", "frenet_consistency"]) == EXIT_OK

    back = tmp_path / "back.csv"
    assert cli_main(["transform", str(bishop), "--op", "inverse-bishop", "--out", str(back)]) == EXIT_OK
    assert cli_main(["verify", str(back), "--checks", "orthonormality", "closure"]) == EXIT_OK


def test_successor_output(precession_csv, tmp_path):
    out = tmp_path / "succ.csv"
    assert cli_main(["transform", str(precession_csv), "--op", "successor", "--phi0", "0.0", "--out", str(out)]) == EXIT_OK
    assert _data_rows(out) == 10001
    assert cli_main(["verify", str(out)]) == EXIT_OK


def test_malformed_spec_names_the_field(tmp_path, caplog):
    spec = _write(tmp_path / "bad.json", {"family": "plane", "params": {"kappa": 1}, "domain": [0, 1], "samples": 5})
    assert cli_main(["generate", spec]) == EXIT_INPUT
    assert "samples" in caplog.text


def test_bad_family_parameter_names_the_field(tmp_path, caplog):
    spec = _write(tmp_path / "bad.json", {"family": "helix", "params": {"theta": 0.5}, "domain": [0, 1], "samples": 16})
    assert cli_main(["generate", spec]) == EXIT_INPUT
    assert "params.kappa" in caplog.text


def test_unknown_symbol_in_expression(tmp_path, caplog):
    dev = _write(tmp_path / "dev.json", {"domain": [0, 1], "samples": 16, "kappa": "1 + t", "tau": 0})
    assert cli_main(["solve", dev]) == EXIT_INPUT
    assert "kappa" in caplog.text


def test_invalid_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{", encoding="utf-8")
    assert cli_main(["generate", str(path)]) == EXIT_INPUT


def test_missing_input_file(tmp_path):
    assert cli_main(["verify", str(tmp_path / "nothing.csv")]) == EXIT_INPUT


def test_unknown_operation_is_a_usage_error(precession_csv):
    assert cli_main(["transform", str(precession_csv), "--op", "twist"]) == EXIT_INPUT


def test_solve_writes_samples(tmp_path):
    dev = _write(tmp_path / "dev.json", {"domain": [0, 2], "samples": 200, "kappa": "1", "tau": "s"})
    out = tmp_path / "dev.csv"
    assert cli_main(["solve", dev, "--out", str(out)]) == EXIT_OK
    assert _data_rows(out) == 201


def test_classify_prints_family_and_periodicity(tmp_path, capsys):
    dev = _write(tmp_path / "dev.json", {
        "domain": [0, 2 * math.pi],
        "samples": 1000,
        "kappa": "4*cos(3*s)",
        "tau": "4*sin(3*s)",
    })
    assert cli_main(["classify", dev, "--period", str(2 * math.pi / 3)]) == EXIT_OK
    result = json.loads(capsys.readouterr().out)
    assert result["classification"]["family"] == "slant_helix"
    assert result["classification"]["cot_theta"] == pytest.approx(0.75, abs=1e-6)
    assert result["periodicity"]["periodic"]
