import json

import numpy as np
import pytest

import src.sinisterness as sinis_module
from src.cli import (
    EXIT_IDENTITY,
    EXIT_IO,
    EXIT_OK,
    EXIT_VALIDATION,
    build_parser,
    main,
)
from src.states import random_density, werner


def test_analyze_bell(bell, write_state, capsys):
    path = write_state(bell.matrix)
    assert main(["analyze", str(path)]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["sinisterness"] == pytest.approx(-1.0, abs=1e-12)
    assert report["concurrence"] == pytest.approx(1.0, abs=1e-12)
    assert report["classification"] == "sinister"


def test_analyze_maximally_mixed_to_file(write_state, tmp_path, capsys):
    path = write_state(np.eye(4) / 4)
    out = tmp_path / "report.json"
    assert main(["analyze", str(path), "--out", str(out)]) == EXIT_OK
    assert capsys.readouterr().out == ""
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["sinisterness"] == pytest.approx(0.0, abs=1e-15)
    assert report["entangled"] is False


def test_analyze_rejects_bad_trace(write_state, capsys):
    path = write_state(np.eye(4) * 0.9 / 4)
    assert main(["analyze", str(path)]) == EXIT_VALIDATION
    assert "trace" in capsys.readouterr().err


def test_analyze_malformed_and_missing(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    assert main(["analyze", str(bad)]) == EXIT_IO
    assert main(["analyze", str(tmp_path / "missing.json")]) == EXIT_IO
    assert capsys.readouterr().err.count("error [") == 2


def test_scan_writes_csv_to_stdout(capsys):
    assert main(["scan", "--n", "1", "--seed", "3"]) == EXIT_OK
    captured = capsys.readouterr()
    lines = captured.out.splitlines()
    assert lines[0] == "seed,mode,concurrence,sinisterness,purity,separable,violation"
    assert len(lines) == 2
    assert captured.err.startswith("estados: 1")


def test_scan_output_is_byte_identical(tmp_path, capsys):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["scan", "--n", "25", "--seed", "9", "--out", str(first)]) == EXIT_OK
    assert main(["scan", "--n", "25", "--seed", "9", "--out", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    assert "violaciones: 0" in capsys.readouterr().out


def test_scan_json_summary(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    assert main(["scan", "--n", "5", "--seed", "1", "--out", str(out), "--json"]) == EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    assert summary["n"] == 5
    assert summary["total_violations"] == 0


def test_scan_unwritable_output(tmp_path):
    target = tmp_path / "missing_dir" / "scan.csv"
    assert main(["scan", "--n", "1", "--out", str(target)]) == EXIT_IO


def test_scan_rejects_invalid_count():
    assert main(["scan", "--n", "0"]) == EXIT_VALIDATION


def test_simulate_defaults_to_bell(capsys):
    assert main(["simulate", "--shots", "20000", "--seed", "1"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["estimate"]["sinisterness_exact"] == pytest.approx(-1.0)
    assert abs(payload["estimate"]["sinisterness_hat"] + 1) < 0.05
    assert "convergence" not in payload


def test_simulate_werner_with_ladder(capsys):
    argv = ["simulate", "--epsilon", "0.8", "--seed", "2", "--ladder", "200,2000", "--repeats", "5"]
    assert main(argv) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert [row["shots"] for row in payload["convergence"]["rows"]] == [200, 2000]
    assert payload["convergence"]["exact"] == pytest.approx(-0.512)


def test_simulate_rejects_zero_shots():
    assert main(["simulate", "--shots", "0"]) == EXIT_VALIDATION


def test_perturb_werner_path(write_state, capsys):
    target = write_state(random_density(5).matrix, "target.json")
    assert main(["perturb", "--epsilon", "0.8", "--target", str(target)]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["relative_error_ds"] < 1e-5
    assert report["analytic_dc"] is not None


def test_perturb_with_delta_file(write_state, tmp_path, capsys):
    state = write_state(werner(0.8).matrix)
    delta = np.diag([0.25, -0.25, -0.25, 0.25]).astype(complex)
    delta[0, 3] = delta[3, 0] = 0.5
    delta_path = tmp_path / "delta.json"
    delta_path.write_text(
        json.dumps({"delta": [[[z.real, z.imag] for z in row] for row in delta]}), encoding="utf-8"
    )
    assert main(["perturb", str(state), "--delta", str(delta_path)]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["analytic_dc"] == pytest.approx(1.5, abs=1e-8)


def test_perturb_requires_inputs(capsys):
    assert main(["perturb"]) == EXIT_VALIDATION
    assert main(["perturb", "--epsilon", "0"]) == EXIT_VALIDATION


def test_verify_json(capsys):
    assert main(["verify", "--only", "purity", "werner_grid", "--scale", "0.01", "--json"]) == EXIT_OK
    results = json.loads(capsys.readouterr().out)
    assert [r["name"] for r in results] == ["purity", "werner_grid"]
    assert all(r["passed"] for r in results)


def test_verify_reports_failed_identity(monkeypatch, capsys):
    original = sinis_module.g_array
    monkeypatch.setattr(sinis_module, "g_array", lambda rho: 1.1 * original(rho))
    assert main(["verify", "--only", "dual_path", "--scale", "0.001"]) == EXIT_IDENTITY
    assert "FAIL" in capsys.readouterr().out


def test_parser_rejects_unknown_identity():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["verify", "--only", "nope"])
