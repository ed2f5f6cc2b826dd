from __future__ import annotations

import json

import numpy as np
import pytest

from ellstab import rendering, storage
from ellstab.errors import ConfigInvalid
from ellstab.main import main
from ellstab.models import CheckRecord, EnvelopeParams, VerificationReport
from ellstab.services import envelopes, suite

PARAMS = {
    "q": 0.3,
    "a_log": [[0.7, 0.4], [-0.5, -0.9], [0.1, 1.7]],
    "hbar_half_log": [0.18, 0.3],
    "z_log": [-1.1, 0.8],
}


@pytest.fixture
def params_file(tmp_path):
    path = tmp_path / "params.json"
    path.write_text(json.dumps(PARAMS), encoding="utf-8")
    return path


def test_missing_file_is_config_invalid(tmp_path) -> None:
    with pytest.raises(ConfigInvalid, match="not found"):
        storage.load_params(tmp_path / "absent.json")


def test_malformed_json_is_config_invalid(tmp_path) -> None:
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigInvalid, match="not valid JSON"):
        storage.load_params(path)


def test_top_level_must_be_an_object(tmp_path) -> None:
    path = tmp_path / "list.json"
    path.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigInvalid):
        storage.read_json(path)


def test_params_document_without_a_is_rejected() -> None:
    with pytest.raises(ConfigInvalid):
        EnvelopeParams.from_dict({"q": 0.3})


def test_matrix_csv_keeps_full_precision(tmp_path, params_file) -> None:
    p = EnvelopeParams.from_dict(storage.load_params(params_file))
    matrix = envelopes.restriction_matrix_tpn(p)
    path = tmp_path / "out" / "matrix.csv"
    storage.write_matrix_csv(path, matrix.basis, matrix.entries)
    header = path.read_text(encoding="utf-8").splitlines()[0]
    assert header == ",F1,F2,F3"
    assert np.array_equal(np.array(storage.read_matrix_csv(path)), matrix.entries)


def test_report_rendering_lists_failures_only() -> None:
    report = VerificationReport(seed=4, suites=["theta"])
    report.add(CheckRecord.evaluate("theta/odd/000", 1e-15, 1e-12))
    report.add(CheckRecord.evaluate("theta/quasi/000", 1e-3, 1e-12))
    text = rendering.format_report(report)
    assert text.splitlines()[0] == "1/2 checks passed (seed 4, suites: theta)"
    assert "theta/quasi/000" in text
    assert "theta/odd/000" not in text
    assert "theta/odd/000" in rendering.format_report(report, show_all=True)


def test_cli_theta_prints_json(capsys) -> None:
    main(["theta", "--u", "0.3+0.2j", "--q", "0.25", "--shift", "1"])
    data = json.loads(capsys.readouterr().out)
    assert set(data) == {"u", "q", "theta", "phi", "theta_shifted"}


def test_cli_stab_writes_matrix(tmp_path, params_file, capsys) -> None:
    out = tmp_path / "stab.json"
    csv_path = tmp_path / "stab.csv"
    main(["stab", "--params", str(params_file), "--chamber", "2,1,3", "--out", str(out), "--csv", str(csv_path)])
    data = json.loads(out.read_text(encoding="utf-8"))
    assert data["basis"] == ["F2", "F1", "F3"]
    assert csv_path.exists()
    assert "Wrote 3x3" in capsys.readouterr().out


def test_cli_vertex_table(tmp_path, params_file) -> None:
    out = tmp_path / "vertex.json"
    main(["vertex", "--params", str(params_file), "--order", "5", "--k", "2", "--out", str(out)])
    data = json.loads(out.read_text(encoding="utf-8"))
    assert [entry["fixed_point"] for entry in data["fixed_points"]] == [2]
    assert data["fixed_points"][0]["order"] == 5


def test_cli_missing_params_exits_with_one(tmp_path, capsys) -> None:
    with pytest.raises(SystemExit) as info:
        main(["stab", "--params", str(tmp_path / "absent.json")])
    assert info.value.code == 1
    assert "not found" in capsys.readouterr().out


def test_cli_mismatched_n_exits_with_one(params_file) -> None:
    with pytest.raises(SystemExit) as info:
        main(["stab", "--params", str(params_file), "--n", "4"])
    assert info.value.code == 1


def test_cli_failed_checks_exit_with_two(tmp_path, monkeypatch: pytest.MonkeyPatch, capsys) -> None:
    monkeypatch.setattr(suite, "theta_suite", lambda seed: [lambda: [CheckRecord.evaluate("theta/bad", 1.0, 0.1)]])
    out = tmp_path / "report.json"
    with pytest.raises(SystemExit) as info:
        main(["verify", "--suite", "theta", "--out", str(out)])
    assert info.value.code == 2
    assert out.exists()
    assert "theta/bad" in capsys.readouterr().out


def test_cli_verify_passes(tmp_path, capsys) -> None:
    out = tmp_path / "report.json"
    main(["verify", "--suite", "theta", "--seed", "9", "--out", str(out)])
    assert json.loads(out.read_text(encoding="utf-8"))["summary"]["failed"] == 0
    assert "All 400 checks passed" in capsys.readouterr().out


def test_cli_limits_growth(tmp_path) -> None:
    out = tmp_path / "limits.json"
    main(["limits", "--kind", "growth", "--N", "2", "--alpha", "0.3", "--out", str(out)])
    data = json.loads(out.read_text(encoding="utf-8"))
    assert data["summary"]["failed"] == 0


def test_cli_rejects_unknown_subcommand() -> None:
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2
