"""End-to-end CLI behavior: formats, exit codes, strict config handling."""

import csv
import json

import numpy as np
import pytest

from z2strings.cli import cli_main


def write_config(tmp_path, document, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(document))
    return str(path)


def read_csv(path):
    with open(path, newline="") as handle:
        return list(csv.reader(handle))


CLASSICAL_SCAN = {
    "geometry": {"Lx": 3, "Ly": 2, "bc_x": "open", "bc_y": "open"},
    "charges": [[0, 0], [2, 1]],
    "couplings": {"J_s": 1.5, "J_p": 0.0, "h_z": 0.0},
    "scan": {"param": "h_x", "grid": {"start": 0.5, "stop": 1.5, "step": 0.25}},
}


def test_describe(tmp_path, capsys):
    out = tmp_path / "geom.json"
    code = cli_main(
        ["describe", "--Lx", "5", "--Ly", "2", "--bc-y", "periodic", "--out", str(out)]
    )
    assert code == 0
    document = json.loads(out.read_text())
    assert (document["n_sites"], document["n_links"], document["n_plaquettes"]) == (
        10,
        18,
        8,
    )


def test_describe_stdout(capsys):
    assert cli_main(["describe", "--Lx", "2", "--Ly", "2"]) == 0
    document = json.loads(capsys.readouterr().out)
    assert document["n_links"] == 4


def test_scan_csv(tmp_path):
    out = tmp_path / "rows.csv"
    code = cli_main(
        ["scan", "--config", write_config(tmp_path, CLASSICAL_SCAN), "--out", str(out)]
    )
    assert code == 0
    rows = read_csv(str(out))
    assert rows[0] == ["param", "value", "E0", "dE", "N", "degenerate", "residual"]
    assert len(rows) == 6
    assert all(row[0] == "h_x" for row in rows[1:])
    # classical threshold at 2*1.5/3 = 1.0
    totals = {float(row[1]): float(row[4]) for row in rows[1:]}
    assert totals[0.5] == pytest.approx(0.0, abs=1e-12)
    assert totals[1.5] == pytest.approx(2.0, abs=1e-12)


def test_scan_breaking_flag(tmp_path, capsys):
    code = cli_main(
        ["scan", "--config", write_config(tmp_path, CLASSICAL_SCAN), "--breaking"]
    )
    assert code == 0
    err = capsys.readouterr().err
    assert "breaking at h_x" in err


def test_malformed_json(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"geometry": ')
    assert cli_main(["scan", "--config", str(path)]) == 1
    assert "malformed JSON" in capsys.readouterr().err


def test_unknown_key_named(tmp_path, capsys):
    document = json.loads(json.dumps(CLASSICAL_SCAN))
    document["geometry"]["twist"] = 1
    assert cli_main(["scan", "--config", write_config(tmp_path, document)]) == 1
    assert "twist" in capsys.readouterr().err


def test_missing_keys_listed(tmp_path, capsys):
    document = json.loads(json.dumps(CLASSICAL_SCAN))
    del document["couplings"]["J_s"]
    del document["couplings"]["J_p"]
    assert cli_main(["scan", "--config", write_config(tmp_path, document)]) == 1
    err = capsys.readouterr().err
    assert "J_p" in err and "J_s" in err


def test_missing_config_file(capsys):
    assert cli_main(["scan", "--config", "/nonexistent/cfg.json"]) == 1
    assert "config error" in capsys.readouterr().err


def test_bad_cli_arguments(capsys):
    assert cli_main(["scan"]) == 1
    assert cli_main(["frobnicate"]) == 1
    assert cli_main(["--help"]) == 0
    capsys.readouterr()


def test_ground_state_report(tmp_path):
    config = {
        "geometry": {"Lx": 2, "Ly": 2, "bc_x": "periodic", "bc_y": "periodic"},
        "charges": None,
        "couplings": {"J_s": 1.0, "J_p": 1.0, "h_z": 0.0, "h_x": 0.0},
        "solver": {"levels": 5},
    }
    out = tmp_path / "report.json"
    field_csv = tmp_path / "field.csv"
    code = cli_main(
        [
            "ground-state",
            "--config",
            write_config(tmp_path, config),
            "--out",
            str(out),
            "--field-csv",
            str(field_csv),
        ]
    )
    assert code == 0
    report = json.loads(out.read_text())
    assert report["energy"] == pytest.approx(-8.0, abs=1e-10)
    assert report["degenerate"] is True
    assert report["converged"] is True
    assert report["delta_e"] is None
    assert len(report["energies"]) == 5
    assert np.allclose(report["energies"][:4], -8.0, atol=1e-9)
    rows = read_csv(str(field_csv))
    assert rows[0] == ["link_id", "base_x", "base_y", "direction", "value"]
    assert len(rows) == 9


def test_ground_state_with_charges_reports_delta(tmp_path):
    config = {
        "geometry": {"Lx": 3, "Ly": 2, "bc_x": "open", "bc_y": "open"},
        "charges": [[0, 0], [2, 1]],
        "couplings": {"J_s": 1.5, "J_p": 0.0, "h_z": 0.0, "h_x": 0.6},
    }
    out = tmp_path / "report.json"
    code = cli_main(
        ["ground-state", "--config", write_config(tmp_path, config), "--out", str(out)]
    )
    assert code == 0
    report = json.loads(out.read_text())
    # unbroken string of length 3 at h_x = 0.6
    assert report["delta_e"] == pytest.approx(2 * 0.6 * 3, abs=1e-9)
    assert report["n_total"] == pytest.approx(0.0, abs=1e-10)


def test_ground_state_convergence_log(tmp_path):
    config = {
        "geometry": {"Lx": 2, "Ly": 2, "bc_x": "periodic", "bc_y": "periodic"},
        "charges": None,
        "couplings": {"J_s": 1.3, "J_p": 0.7, "h_z": 0.25, "h_x": 0.45},
    }
    log_csv = tmp_path / "trace.csv"
    code = cli_main(
        [
            "ground-state",
            "--config",
            write_config(tmp_path, config),
            "--out",
            str(tmp_path / "r.json"),
            "--log-convergence",
            str(log_csv),
        ]
    )
    assert code == 0
    rows = read_csv(str(log_csv))
    assert rows[0] == ["iteration", "ritz_value", "residual"]
    assert len(rows) >= 1


def test_solver_failure_exit_code(tmp_path):
    config = {
        "geometry": {"Lx": 4, "Ly": 3, "bc_x": "open", "bc_y": "open"},
        "charges": [[0, 0], [3, 2]],
        "couplings": {"J_s": 2.5, "h_z": 0.0, "h_x": 1.0},
        "scan": {"param": "J_p", "grid": [0.2]},
        "solver": {"max_iter": 2, "tol": 1e-12},
    }
    out = tmp_path / "rows.csv"
    code = cli_main(
        ["scan", "--config", write_config(tmp_path, config), "--out", str(out)]
    )
    assert code == 2
    rows = read_csv(str(out))
    assert len(rows) == 2  # header + the unconverged row is still written


def test_potential_csv(tmp_path):
    config = {
        "geometry": {"Lx": 4, "Ly": 3, "bc_x": "open", "bc_y": "open"},
        "charges": None,
        "couplings": {"J_s": 2.5, "J_p": 0.0, "h_z": 0.0, "h_x": 0.8},
    }
    out = tmp_path / "v.csv"
    code = cli_main(
        [
            "potential",
            "--config",
            write_config(tmp_path, config),
            "--separations",
            "1,2,3",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    rows = read_csv(str(out))
    assert rows[0] == ["R", "E0_charged", "E0_free", "V"]
    potentials = {int(row[0]): float(row[3]) for row in rows[1:]}
    for separation in (1, 2, 3):
        assert potentials[separation] == pytest.approx(
            min(2 * 0.8 * separation, 4 * 2.5), abs=1e-10
        )


def test_potential_rejects_charges(tmp_path, capsys):
    config = {
        "geometry": {"Lx": 4, "Ly": 3, "bc_x": "open", "bc_y": "open"},
        "charges": [[0, 0], [3, 2]],
        "couplings": {"J_s": 2.5, "J_p": 0.0, "h_z": 0.0, "h_x": 0.8},
    }
    code = cli_main(
        ["potential", "--config", write_config(tmp_path, config), "--separations", "1"]
    )
    assert code == 1
    assert "charges" in capsys.readouterr().err


def test_string_model_csv(tmp_path):
    out = tmp_path / "strings.csv"
    assert cli_main(["string-model", "--l1", "3", "--l2", "2", "--out", str(out)]) == 0
    rows = read_csv(str(out))
    assert rows[0] == ["config", "corners", "amplitude", "probability"]
    assert len(rows) == 11
    probabilities = [float(row[3]) for row in rows[1:]]
    assert sum(probabilities) == pytest.approx(1.0, abs=1e-12)
    by_config = {row[0]: int(row[1]) for row in rows[1:]}
    assert by_config["10101"] == 4


def test_string_model_invalid_patch(capsys):
    assert cli_main(["string-model", "--l1", "0", "--l2", "0"]) == 1
    assert "patch" in capsys.readouterr().err
