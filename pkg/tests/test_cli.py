import csv
import io
import json

import pytest

from twophoton.cli import main, parse_noise_levels, read_config_file


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_probs_hom_ideal(capsys):
    assert run(capsys, "probs") == (0, "p2=0 p1=1 p0=0\n", "")


def test_probs_noon_ideal(capsys):
    assert run(capsys, "probs", "--interferometer", "noon")[1] == "p2=1 p1=0 p0=0\n"


def test_probs_lossy(capsys):
    code, out, _ = run(capsys, "probs", "--gamma", "0.4", "--visibility", "0.9")
    assert "p0=0.16" in out and "p2=0.018" in out


def test_probs_json_with_density(capsys):
    code, out, _ = run(capsys, "probs", "--omega", "0.01", "--format", "json")
    data = json.loads(out)
    assert list(data) == ["config", "omega_p_tau", "p2", "p1", "p0", "omega", "d2", "d1", "d0"]


def test_invalid_parameter_exits_nonzero(capsys):
    code, _, err = run(capsys, "probs", "--gamma", "1.0")
    assert code == 2 and "gamma must lie in [0,1)" in err


def _table(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_sweep_fig1a_anchor(capsys):
    code, out, _ = run(capsys, "sweep", "--preset", "fig1a", "--tau-points", "5")
    rows = _table(out)
    assert code == 0 and "\r\n" in out
    assert float(rows[0]["fi_nonresolved_eps0_theta0"]) == pytest.approx(4e-4, rel=1e-12)
    assert float(rows[0]["qcrb"]) == pytest.approx(4e-4)
    assert "err_resolved_eps1_theta0" in rows[0] and "err_nonresolved_eps0_theta0" not in rows[0]


def test_sweep_fig2_resolved_is_flat(capsys):
    code, out, _ = run(capsys, "sweep", "--preset", "fig2", "--detection", "resolved",
                       "--tau-points", "9")
    values = [float(r["fi_resolved_eps0_theta0"]) for r in _table(out)]
    assert values == pytest.approx([1.0004] * 9, rel=1e-9)


def test_sweep_rows_resolved_dominates(capsys):
    code, out, _ = run(capsys, "sweep", "--preset", "fig1c", "--tau-points", "201")
    for row in _table(out):
        for level in ("eps0_theta0", "eps1_theta0", "eps3_theta0"):
            r, n = float(row[f"fi_resolved_{level}"]), float(row[f"fi_nonresolved_{level}"])
            assert r + float(row[f"err_resolved_{level}"]) >= n * (1 - 1e-11)


def test_sweep_json_and_file(tmp_path, capsys):
    target = tmp_path / "sweep.json"
    code, out, _ = run(capsys, "sweep", "--preset", "fig1b", "--tau-points", "3",
                       "--format", "json", "--out", str(target))
    data = json.loads(target.read_text())
    assert code == 0 and out == ""
    assert list(data) == ["config", "noise_levels", "converged", "columns", "data"]
    assert data["columns"][0] == "omega_p_tau"


def test_unwritable_output(capsys):
    code, _, err = run(capsys, "sweep", "--tau-points", "3", "--out", "/nonexistent/dir/x.csv")
    assert code == 2 and "cannot write" in err


def test_bad_axis(capsys):
    assert run(capsys, "sweep", "--tau-points", "1")[0] == 2
    assert run(capsys, "sweep", "--tau-start", "5", "--tau-stop", "5")[0] == 2


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# lossy run\ngamma = 0.4\nvisibility = 0.9  # trailing comment\n"
                   "interferometer = noon\n")
    assert read_config_file(str(cfg)) == {"gamma": 0.4, "visibility": 0.9,
                                          "interferometer": "noon"}
    code, out, _ = run(capsys, "probs", "--config", str(cfg), "--format", "json")
    assert json.loads(out)["config"]["interferometer"] == "noon"
    code, out, _ = run(capsys, "probs", "--config", str(cfg), "--gamma", "0", "--format", "json")
    assert json.loads(out)["config"]["gamma"] == 0.0
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert run(capsys, "probs", "--config", str(bad))[0] == 2


def test_noise_level_parsing():
    assert parse_noise_levels("0, 1,3") == [(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)]
    assert parse_noise_levels("0:1") == [(0.0, 1.0)]


def test_simulate_degenerate_dip(capsys):
    code, out, _ = run(capsys, "simulate", "--tau-true", "0", "--n-trials", "5",
                       "--n-pairs", "1000")
    report = json.loads(out)["report"]
    assert code == 0
    assert abs(report["tau_hat_mean"]) < 1e-7 and report["tau_hat_std"] < 1e-7


def test_simulate_byte_identical(capsys):
    args = ("simulate", "--visibility", "0.9", "--n-trials", "20", "--n-pairs", "2000",
            "--tau-stop", "300", "--seed", "3")
    first = run(capsys, *args)[1]
    second = run(capsys, *args)[1]
    assert first == second and json.loads(first)["report"]["seed"] == 3


def test_recommend(capsys):
    code, out, _ = run(capsys, "recommend", "--gamma", "0.4", "--visibility", "0.9",
                       "--tau-points", "401")
    assert out.splitlines()[1].split()[1] == "noon_resolved"
    code, out, _ = run(capsys, "recommend", "--gamma", "0.4", "--visibility", "0.9",
                       "--eta-eps-wp", "3", "--tau-points", "401", "--format", "json")
    assert json.loads(out)["ranking"][0]["strategy"].startswith("hom")
    code, out, _ = run(capsys, "recommend", "--visibility", "0", "--tau-points", "11")
    assert out.startswith("no information")


def test_validate_quick(capsys):
    code, out, _ = run(capsys, "validate", "--quick")
    assert code == 0 and out.count("PASS") == len(out.splitlines())
