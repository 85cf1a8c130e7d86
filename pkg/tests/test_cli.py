import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from gicdesign.cli import main

seed = 777


def run_cli(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def write_sensor_csv(path, y):
    """Sensor batch (p, n) -> CSV with re_i/im_i columns, one row per sample."""
    p = y.shape[0]
    header = [f"{part}_{i}" for i in range(p) for part in ("re", "im")]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for t in range(y.shape[1]):
            row = []
            for i in range(p):
                row += [f"{y[i, t].real:.9g}", f"{y[i, t].imag:.9g}"]
            w.writerow(row)


def write_observation_csv(path, y):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["re", "im"])
        for v in y:
            w.writerow([f"{v.real:.9g}", f"{v.imag:.9g}"])


@pytest.fixture
def sensor_file(tmp_path):
    """p=4 batch carrying two strong signals in noise."""
    rng = np.random.default_rng(seed)
    p, q, n = 4, 2, 240
    h = rng.standard_normal((p, q)) + 1j * rng.standard_normal((p, q))
    z = rng.standard_normal((q, n)) + 1j * rng.standard_normal((q, n))
    noise = math.sqrt(0.5) * (rng.standard_normal((p, n)) + 1j * rng.standard_normal((p, n)))
    y = 3.0 * (h @ z) + noise
    path = tmp_path / "sensors.csv"
    write_sensor_csv(path, y)
    return str(path)


@pytest.fixture
def observation_file(tmp_path):
    rng = np.random.default_rng(seed + 1)
    n = 400
    i = np.arange(1, n + 1)
    y = np.zeros(n, dtype=complex)
    for l in range(3):
        y += np.exp(1j * 2 * np.pi * (0.2 + l / n) * i)
    y += 0.01 * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    path = tmp_path / "obs.csv"
    write_observation_csv(path, y)
    return str(path)


# -- design ------------------------------------------------------------------


def test_design_glm(capsys):
    rc, out, _ = run_cli(capsys, "design", "glm", "--n", "1000", "--pover-max", "0.05")
    assert rc == 0
    payload = json.loads(out)
    assert payload["nu"] == pytest.approx(2.512428379704188, rel=1e-9)
    assert payload["i_max"] == 2
    assert abs(payload["predicted_pover"] - 0.05) <= 1e-9
    assert payload["manifest"]["command"] == "design glm"


def test_design_glm_rejects_bad_target(capsys):
    rc, _, err = run_cli(capsys, "design", "glm", "--n", "1000", "--pover-max", "1.5")
    assert rc == 2
    assert "error:" in err


def test_design_source_enum_deterministic(capsys):
    argv = ["design", "source-enum", "--p", "8", "--n", "1000", "--qmax", "4",
            "--pover-max", "0.05", "--backend", "asymptotic", "--seed", "7"]
    rc1, out1, _ = run_cli(capsys, *argv)
    rc2, out2, _ = run_cli(capsys, *argv)
    assert rc1 == rc2 == 0
    a, b = json.loads(out1), json.loads(out2)
    a["manifest"].pop("timestamp")
    b["manifest"].pop("timestamp")
    assert a == b
    assert set(a) == {"nu", "q_star", "v_threshold", "predicted_pover", "backend", "manifest"}
    assert a["backend"] == "asymptotic"
    assert a["manifest"]["seed"] == 7


def test_design_source_enum_infeasible(capsys):
    rc, _, err = run_cli(capsys, "design", "source-enum", "--p", "3", "--n", "8",
                         "--qmax", "1", "--pover-max", "1e-9", "--mc-trials", "20000")
    assert rc == 2
    assert "infeasible" in err


# -- select ------------------------------------------------------------------


def test_select_source_enum(capsys, sensor_file):
    rc, out, _ = run_cli(capsys, "select", "source-enum", "--input", sensor_file,
                         "--penalty", "bic", "--qmax", "3")
    assert rc == 0
    payload = json.loads(out)
    assert payload["selected"] == 2
    assert len(payload["table"]) == 4
    for row in payload["table"]:
        assert row["total"] == pytest.approx(row["minus2loglik"] + row["penalty"], rel=1e-12)
    assert payload["manifest"]["params"]["p"] == 4
    assert payload["manifest"]["params"]["n"] == 240


def test_select_zero_penalty_runs_to_qmax(capsys, sensor_file):
    rc, out, _ = run_cli(capsys, "select", "source-enum", "--input", sensor_file,
                         "--penalty", "gic:0", "--qmax", "3")
    assert rc == 0
    assert json.loads(out)["selected"] == 3


def test_select_parses_gic_weight(capsys, sensor_file):
    rc, out, _ = run_cli(capsys, "select", "source-enum", "--input", sensor_file,
                         "--penalty", "gic:2.281", "--qmax", "3")
    assert rc == 0
    payload = json.loads(out)
    assert payload["nu"] == 2.281
    assert payload["manifest"]["params"]["penalty"] == "gic:2.281"


def test_select_sinusoids(capsys, observation_file):
    rc, out, _ = run_cli(capsys, "select", "sinusoids", "--input", observation_file,
                         "--penalty", "bic", "--qmax", "5")
    assert rc == 0
    assert json.loads(out)["selected"] == 3


@pytest.mark.parametrize(
    "content",
    [
        "wrong,header\n1,2\n",                          # bad header
        "re_0,im_0,re_1,im_1\n1,2,3\n",                 # ragged row
        "re_0,im_0,re_1,im_1\n1,2,x,4\n",               # non-numeric
        "re_0,im_0,re_1,im_1\n",                        # no data rows
        "",                                              # empty file
        "re_0,im_0,re_1\n1,2,3\n",                      # odd column count
    ],
)
def test_select_malformed_csv(capsys, tmp_path, content):
    path = tmp_path / "bad.csv"
    path.write_text(content)
    rc, _, err = run_cli(capsys, "select", "source-enum", "--input", str(path),
                         "--penalty", "aic", "--qmax", "1")
    assert rc == 3
    assert "error:" in err


def test_select_too_few_samples(capsys, tmp_path):
    # 2 samples for 3 sensors cannot form a usable covariance
    path = tmp_path / "short.csv"
    header = "re_0,im_0,re_1,im_1,re_2,im_2"
    path.write_text(header + "\n" + "1,0,0,1,1,1\n0,1,1,0,1,1\n")
    rc, _, err = run_cli(capsys, "select", "source-enum", "--input", str(path),
                         "--penalty", "aic", "--qmax", "2")
    assert rc == 3


def test_select_missing_file(capsys):
    rc, _, err = run_cli(capsys, "select", "sinusoids", "--input", "/nonexistent.csv",
                         "--penalty", "aic", "--qmax", "2")
    assert rc == 3


# -- simulate ----------------------------------------------------------------

SIM_ARGS = ["simulate", "--problem", "sinusoids", "--q", "2", "--n", "256",
            "--qmax", "4", "--penalty", "aic", "--snr", "-12",
            "--trials", "100", "--seed", "5"]


def test_simulate_csv_and_manifest(capsys):
    rc, out, err = run_cli(capsys, *SIM_ARGS)
    assert rc == 0
    lines = out.splitlines()
    assert lines[0] == "snr_db,trials,p_under,p_c,p_over,ci_under,ci_c,ci_over"
    assert len(lines) == 2
    manifest = json.loads(err)["manifest"]
    assert manifest["params"]["trials"] == 100
    assert manifest["wide_ci"] is True      # 100 trials cannot pin these rates down


def test_simulate_deterministic(capsys):
    _, out1, _ = run_cli(capsys, *SIM_ARGS)
    _, out2, _ = run_cli(capsys, *SIM_ARGS)
    assert out1 == out2


def test_simulate_negative_snr_values(capsys):
    argv = SIM_ARGS[:11] + ["--snr", "-12", "-6", "--trials", "100", "--seed", "5"]
    rc, out, _ = run_cli(capsys, *argv)
    assert rc == 0
    assert len(out.splitlines()) == 3


def test_simulate_output_file(capsys, tmp_path):
    path = tmp_path / "sweep.csv"
    rc, out, err = run_cli(capsys, *SIM_ARGS, "--output", str(path))
    assert rc == 0
    assert err == ""
    payload = json.loads(out)
    assert payload["output"] == str(path)
    _, direct, _ = run_cli(capsys, *SIM_ARGS)
    assert path.read_text() == direct


def test_simulate_overlay_column(capsys):
    rc, out, err = run_cli(capsys, *SIM_ARGS, "--overlay")
    assert rc == 0
    lines = out.splitlines()
    assert lines[0].endswith(",p_over_analytic")
    manifest = json.loads(err)["manifest"]
    assert "pover_ub" in manifest["overlay"]


def test_simulate_preset_fills_defaults(capsys):
    rc, out, _ = run_cli(capsys, "simulate", "--preset", "fig7", "--trials", "100",
                         "--seed", "1", "--snr", "-15")
    assert rc == 0
    assert len(out.splitlines()) == 2


def test_simulate_missing_options(capsys):
    rc, _, err = run_cli(capsys, "simulate", "--problem", "sinusoids", "--trials", "100")
    assert rc == 2
    assert "missing required" in err


# -- ustat -------------------------------------------------------------------


def test_ustat_csv(capsys):
    rc, out, err = run_cli(capsys, "ustat", "--p-prime", "3", "--n", "8",
                           "--mc-trials", "30000", "--empirical-trials", "20000")
    assert rc == 0
    lines = out.splitlines()
    assert lines[0] == "x,cdf_approx,cdf_empirical"
    xs, approx, emp = [], [], []
    for line in lines[1:]:
        x, a, e = (float(v) for v in line.split(","))
        xs.append(x)
        approx.append(a)
        emp.append(e)
    assert xs[0] < 1 / 3          # grid pads below the support edge
    assert approx[0] < 0.01
    assert xs[-1] == 1.0
    assert approx[-1] == pytest.approx(1.0, abs=1e-6)
    assert np.all(np.diff(approx) >= 0)
    assert max(abs(a - e) for a, e in zip(approx, emp)) <= 0.03


def test_ustat_without_empirical(capsys):
    rc, out, _ = run_cli(capsys, "ustat", "--p-prime", "3", "--n", "8",
                         "--mc-trials", "30000")
    assert rc == 0
    assert out.splitlines()[0] == "x,cdf_approx"


# -- process-level behavior --------------------------------------------------


def cli_proc(*argv):
    return subprocess.run([sys.executable, "-m", "gicdesign.cli", *argv],
                          capture_output=True, text=True)


def test_help_exits_zero():
    proc = cli_proc("--help")
    assert proc.returncode == 0
    assert "design" in proc.stdout


def test_unknown_preset_exits_two():
    proc = cli_proc("simulate", "--preset", "fig99")
    assert proc.returncode == 2


def test_console_script_installed():
    proc = subprocess.run(["gicdesign", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
