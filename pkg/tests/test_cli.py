import json
import os
import subprocess
import sys

import pytest

import oracles
from kiriutensil import MaterialSpec, MeasurementSeries, ToolConfig, write_measurements
from kiriutensil.cli import main

HEADER = "delta_x_mm,delta_y_mm,f_k_n,f_b_n,f_a_n,torque_nmm"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def csv_rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    return [dict(zip(header, ln.split(","))) for ln in lines[1:]]


@pytest.fixture
def rest_config(tmp_path):
    """Table I with the band offset matching the similar-triangle rest value."""
    doc = ToolConfig.table1().to_dict()
    doc["geometry"]["band_offset"] = 22.5 / 59.2 * 20.7
    p = tmp_path / "rest.json"
    p.write_text(json.dumps(doc))
    return str(p)


class TestSimulate:
    def test_no_band_rows(self, capsys):
        code, out, err = run(capsys, "simulate", "--preset", "table1", "--no-band",
                             "--from", "0", "--to", "10", "--steps", "3")
        assert code == 0 and err == ""
        lines = out.splitlines()
        assert lines[0] == "# source=simulated"
        assert lines[1] == HEADER
        assert len(lines) == 5
        assert lines[2] == "0.000000000,0.067398649,0.000000000,0.000000000,0.000000000,0.000000000"
        assert lines[4] == "10.000000000,3.868074324,677.950000000,0.000000000,493.049702773,34316.259312975"

    def test_with_band_last_row(self, capsys):
        code, out, _ = run(capsys, "simulate", "--preset", "table1", "--from", "0", "--to", "10",
                           "--steps", "3")
        assert code == 0
        last = csv_rows(out)[-1]
        assert float(last["f_a_n"]) == pytest.approx(oracles.F_A_10_WITH_BAND, abs=5e-10)
        assert last["f_a_n"] == "495.380503536"

    def test_steps_one_is_usage_error(self, capsys):
        code, _, err = run(capsys, "simulate", "--preset", "table1", "--from", "0", "--to", "10",
                           "--steps", "1")
        assert code == 2
        assert err.count("\n") == 1

    def test_range_violation(self, capsys):
        code, out, err = run(capsys, "simulate", "--preset", "table1", "--from", "0", "--to", "30",
                             "--steps", "3")
        assert code == 3 and out == ""
        assert err.count("\n") == 1 and "operating range" in err

    @pytest.mark.parametrize("argv", [
        ["simulate", "--from", "0", "--to", "1", "--steps", "2"],
        ["simulate", "--preset", "table2", "--from", "0", "--to", "1", "--steps", "2"],
        ["simulate", "--preset", "table1", "--from", "x", "--to", "1", "--steps", "2"],
        ["simulate", "--preset", "table1", "--from", "5", "--to", "1", "--steps", "2"],
        ["bogus"],
        [],
    ])
    def test_usage_errors(self, capsys, argv):
        assert run(capsys, *argv)[0] == 2

    def test_config_file(self, capsys, tmp_path):
        p = tmp_path / "c.json"
        p.write_text(ToolConfig.table1().to_json())
        a = run(capsys, "simulate", "--config", str(p), "--from", "0", "--to", "5", "--steps", "2")
        b = run(capsys, "simulate", "--preset", "table1", "--from", "0", "--to", "5", "--steps", "2")
        assert a == b

    def test_bad_units_config(self, capsys, tmp_path):
        doc = ToolConfig.table1().to_dict()
        doc["units"]["length"] = "in"
        p = tmp_path / "c.json"
        p.write_text(json.dumps(doc))
        code, _, err = run(capsys, "simulate", "--config", str(p), "--from", "0", "--to", "5",
                           "--steps", "2")
        assert code == 2 and "unit" in err


class TestInvert:
    def test_zero(self, capsys):
        code, out, _ = run(capsys, "invert", "--preset", "table1", "--no-band", "--force", "0")
        assert code == 0
        doc = json.loads(out)
        assert doc["delta_x_mm"] == 0.0
        assert set(doc) >= {"delta_x_mm", "iterations", "residual_n"}

    def test_round_trip(self, capsys):
        code, out, _ = run(capsys, "invert", "--preset", "table1", "--no-band",
                           "--force", repr(oracles.F_A_10_NO_BAND))
        assert code == 0
        assert json.loads(out)["delta_x_mm"] == pytest.approx(10.0, abs=1e-9)

    def test_above_peak(self, capsys):
        code, out, err = run(capsys, "invert", "--preset", "table1", "--no-band", "--force", "1e5")
        assert code == 3
        doc = json.loads(out)
        assert doc["error"]["peak_force_n"] == pytest.approx(922.4048163502973, rel=1e-12)
        assert "peak force" in err


def write_kk_files(tmp_path, kk=4.55, synthetic=False, scales=(1.0,)):
    paths = []
    for scale in scales:
        for e, shore in ((10.0, "85A"), (14.9, "90A"), (20.0, "95A")):
            for trial in (1, 2, 3):
                s = MeasurementSeries(
                    tuple((x, kk * e * x) for x in range(5, 55, 5)), trial_id=trial,
                    material=MaterialSpec(e, shore), size_scale=scale,
                    label=f"{shore}_{scale}", synthetic=synthetic)
                p = tmp_path / f"{shore}_s{scale}_t{trial}.csv"
                write_measurements(p, [s])
                paths.append(str(p))
    return paths


class TestFit:
    def test_fit_spring(self, capsys, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("delta_x_mm,force_n,trial_id\n1,2,1\n2,4,1\n3,6,1\n")
        code, out, _ = run(capsys, "fit-spring", str(p))
        assert code == 0
        doc = json.loads(out)
        assert doc["constant"] == 2.0 and doc["r_squared"] == 1.0
        assert doc["inputs"] == [{"file": "a.csv", "rows": 3, "series": 1}]
        for key in ("n_points", "max_abs_residual", "free_slope", "free_intercept"):
            assert key in doc

    def test_fit_kk(self, capsys, tmp_path):
        code, out, _ = run(capsys, "fit-kk", *write_kk_files(tmp_path))
        assert code == 0
        doc = json.loads(out)
        assert doc["constant"] == pytest.approx(4.55, rel=1e-12)
        assert doc["n_points"] == 90 and doc["n_series"] == 9

    def test_fit_kk_average(self, capsys, tmp_path):
        code, out, _ = run(capsys, "fit-kk", "--average", *write_kk_files(tmp_path))
        doc = json.loads(out)
        assert code == 0 and doc["n_series"] == 3 and doc["n_trials"] == 9
        assert doc["constant"] == pytest.approx(4.55, rel=1e-12)

    def test_synthetic_guard(self, capsys, tmp_path):
        files = write_kk_files(tmp_path, synthetic=True)
        code, out, err = run(capsys, "fit-kk", *files)
        assert code == 2 and "--allow-synthetic" in err
        assert run(capsys, "fit-kk", "--allow-synthetic", *files)[0] == 0

    def test_simulated_curve_is_not_a_measurement(self, capsys, tmp_path):
        _, out, _ = run(capsys, "simulate", "--preset", "table1", "--from", "0", "--to", "5",
                        "--steps", "2")
        p = tmp_path / "sim.csv"
        p.write_text(out)
        assert run(capsys, "fit-spring", "--allow-synthetic", str(p))[0] == 2

    def test_missing_header(self, capsys, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("1,2,1\n2,4,1\n")
        code, out, err = run(capsys, "fit-spring", str(p))
        assert code == 2 and "line 1" in err
        assert json.loads(out)["error"]["type"] == "CSVFormatError"

    def test_singular(self, capsys, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("delta_x_mm,force_n,trial_id\n0,0,1\n0,1,2\n")
        assert run(capsys, "fit-spring", str(p))[0] == 3

    def test_kk_without_modulus(self, capsys, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("delta_x_mm,force_n,trial_id\n1,2,1\n2,4,1\n")
        assert run(capsys, "fit-kk", str(p))[0] == 2

    def test_scale_report(self, capsys, tmp_path):
        files = write_kk_files(tmp_path, scales=(1.0, 1.25, 1.5))
        code, out, _ = run(capsys, "scale-report", *files)
        doc = json.loads(out)
        assert code == 0 and doc["consistent"] is True and doc["spread"] == 0.0
        assert [g["size_scale"] for g in doc["groups"]] == [1.0, 1.25, 1.5]

    def test_scale_report_one_group(self, capsys, tmp_path):
        assert run(capsys, "scale-report", *write_kk_files(tmp_path))[0] == 3

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "fit-spring", str(tmp_path / "nope.csv"))
        assert code == 2


class TestDesign:
    def test_modulus(self, capsys):
        code, out, _ = run(capsys, "design", "--preset", "table1", "--no-band", "--objective",
                           "modulus", "--force", repr(oracles.F_A_10_NO_BAND), "--at", "10")
        assert code == 0
        assert json.loads(out)["youngs_modulus_mpa"] == pytest.approx(14.9, rel=1e-12)

    def test_band(self, capsys):
        code, out, _ = run(capsys, "design", "--preset", "table1", "--objective", "band",
                           "--force", repr(oracles.F_A_10_WITH_BAND), "--at", "10")
        doc = json.loads(out)
        assert code == 0 and doc["band_stiffness_n_per_mm"] == pytest.approx(2.18, rel=1e-9)
        assert doc["band_unnecessary"] is False

    def test_infeasible(self, capsys):
        code, out, _ = run(capsys, "design", "--preset", "table1", "--objective", "band",
                           "--force", "100", "--at", "10")
        assert code == 3
        assert json.loads(out)["error"]["type"] == "InfeasibleDesignError"


class TestSweepAndTorque:
    def test_singleton_sweep_matches_simulate(self, capsys):
        _, sim, _ = run(capsys, "simulate", "--preset", "table1", "--from", "0", "--to", "10",
                        "--steps", "3")
        code, sweep, _ = run(capsys, "sweep", "--preset", "table1", "--dx", "10")
        assert code == 0
        (row,) = csv_rows(sweep)
        ref = csv_rows(sim)[-1]
        for key in HEADER.split(","):
            assert row[key] == ref[key]
        assert row["error"] == ""

    def test_sweep_domain_cell(self, capsys):
        code, out, _ = run(capsys, "sweep", "--preset", "table1", "--dx", "10,39.5",
                           "--e", "10,20")
        rows = csv_rows(out)
        assert code == 0 and len(rows) == 4
        assert [r["error"] for r in rows] == ["", "domain", "", "domain"]
        assert rows[1]["f_a_n"] == ""

    def test_sweep_byte_identical(self, capsys):
        argv = ["sweep", "--preset", "table1", "--dx", "0,5,10", "--scale", "1,1.25,1.5",
                "--kb", "0,2.18"]
        assert run(capsys, *argv) == run(capsys, *argv)

    def test_torque_matches_simulate(self, capsys):
        _, sim, _ = run(capsys, "simulate", "--preset", "table1", "--from", "0", "--to", "10",
                        "--steps", "3")
        code, out, _ = run(capsys, "torque-profile", "--preset", "table1", "--from", "0",
                           "--to", "10", "--steps", "3")
        assert code == 0
        assert [r["torque_nmm"] for r in csv_rows(out)] == [r["torque_nmm"] for r in csv_rows(sim)]
        assert "# peak_torque_nmm=34478.483046097" in out.splitlines()

    def test_torque_rest(self, capsys, rest_config):
        code, out, _ = run(capsys, "torque-profile", "--config", rest_config, "--points", "0")
        assert code == 0
        assert csv_rows(out) == [{"phase": "0.000000000", "delta_x_mm": "0.000000000",
                                  "torque_nmm": "0.000000000"}]
        assert "# required_motor_torque_nmm=0.000000000" in out.splitlines()

    def test_torque_gear(self, capsys):
        _, out, _ = run(capsys, "torque-profile", "--preset", "table1", "--from", "0", "--to", "10",
                        "--steps", "5", "--gear-ratio", "2", "--safety-factor", "1.5")
        assert "# required_motor_torque_nmm=25858.862284573" in out.splitlines()

    def test_torque_out_of_range(self, capsys):
        code, _, err = run(capsys, "torque-profile", "--preset", "table1", "--points", "0,10,30")
        assert code == 3 and "phase 1" in err

    def test_peg_arc(self, capsys):
        code, out, _ = run(capsys, "torque-profile", "--preset", "table1", "--peg-radius", "10",
                           "--sweep-angle", "60", "--steps", "4")
        assert code == 0 and len(csv_rows(out)) == 4


def test_subprocess_locale_and_exit_codes(tmp_path):
    env = {**os.environ, "LC_ALL": "de_DE.UTF-8", "LANG": "de_DE.UTF-8"}
    base = [sys.executable, "-m", "kiriutensil"]
    ok = subprocess.run(base + ["simulate", "--preset", "table1", "--from", "0", "--to", "10",
                                "--steps", "3"], capture_output=True, text=True, env=env)
    assert ok.returncode == 0
    assert ok.stdout.splitlines()[-1].startswith("10.000000000,3.868074324,")
    bad = subprocess.run(base + ["invert", "--preset", "table1", "--force", "1e9"],
                         capture_output=True, text=True, env=env)
    assert bad.returncode == 3
    usage = subprocess.run(base + ["simulate", "--preset", "table1"], capture_output=True,
                           text=True, env=env)
    assert usage.returncode == 2
