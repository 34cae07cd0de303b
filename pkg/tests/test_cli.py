import csv
import json
import subprocess
import sys

import pytest

from solar_composter.cli import main, parse_duration
from solar_composter.output import CURVE_COLUMNS
from solar_composter.system_sim import TRACE_COLUMNS


def run(*argv):
    return main(list(argv))


def flag_codes(path):
    return [f["code"] for f in json.loads(path.read_text())["flags"]]


def test_size_design_defaults(tmp_path):
    out = tmp_path / "report.json"
    assert run("size", "--out", str(out)) == 0
    report = json.loads(out.read_text())
    assert report["drivetrain"]["required_motor_torque"] == pytest.approx(2.74, abs=0.01)
    rated = report["energy"]["rated"]
    assert rated["battery"]["capacity_required"] == pytest.approx(39.9, abs=0.5)
    assert rated["battery"]["unit_capacity"] == 40
    assert report["regulator"]["min_current"] == pytest.approx(1.67, abs=0.01)
    codes = flag_codes(out)
    assert "EQ10_VIOLATION" in codes and "PANEL_COUNT_MISMATCH" in codes
    assert "EQ9_NONPHYSICAL" not in codes
    assert report["output_power"]["basis"] == "physical"


@pytest.mark.parametrize("argv", [
    ("--paper-faithful", "size"), ("size", "--paper-faithful")])
def test_size_paper_faithful(tmp_path, argv):
    out = tmp_path / "report.json"
    assert run(*argv, "--out", str(out)) == 0
    report = json.loads(out.read_text())
    assert "EQ9_NONPHYSICAL" in flag_codes(out)
    rated_power = report["energy"]["rated"]["budget"]["motor_power"]
    assert report["output_power"]["value_W"] == pytest.approx(rated_power / 0.85)


def test_size_zero_waste(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"drum": {"empty_mass": 0, "waste_mass": 0}}))
    out = tmp_path / "r.json"
    assert run("size", "--config", str(cfg), "--out", str(out)) == 0
    report = json.loads(out.read_text())
    assert report["drivetrain"]["load_torque"] == 0
    assert report["drivetrain"]["required_motor_torque"] == 0
    assert "TORQUE_MARGIN" not in flag_codes(out)


def test_size_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run("size", "--out", str(a))
    run("size", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_size_to_stdout(capsys):
    assert run("size") == 0
    assert json.loads(capsys.readouterr().out)["selected_mode"] == "rated"


def test_pv_curve_stc(tmp_path, capsys):
    out = tmp_path / "iv.csv"
    assert run("pv-curve", "--irradiance", "1000", "--temperature", "25",
               "--points", "200", "--out", str(out)) == 0
    rows = list(csv.reader(out.open()))
    assert tuple(rows[0]) == CURVE_COLUMNS == ("voltage_V", "current_A", "power_W")
    assert len(rows) == 201
    summary = capsys.readouterr().out
    power = float(summary.split("power_W=")[1].split()[0])
    assert power == pytest.approx(20.0, rel=0.02)


def test_pv_curve_800(tmp_path, capsys):
    assert run("pv-curve", "--irradiance", "800", "--out", str(tmp_path / "c.csv")) == 0
    power = float(capsys.readouterr().out.split("power_W=")[1].split()[0])
    assert power == pytest.approx(14.73, rel=0.10)


def test_pv_curve_one_point_is_usage_error(tmp_path):
    assert run("pv-curve", "--points", "1", "--out", str(tmp_path / "c.csv")) == 2


def test_pv_curve_bad_datasheet_is_compute_error(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"pv_datasheet": {"mpp_voltage": 22.0}}))
    assert run("pv-curve", "--config", str(cfg), "--out", str(tmp_path / "c.csv")) == 1


def test_simulate_blackout(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"power_mode": "load"}))
    out = tmp_path / "trace.csv"
    assert run("simulate", "--config", str(cfg), "--scenario", "blackout",
               "--horizon", "3d", "--dt", "60", "--out", str(out)) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["autonomy"]["verdict"] == "pass"
    assert summary["min_soc"] == pytest.approx(0.906, abs=1e-3)
    with out.open() as fh:
        header = next(csv.reader(fh))
    assert tuple(header) == TRACE_COLUMNS
    assert header == ["t_s", "irradiance_wm2", "pv_w", "load_w", "net_w", "soc",
                      "motor_rpm", "drum_rpm"]
    saved = json.loads((tmp_path / "trace.csv.summary.json").read_text())
    assert saved == summary


def test_simulate_clear_day_sim_preset(tmp_path, capsys):
    out = tmp_path / "trace.csv"
    assert run("simulate", "--config", "preset:paper-sim", "--horizon", "10s",
               "--start", "35995", "--dt", "0.01", "--out", str(out)) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["rise_time_99_s"] <= 0.5
    assert summary["final_motor_rpm"] >= 148.5
    assert summary["final_drum_rpm"] == pytest.approx(4.0, abs=0.1)


@pytest.mark.parametrize("dt", ["0", "-1"])
def test_simulate_bad_dt(tmp_path, dt):
    assert run("simulate", "--dt", dt, "--out", str(tmp_path / "t.csv")) == 2


def test_simulate_deterministic(tmp_path, capsys):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        run("simulate", "--horizon", "6h", "--start", "8h", "--dt", "30", "--out", str(p))
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_config_errors_exit_2(tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text("")
    assert run("size", "--config", str(empty)) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"drum": {"diameter": -1}}')
    assert run("size", "--config", str(bad)) == 2
    assert run("size", "--config", str(tmp_path / "missing.json")) == 2


def test_module_entry_point_exit_status(tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text("")
    proc = subprocess.run([sys.executable, "-m", "solar_composter", "size",
                           "--config", str(empty)], capture_output=True, text=True)
    assert proc.returncode == 2
    assert "invalid JSON" in proc.stderr


def test_argparse_usage_error_exit_2():
    with pytest.raises(SystemExit) as exc:
        run("simulate", "--scenario", "storm")
    assert exc.value.code == 2


@pytest.mark.parametrize("text,seconds", [
    ("600", 600), ("10min", 600), ("2.5h", 9000), ("3d", 259200), ("1e2s", 100)])
def test_parse_duration(text, seconds):
    assert parse_duration(text) == seconds


def test_csv_decimal_point_is_locale_independent(tmp_path):
    out = tmp_path / "iv.csv"
    run("pv-curve", "--points", "5", "--out", str(out))
    body = out.read_text()
    assert "," in body.splitlines()[1]
    for row in list(csv.reader(body.splitlines()))[1:]:
        for cell in row:
            float(cell)
