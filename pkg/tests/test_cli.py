import json
import math
import subprocess
import sys

import pytest

from slowlight_qfc import cli
from slowlight_qfc.errors import NumericalError
from slowlight_qfc.reporting import read_table


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check(capsys, tmp_path):
    code, out, _ = run(capsys, "check", "--out", str(tmp_path / "c.json"))
    assert code == 0
    doc = json.loads(out)
    assert doc["derived"]["betaL"] == pytest.approx(1.706, abs=1e-3)
    assert doc["validity"]["dispersion_ratio1"] == pytest.approx(2.12, abs=0.01)
    assert doc["validity"]["flags"]["dispersion_ratio1"] == "warn"
    assert doc["validity"]["flags"]["eit_product"] == "pass"
    assert (tmp_path / "c.manifest.json").is_file()


def test_omega_units_agree(capsys):
    _, a, _ = run(capsys, "check", "--omega", "8")
    gamma = 2 * math.pi * 3e6
    _, b, _ = run(capsys, "check", "--omega-si", repr(8 * gamma))
    assert json.loads(a)["derived"]["beta"] == pytest.approx(json.loads(b)["derived"]["beta"], rel=1e-12)


def test_omega_flags_are_exclusive(capsys):
    with pytest.raises(SystemExit):
        cli.main(["check", "--omega", "8", "--omega-si", "1e8"])


def test_propagate_writes_fields(capsys, tmp_path):
    out = tmp_path / "f.csv"
    code, stdout, _ = run(capsys, "propagate", "--grid-points", "1024", "--out", str(out))
    assert code == 0
    cols, rows = read_table(out)
    assert cols == ["t_s", "re_phi1", "im_phi1", "re_phi2", "im_phi2"]
    assert len(rows) == 1024
    manifest = json.loads((tmp_path / "f.manifest.json").read_text())
    assert {"config", "derived", "grid", "command", "tool_version", "timestamp"} <= set(manifest)
    assert json.loads(stdout)["method"] == "analytic"


def test_propagate_with_oracle(capsys):
    code, out, _ = run(capsys, "propagate", "--grid-points", "1024", "--oracle", "--oracle-steps", "64")
    doc = json.loads(out)
    assert code == 0
    assert doc["method"] == "oracle-spectral"
    assert doc["error_estimate"] < 1e-3


def test_sweep(capsys, tmp_path):
    out = tmp_path / "s.csv"
    code, stdout, _ = run(capsys, "sweep", "--points", "4", "--omega-max", "12", "--grid-points", "1024",
                          "--out", str(out))
    assert code == 0
    cols, rows = read_table(out)
    assert cols[0] == "omega_over_gamma" and "validity_flags" in cols
    assert len(rows) == 4
    assert json.loads(stdout)["rows"] == 4


def test_sweep_below_guard(capsys):
    code, _, err = run(capsys, "sweep", "--omega-min", "1", "--points", "2")
    assert code == 2
    assert "force-validity" in err or "validity guard" in err


def test_low_drive_needs_force(capsys):
    assert run(capsys, "check", "--omega", "2")[0] == 2
    assert run(capsys, "check", "--omega", "2", "--force-validity")[0] == 0


def test_shapes(capsys, tmp_path):
    out = tmp_path / "sh.csv"
    code, _, _ = run(capsys, "shapes", "--shape", "double_hump", "--grid-points", "2048", "--out", str(out))
    assert code == 0
    cols, _ = read_table(out)
    assert cols == ["t_over_T", "abs2_phi1", "abs2_phi2", "abs2_beta0_reference"]


def test_partial(capsys, tmp_path):
    code, out, _ = run(capsys, "partial", "--grid-points", "2048", "--out", str(tmp_path))
    assert code == 0
    orders = [e["ordering"] for e in json.loads(out)]
    assert orders == ["phi1_behind_phi2", "phi2_behind_phi1"]
    assert (tmp_path / "partial_omega_6.csv").is_file()
    assert (tmp_path / "partial_omega_18.report.json").is_file()


def test_timebin(capsys, tmp_path):
    code, out, err = run(capsys, "timebin", "--phase", "1.0", "--out", str(tmp_path / "tb.csv"))
    assert code == 0
    assert "time-bin fidelity" in err
    doc = json.loads(out)
    assert doc["fidelity"] > 0.999999
    assert doc["relative_phase"] == pytest.approx(1.0, abs=1e-6)


def test_timebin_bad_amplitude(capsys):
    assert run(capsys, "timebin", "--a", "1.5")[0] == 2


def test_dressed(capsys, tmp_path):
    code, out, _ = run(capsys, "dressed", "--out", str(tmp_path / "d.json"))
    assert code == 0
    doc = json.loads(out)
    assert doc["report"]["qe"] >= 0.95
    assert doc["labels"]["lambda2_m"] == pytest.approx(1.47e-6)


def test_oracle_compare(capsys):
    code, out, _ = run(capsys, "oracle-compare", "--grid-points", "1024", "--oracle-steps", "64")
    assert code == 0
    doc = json.loads(out)
    assert doc["relative_l2"] < 1e-3
    assert doc["qe_oracle"] == pytest.approx(doc["qe_analytic"], abs=1e-3)


def test_bad_config_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.ini"
    bad.write_text("[medium]\nbogus = 1\n")
    code, _, err = run(capsys, "propagate", "--config", str(bad))
    assert code == 2
    assert "medium.bogus" in err


def test_numerical_failure_exit_code(capsys, monkeypatch):
    def boom(*args, **kwargs):
        raise NumericalError("overflow", {"step": 3})

    monkeypatch.setattr(cli, "run_single", boom)
    code, _, err = run(capsys, "propagate")
    assert code == 3
    assert "step" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "slowlight_qfc", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "0.1.0"
