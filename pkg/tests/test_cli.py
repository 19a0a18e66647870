import csv
import json
import subprocess
import sys

import pytest

from catlab import cli
from catlab.errors import ConfigurationError


def run_cli(args, tmp_path, env=None):
    return cli.run(cli.config_from_args(args + ["--out", str(tmp_path)], environ=env or {}))


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_catenoid_command_writes_table(tmp_path, capsys):
    assert run_cli(["catenoid", "--n", "3"], tmp_path) == 0
    rows = read_csv(tmp_path / "catenoid_n3.csv")
    assert rows[0] == ["t", "h", "A_norm", "area_cum"]
    assert float(rows[1][0]) == 1.0
    out = capsys.readouterr().out
    assert "PASS height_sup" in out
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["summary"] == {"total": 4, "passed": 4, "failed": 0}
    ids = {c["id"]: c for c in report["checks"]}
    assert ids["height_sup"]["bound"] == 1.31103 and ids["height_sup"]["pass"]
    assert all(c["paper_anchor"] for c in report["checks"])


def test_family_command(tmp_path):
    assert run_cli(["family", "--n", "2", "--a", "2", "--grid-points", "11"], tmp_path) == 0
    rows = read_csv(tmp_path / "family_n2_a2.csv")
    assert rows[0] == ["t", "rho", "area", "kappa_mer", "kappa_sph", "ric_min", "dist"]
    assert len(rows) == 12


def test_monotone_command(tmp_path):
    assert run_cli(["monotone", "--n", "2"], tmp_path) == 0
    assert read_csv(tmp_path / "monotone_n2.csv")[0] == ["s", "I", "tau", "F", "I_mod", "tau_mod", "dI_ds", "dtau_ds"]
    assert read_csv(tmp_path / "residuals_n2.csv")[0] == ["rho", "w", "lhs", "rhs", "residual"]


def test_surgery_command_exit_and_certificate(tmp_path):
    assert run_cli(["surgery", "--n", "2", "--a", "1"], tmp_path) == 0
    cert = json.loads((tmp_path / "surgery_n2.json").read_text())
    assert cert["r_star"] > 0 and cert["neck_rule"] == "R = r**0.5"
    assert len(cert["rows"]) == 5


def test_json_format(tmp_path):
    assert run_cli(["catenoid", "--n", "4", "--format", "json"], tmp_path) == 0
    data = json.loads((tmp_path / "catenoid_n4.json").read_text())
    assert data["columns"] == ["t", "h", "A_norm", "area_cum"]


def test_dimension_out_of_range_is_usage_error(tmp_path):
    assert cli.main(["verify", "--n", "9", "--out", str(tmp_path)]) == 2


def test_unknown_flag_is_usage_error(tmp_path):
    assert cli.main(["verify", "--bogus"]) == 2


def test_bad_tolerance_name():
    with pytest.raises(ConfigurationError):
        cli.config_from_args(["verify", "--tol-override", "nonsense=1"], environ={})


def test_tolerance_override_can_fail_a_check(tmp_path):
    assert run_cli(["catenoid", "--n", "2", "--tol-override", "flux_limit=1e-12"], tmp_path) == 1


def test_config_file_and_flag_precedence(tmp_path):
    conf = tmp_path / "conf.json"
    conf.write_text(json.dumps({"n": 4, "a": 2.0, "out": "elsewhere"}))
    cfg = cli.config_from_args(["family", "--config", str(conf), "--n", "5"], environ={})
    assert cfg.n == 5 and cfg.a == 2.0 and cfg.out_dir == "elsewhere"
    cfg = cli.config_from_args(["family", "--config", str(conf)], environ={"CATLAB_OUT": "envdir"})
    assert cfg.out_dir == "envdir"


def test_config_file_rejects_unknown_keys(tmp_path):
    conf = tmp_path / "conf.json"
    conf.write_text(json.dumps({"colour": "red"}))
    assert cli.main(["family", "--config", str(conf)]) == 2


def test_env_overrides_out_flag(tmp_path):
    cfg = cli.config_from_args(["catenoid", "--out", "flagdir"], environ={"CATLAB_OUT": str(tmp_path)})
    assert cfg.out_dir == str(tmp_path)


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "catlab", "catenoid", "--n", "5", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "4/4 checks passed" in proc.stdout
