import json
import subprocess
import sys

import numpy as np
import pytest

from taseplk.cli import main


def run_cli(args):
    return main(args)


class TestPhaseCommand:
    def test_spec_example(self, tmp_path, capsys):
        rc = run_cli(["phase", "--omega", "0.25", "--alpha", "0.25",
                      "--beta", "0.125", "--out", str(tmp_path)])
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        assert out["regime"] == "special"
        assert out["phase"] == 1
        assert out["x_d"] == pytest.approx(0.25)
        assert (tmp_path / "manifest.json").exists()

    def test_dump_profile(self, tmp_path, capsys):
        rc = run_cli(["phase", "--omega", "0.25", "--alpha", "0.75",
                      "--beta", "0.6667", "--dump-profile",
                      "--out", str(tmp_path)])
        assert rc == 0
        prof = json.loads((tmp_path / "limit_profile.json").read_text())
        assert prof["domain"] == [0.0, 1.0]
        assert any(p["kind"] == "point" for p in prof["pieces"])

    def test_bad_parameter_exits_2(self, tmp_path, capsys):
        rc = run_cli(["phase", "--alpha", "1.5", "--out", str(tmp_path)])
        assert rc == 2
        err = json.loads(capsys.readouterr().err)
        assert err["kind"] == "parameter"


class TestSweepCommand:
    def test_equal_rates_labels(self, tmp_path, capsys):
        rc = run_cli(["sweep", "--omega", "0.25", "--res", "60",
                      "--out", str(tmp_path)])
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        assert out["labels"] == [1, 2, 3, 4, 5, 6]
        rows = (tmp_path / "phase_map.csv").read_text().splitlines()
        assert rows[0] == "alpha,beta,phase_index,boundary_flag"
        assert len(rows) == 1 + 60 * 60
        assert (tmp_path / "boundaries.csv").exists()


class TestRunCommands:
    def test_steady_and_manifest(self, tmp_path, capsys):
        rc = run_cli(["steady", "--omega", "0.25", "--alpha", "0.25",
                      "--beta", "0.125", "--epsilon", "0.05",
                      "--out", str(tmp_path)])
        assert rc == 0
        man = json.loads((tmp_path / "manifest.json").read_text())
        assert man["command"] == "steady"
        assert man["params"]["alpha"] == 0.25
        assert "taseplk" in man["versions"]
        lines = (tmp_path / "steady.csv").read_text().splitlines()
        assert lines[0] == "x,rho"

    def test_evolve_writes_snapshots(self, tmp_path, capsys):
        rc = run_cli(["evolve", "--omega", "0.25", "--alpha", "0.4",
                      "--beta", "0.45", "--epsilon", "0.05",
                      "--n-cells", "128", "--t-end", "5.0",
                      "--snapshots", "3", "--out", str(tmp_path)])
        assert rc == 0
        lines = (tmp_path / "evolution.csv").read_text().splitlines()
        assert lines[0] == "t,x,rho"
        assert len(lines) == 1 + 3 * 129

    def test_kmc_reproducible(self, tmp_path, capsys):
        args = ["kmc", "--omega", "0.25", "--alpha", "0.25", "--beta", "0.125",
                "--epsilon", str(1.0 / 101), "--seed", "5", "--t-burn", "50",
                "--t-sample", "200", "--replicas", "2"]
        rc = run_cli(args + ["--out", str(tmp_path / "a")])
        assert rc == 0
        rc = run_cli(args + ["--out", str(tmp_path / "b")])
        assert rc == 0
        a = (tmp_path / "a" / "kmc.csv").read_text()
        b = (tmp_path / "b" / "kmc.csv").read_text()
        assert a == b
        assert a.splitlines()[0] == "x,rho_mean,rho_stderr"

    def test_meanfield(self, tmp_path, capsys):
        rc = run_cli(["meanfield", "--omega", "0.25", "--alpha", "0.25",
                      "--beta", "0.125", "--epsilon", "0.05",
                      "--out", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "meanfield.csv").exists()

    def test_config_file_with_flag_override(self, tmp_path, capsys):
        cfg = tmp_path / "scenario.json"
        cfg.write_text(json.dumps({"alpha": 0.25, "beta": 0.125,
                                   "omega_a": 0.25, "omega_d": 0.25,
                                   "epsilon": 0.05}))
        rc = run_cli(["phase", "--config", str(cfg), "--alpha", "0.75",
                      "--beta", "0.6667", "--out", str(tmp_path)])
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        assert out["phase"] == 6  # flags overrode the config densities


class TestSweepSteadyGrid:
    def test_steady_grid_with_jobs(self, tmp_path, capsys):
        rc = run_cli(["sweep", "--omega", "0.25", "--res", "50",
                      "--steady-grid", "3", "--epsilon", "0.05",
                      "--jobs", "2", "--out", str(tmp_path)])
        assert rc == 0
        rows = (tmp_path / "steady_grid.csv").read_text().splitlines()
        assert rows[0] == "alpha,beta,rho_mid"
        assert len(rows) == 1 + 9
        # deterministic cell ordering regardless of pool scheduling
        first = rows[1].split(",")
        assert float(first[0]) == pytest.approx(0.5 / 3)


class TestVerifyCommand:
    def test_symmetry_suite_passes(self, tmp_path, capsys):
        rc = run_cli(["verify", "--suite", "symmetry", "--out", str(tmp_path)])
        assert rc == 0
        rep = json.loads((tmp_path / "verify_report.json").read_text())
        assert rep["symmetry"]["ok"]

    def test_captions_suite(self, tmp_path, capsys):
        rc = run_cli(["verify", "--suite", "captions", "--out", str(tmp_path)])
        assert rc == 0


class TestEntryPoint:
    def test_module_invocation(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "taseplk.cli", "phase", "--omega", "0.25",
             "--alpha", "0.25", "--beta", "0.125", "--out", str(tmp_path)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["phase"] == 1

    def test_usage_error_exit_2(self):
        proc = subprocess.run(
            [sys.executable, "-m", "taseplk.cli", "nonsense"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 2
