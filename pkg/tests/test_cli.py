import json
import shutil
from pathlib import Path

import numpy as np
import pytest
import yaml

from stefanctl import cli
from stefanctl.config import load_config
from stefanctl.trajectory import read_csv

REPO = Path(__file__).resolve().parents[1]


def quick_config(**overrides) -> dict:
    """Small fast one-phase run (1 h horizon, coarse grid)."""
    cfg = {
        "material": {"rho": 790.0, "cp": 2380.0, "k": 0.220,
                     "latent_heat": 210000.0, "Tm": 37.0},
        "domain": {"L": 0.1, "N": 100,
                   "dt_policy": {"kind": "cfl", "safety": 4.0}},
        "initial": {"s0": 0.001, "profile": {"kind": "linear", "amplitude": 1.0}},
        "schedule": {"kind": "periodic", "R": 600.0, "horizon": 3600.0},
        "controller": {"kind": "zoh", "c": 1.0e-3, "s_r": 0.02,
                       "phase": "one-phase"},
        "output": {"stride": None, "transform_energy": False},
    }
    for key, val in overrides.items():
        section, _, name = key.partition(".")
        if name:
            cfg[section][name] = val
        else:
            cfg[section] = val
    return cfg


def write_config(tmp_path, cfg, name="run.yaml") -> Path:
    path = tmp_path / name
    path.write_text(yaml.safe_dump(cfg))
    return path


class TestConfigLoading:
    def test_shipped_default_parses(self):
        rc = load_config(REPO / "configs" / "paraffin_default.yaml")
        assert rc.phase == "one-phase"
        assert rc.controller.c == 1e-3
        assert rc.dom.N == 200
        assert rc.horizon == 108000.0

    def test_per_gram_conversion(self, tmp_path):
        cfg = quick_config()
        del cfg["material"]["cp"], cfg["material"]["latent_heat"]
        cfg["material"]["cp_per_gram"] = 2.38
        cfg["material"]["latent_heat_per_gram"] = 210.0
        rc = load_config(write_config(tmp_path, cfg))
        assert rc.material.cp == pytest.approx(2380.0)
        assert rc.material.latent_heat == pytest.approx(210000.0)

    def test_missing_section_rejected(self, tmp_path):
        cfg = quick_config()
        del cfg["material"]
        with pytest.raises(Exception):
            load_config(write_config(tmp_path, cfg))


class TestSimulateCommand:
    def test_quick_run_succeeds(self, tmp_path, capsys):
        path = write_config(tmp_path, quick_config())
        code = cli.main(["simulate", "--config", str(path),
                         "--out-dir", str(tmp_path / "out")])
        assert code == 0
        out = tmp_path / "out"
        assert (out / "trajectory.csv").exists()
        assert (out / "samples.csv").exists()
        summary = json.loads((out / "summary.json").read_text())
        assert summary["status"] == "completed"
        assert summary["validity"]["passed"]
        cols = read_csv(out / "trajectory.csv")
        assert set(cols) >= {"t", "s", "sdot", "q_c", "T_boundary", "E_tilde",
                             "Psi", "V", "valid"}
        assert np.all(np.diff(cols["t"]) > 0)

    def test_gain_condition_rejected_exit_2(self, tmp_path, capsys):
        path = write_config(tmp_path, quick_config(**{"controller.c": 5.0e-3}))
        code = cli.main(["simulate", "--config", str(path),
                         "--out-dir", str(tmp_path / "out")])
        assert code == 2
        assert "gain-vs-schedule" in capsys.readouterr().err

    def test_setpoint_above_domain_exit_2(self, tmp_path, capsys):
        path = write_config(tmp_path, quick_config(**{"controller.s_r": 0.2}))
        code = cli.main(["simulate", "--config", str(path),
                         "--out-dir", str(tmp_path / "out")])
        assert code == 2
        assert "setpoint-above-domain" in capsys.readouterr().err

    def test_unreachable_setpoint_exit_2(self, tmp_path, capsys):
        cfg = quick_config(**{"initial.s0": 0.01, "controller.s_r": 0.0100001})
        cfg["initial"]["profile"]["amplitude"] = 50.0
        path = write_config(tmp_path, cfg)
        code = cli.main(["simulate", "--config", str(path),
                         "--out-dir", str(tmp_path / "out")])
        assert code == 2
        assert "setpoint-reachability" in capsys.readouterr().err

    def test_byte_identical_reruns(self, tmp_path):
        cfg = quick_config(**{"schedule.kind": "uniform", "schedule.r": 300.0})
        path = write_config(tmp_path, cfg)
        for d in ("a", "b"):
            code = cli.main(["simulate", "--config", str(path), "--seed", "42",
                             "--out-dir", str(tmp_path / d)])
            assert code == 0
        assert (tmp_path / "a" / "trajectory.csv").read_bytes() == \
            (tmp_path / "b" / "trajectory.csv").read_bytes()
        assert (tmp_path / "a" / "samples.csv").read_bytes() == \
            (tmp_path / "b" / "samples.csv").read_bytes()


class TestVerifyCommand:
    @pytest.fixture()
    def fresh_run(self, tmp_path):
        path = write_config(tmp_path, quick_config())
        assert cli.main(["simulate", "--config", str(path),
                         "--out-dir", str(tmp_path / "out")]) == 0
        return path, tmp_path / "out"

    def test_fresh_run_verifies(self, fresh_run, capsys):
        cfg_path, out = fresh_run
        code = cli.main(["verify", "--trajectory", str(out / "trajectory.csv"),
                         "--config", str(cfg_path)])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["passed"]

    def test_corrupted_flux_column_fails(self, fresh_run, tmp_path, capsys):
        cfg_path, out = fresh_run
        lines = (out / "trajectory.csv").read_text().splitlines()
        header = lines[0].split(",")
        qi = [h.split("[")[0] for h in header].index("q_c")
        row = lines[30].split(",")
        row[qi] = "%.17g" % (float(row[qi]) + 500.0)
        lines[30] = ",".join(row)
        bad = tmp_path / "bad.csv"
        bad.write_text("\n".join(lines) + "\n")
        code = cli.main(["verify", "--trajectory", str(bad),
                         "--config", str(cfg_path)])
        assert code == 1
        report = json.loads(capsys.readouterr().out)
        assert not report["checks"]["energy_conservation"] \
            or not report["checks"]["piecewise_constant_input"]

    def test_missing_file_exit_2(self, fresh_run):
        cfg_path, out = fresh_run
        code = cli.main(["verify", "--trajectory", str(out / "nope.csv"),
                         "--config", str(cfg_path)])
        assert code == 2


class TestSweepCommand:
    def test_grid_with_rejections(self, tmp_path):
        base = write_config(tmp_path, quick_config(**{"schedule.horizon": 1800.0}))
        sweep = tmp_path / "sweep.yaml"
        # c = 2e-3 with R = 600 violates c*R < 1 and must be rejected, not run
        sweep.write_text(yaml.safe_dump({"c": [1.0e-3, 2.0e-3],
                                         "R": [300.0, 600.0]}))
        code = cli.main(["sweep", "--config", str(base), "--sweep", str(sweep),
                         "--out-dir", str(tmp_path / "out"), "--workers", "2"])
        assert code == 0
        rows = (tmp_path / "out" / "sweep.csv").read_text().splitlines()
        assert len(rows) == 5  # header + 4 combos
        rejected = [r for r in rows[1:] if ",rejected," in r]
        assert len(rejected) == 1
        assert "gain-vs-schedule" in rejected[0]
        completed = [r for r in rows[1:] if ",completed," in r]
        assert len(completed) == 3

    def test_sweep_runs_pass_monotonicity(self, tmp_path):
        base = write_config(tmp_path, quick_config(**{"schedule.horizon": 1800.0}))
        sweep = tmp_path / "sweep.yaml"
        sweep.write_text(yaml.safe_dump({"c": [5.0e-4, 1.0e-3]}))
        code = cli.main(["sweep", "--config", str(base), "--sweep", str(sweep),
                         "--out-dir", str(tmp_path / "out")])
        assert code == 0
        rows = (tmp_path / "out" / "sweep.csv").read_text().splitlines()
        for r in rows[1:]:
            assert ",True," in r  # monotone column


class TestOracleCommand:
    def test_coarse_grid_rejected(self, capsys):
        assert cli.main(["oracle", "--n", "3"]) == 2

    def test_small_ladder_runs(self, tmp_path, capsys):
        code = cli.main(["oracle", "--n", "25", "50",
                         "--out-dir", str(tmp_path)])
        assert code == 0
        out = capsys.readouterr().out
        assert "observed_order" in out
        assert (tmp_path / "oracle_convergence.csv").exists()


class TestTwoPhaseCli:
    def test_two_phase_quick_run(self, tmp_path):
        cfg = yaml.safe_load((REPO / "configs" / "two_phase_default.yaml").read_text())
        cfg["domain"]["N"] = 100
        cfg["schedule"]["horizon"] = 3600.0
        path = write_config(tmp_path, cfg)
        code = cli.main(["simulate", "--config", str(path), "--two-phase",
                         "--out-dir", str(tmp_path / "out")])
        assert code == 0
        cols = read_csv(tmp_path / "out" / "trajectory.csv")
        assert "V2" in cols
        summary = json.loads((tmp_path / "out" / "summary.json").read_text())
        assert summary["solid_decay"]["passed"]
        assert summary["validity"]["passed"]

    def test_two_phase_verify_includes_solid_envelope(self, tmp_path, capsys):
        cfg = yaml.safe_load((REPO / "configs" / "two_phase_default.yaml").read_text())
        cfg["domain"]["N"] = 100
        cfg["schedule"]["horizon"] = 3600.0
        path = write_config(tmp_path, cfg)
        assert cli.main(["simulate", "--config", str(path),
                         "--out-dir", str(tmp_path / "out")]) == 0
        capsys.readouterr()
        code = cli.main(["verify",
                         "--trajectory", str(tmp_path / "out" / "trajectory.csv"),
                         "--config", str(path)])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["checks"]["solid_decay_envelope"]
        assert report["checks"]["two_phase_validity"]
