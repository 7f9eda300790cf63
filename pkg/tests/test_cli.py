"""End-to-end tests of the command-line interface.

All invocations go through ncilw.cli.main(argv) in-process so exit codes
and emitted files can be checked without spawning subprocesses.
"""

import json
import os

import numpy as np
import pytest

import ncilw.pde
from ncilw import cli, reporting
from ncilw.config import validate_config
from ncilw.errors import IoError, SchemaError

ELL = np.pi


def write_config(path, data):
    with open(path, "w") as fh:
        json.dump(data, fh)
    return str(path)


SIM_CFG = {
    "kind": "ncILW",
    "m_points": 32,
    "ell": ELL,
    "delta": 1.0,
    "initial": {"preset": "single-mode", "amplitude": 0.05, "mode": 1},
    "dt": 1e-3,
    "t_end": 0.01,
    "snapshot_every": 5,
}


class TestConfigValidation:
    def test_unknown_key_rejected(self):
        with pytest.raises(SchemaError, match="speling_mistake"):
            validate_config(dict(SIM_CFG, speling_mistake=1), "simulate")

    def test_nonpositive_delta_rejected(self):
        with pytest.raises(SchemaError, match="delta"):
            validate_config(dict(SIM_CFG, delta=-1.0), "simulate")

    def test_defaults_filled(self):
        cfg = validate_config(dict(SIM_CFG), "simulate")
        assert cfg["dealias"] is True
        assert cfg["invariant_every"] == 10
        assert cfg["mass_tol"] == 1e-10

    def test_kdv_requires_kdv_delta(self):
        bad = dict(SIM_CFG, kind="KdV")
        with pytest.raises(SchemaError, match="kdv_delta"):
            validate_config(bad, "simulate")

    def test_odd_m_points_rejected(self):
        with pytest.raises(SchemaError, match="m_points"):
            validate_config(dict(SIM_CFG, m_points=33), "simulate")

    def test_mismatched_momenta_rejected(self):
        with pytest.raises(SchemaError, match="momenta"):
            validate_config(
                {"case": "rational", "g2": 1.0, "positions": [0.0, 1.0],
                 "momenta": [0.0], "dt": 1e-3, "n_steps": 1},
                "cms",
            )


class TestExitCodes:
    def test_unknown_key_exits_2(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "c.json", dict(SIM_CFG, speling_mistake=1))
        assert cli.main(["simulate", "--config", cfg]) == 2
        assert "speling_mistake" in capsys.readouterr().err

    def test_missing_config_exits_4(self):
        assert cli.main(["simulate", "--config", "/does/not/exist.json"]) == 4

    def test_invalid_json_exits_2(self, tmp_path):
        bad = tmp_path / "c.json"
        bad.write_text("{not json")
        assert cli.main(["simulate", "--config", str(bad)]) == 2

    def test_no_config_at_all_exits_2(self):
        assert cli.main(["simulate"]) == 2

    def test_pole_in_wrong_half_plane_exits_2(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", {
            "ell": ELL, "delta": 1.0, "m_points": 32,
            "poles": [[0.0, 0.4]], "dt": 1e-3, "t_end": 1e-3,
        })
        assert cli.main(["pole-check", "--config", cfg,
                         "--out-dir", str(tmp_path / "out")]) == 2

    def test_failed_check_exits_3(self, tmp_path):
        # a coarse step makes the energy drift exceed the tight tolerance
        cfg = write_config(tmp_path / "c.json", {
            "case": "rational", "g2": 1.0,
            "positions": [-0.5, 0.5], "momenta": [0.4, -0.4],
            "dt": 1e-2, "n_steps": 100, "energy_tol": 1e-14,
        })
        assert cli.main(["cms", "--config", cfg,
                         "--out-dir", str(tmp_path / "out")]) == 3
        manifest = json.loads((tmp_path / "out" / "cms_manifest.json").read_text())
        assert manifest["passed"] is False

    def test_blowup_writes_partial_manifest_and_exits_3(self, tmp_path, monkeypatch):
        monkeypatch.setattr(ncilw.pde, "BLOWUP_FACTOR", 1e-3)
        cfg = write_config(tmp_path / "c.json", dict(SIM_CFG))
        assert cli.main(["simulate", "--config", cfg,
                         "--out-dir", str(tmp_path / "out")]) == 3
        manifest = json.loads(
            (tmp_path / "out" / "simulate_manifest.json").read_text()
        )
        assert manifest["partial"] is True
        assert manifest["passed"] is False


class TestOutputDirPrecedence:
    def test_env_var_used(self, tmp_path, monkeypatch):
        out = tmp_path / "from_env"
        monkeypatch.setenv(reporting.OUTPUT_DIR_ENV, str(out))
        cfg = write_config(tmp_path / "c.json", dict(SIM_CFG))
        assert cli.main(["simulate", "--config", cfg]) == 0
        assert (out / "invariants.csv").exists()

    def test_flag_beats_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv(reporting.OUTPUT_DIR_ENV, str(tmp_path / "env"))
        cfg = write_config(tmp_path / "c.json", dict(SIM_CFG))
        out = tmp_path / "flag"
        assert cli.main(["simulate", "--config", cfg, "--out-dir", str(out)]) == 0
        assert (out / "invariants.csv").exists()
        assert not (tmp_path / "env").exists()

    def test_config_value_used_last(self, tmp_path, monkeypatch):
        monkeypatch.delenv(reporting.OUTPUT_DIR_ENV, raising=False)
        out = tmp_path / "from_cfg"
        cfg = write_config(tmp_path / "c.json", dict(SIM_CFG, out_dir=str(out)))
        assert cli.main(["simulate", "--config", cfg]) == 0
        assert (out / "snapshots.csv").exists()


class TestEval:
    def test_reference_value_without_config(self, capsys):
        assert cli.main(["eval", "wp1", "--x", "0.25",
                         "--ell", "1", "--delta", "1"]) == 0
        out = capsys.readouterr().out
        assert "16.822354849489" in out

    def test_pointwise_function_needs_x(self):
        assert cli.main(["eval", "zeta1", "--ell", "1", "--delta", "1"]) == 2


class TestEndToEnd:
    def test_simulate_outputs(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", dict(SIM_CFG))
        out = tmp_path / "out"
        assert cli.main(["simulate", "--config", cfg, "--out-dir", str(out)]) == 0
        for name in ("snapshots.csv", "invariants.csv",
                     "simulate_manifest.json", "fields.png"):
            assert (out / name).exists()
        manifest = json.loads((out / "simulate_manifest.json").read_text())
        assert manifest["passed"] is True
        header = (out / "invariants.csv").read_text().splitlines()[0]
        assert header == "t,mass_u,mass_v,momentum,energy"

    def test_determinism(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", dict(SIM_CFG))
        for d in ("a", "b"):
            assert cli.main(["simulate", "--config", cfg,
                             "--out-dir", str(tmp_path / d)]) == 0
        for name in ("snapshots.csv", "invariants.csv"):
            assert (tmp_path / "a" / name).read_bytes() == \
                (tmp_path / "b" / name).read_bytes()
        # manifests agree except for the wall-clock stamp
        ma = json.loads((tmp_path / "a" / "simulate_manifest.json").read_text())
        mb = json.loads((tmp_path / "b" / "simulate_manifest.json").read_text())
        ma.pop("wallclock_utc"), mb.pop("wallclock_utc")
        assert ma == mb

    def test_operator_test_outputs(self, tmp_path):
        cfg = write_config(tmp_path / "c.json",
                           {"m_points": 32, "ell": ELL, "delta": 1.0})
        out = tmp_path / "out"
        assert cli.main(["operator-test", "--config", cfg,
                         "--out-dir", str(out)]) == 0
        for op in ("H", "T", "Ttilde", "dx"):
            assert (out / f"operator_{op}.csv").exists()
        report = json.loads((out / "operator_report.json").read_text())
        assert report["passed"] is True
        assert report["ttilde_magnitude"] > 0

    def test_cms_outputs(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", {
            "case": "trigonometric", "ell": ELL, "delta": 1.0, "g2": 1.0,
            "positions": [-1.0, 1.0], "momenta": [0.1, -0.1],
            "dt": 1e-5, "n_steps": 200, "record_every": 50,
        })
        out = tmp_path / "out"
        assert cli.main(["cms", "--config", cfg, "--out-dir", str(out)]) == 0
        rows = (out / "trajectory.csv").read_text().splitlines()
        assert rows[0] == "t,x_1,x_2,p_1,p_2"
        assert len(rows) == 1 + 1 + 4  # header + initial + 4 chunks

    def test_pole_check_outputs(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", {
            "ell": ELL, "delta": 1.0, "m_points": 128,
            "poles": [[0.3, -0.5]], "dt": 1e-3, "t_end": 0.02,
        })
        out = tmp_path / "out"
        assert cli.main(["pole-check", "--config", cfg,
                         "--out-dir", str(out)]) == 0
        report = json.loads((out / "pole_report.json").read_text())
        assert report["passed"] is True
        assert report["checks"][0]["value"] < 1e-5

    def test_quantum_outputs(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", {
            "sector": [2, 0, 0, 0], "g": 2.0, "ell": ELL, "delta": 10.0 * ELL,
            "grids": [12, 16, 20], "stability_tol": 1e-3,
        })
        out = tmp_path / "out"
        assert cli.main(["quantum", "--config", cfg, "--out-dir", str(out)]) == 0
        report = json.loads((out / "quantum_report.json").read_text())
        assert report["passed"] is True
        assert len(report["raw"]) == 3
        rows = (out / "eigenvalues.csv").read_text().splitlines()
        assert rows[0] == "n_points,index,value"


class TestReportingHelpers:
    def test_csv_revalidation_rejects_ragged_rows(self, tmp_path):
        with pytest.raises(IoError, match="columns"):
            reporting.write_csv(
                str(tmp_path / "bad.csv"), ["a", "b"], [[1.0, 2.0], [3.0]]
            )

    def test_float_formatting_is_repr_exact(self, tmp_path):
        path = reporting.write_csv(
            str(tmp_path / "x.csv"), ["v"], [[1.0 / 3.0]]
        )
        val = open(path).read().splitlines()[1]
        assert float(val) == 1.0 / 3.0

    def test_unwritable_out_dir_raises(self):
        with pytest.raises(IoError):
            reporting.resolve_out_dir("/proc/definitely/not/writable")
