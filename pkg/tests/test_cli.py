import csv
import io
import json
import os
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from pentapod_sing.cli import DIST_COLUMNS, fmt, load_config, main
from reference_data import FIXED_ORIENTATION_ROWS

ROOT = Path(__file__).resolve().parents[1]
REFERENCE = ROOT / "configs" / "reference.json"


def base_config(**over):
    cfg = json.loads(REFERENCE.read_text())
    cfg.update(over)
    return cfg


@pytest.fixture
def write_cfg(tmp_path):
    def _write(cfg, name="job.json"):
        p = tmp_path / name
        p.write_text(cfg if isinstance(cfg, str) else json.dumps(cfg))
        return str(p)

    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestFormatting:
    def test_ten_significant_digits(self):
        assert fmt(3.941223288123) == "3.941223288"
        assert fmt(None) == ""
        assert fmt(0.0) == "0"
        assert fmt(1.0e-20) == "1e-20"


class TestConfig:
    def test_reference_loads(self):
        cfg = load_config(str(REFERENCE))
        assert cfg["mode"] == "general"
        assert cfg["pose"].orientation == (Fraction(3, 5), Fraction(4, 5), 0)

    def test_malformed_json(self, capsys, write_cfg):
        code, out, err = run(capsys, "check", "--config", write_cfg("{not json"))
        assert code == 2 and out == "" and "config error" in err

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "check", "--config", str(tmp_path / "nope.json"))[0] == 2

    def test_schema_violation(self, capsys, write_cfg):
        cfg = base_config()
        cfg["architecture"]["r"] = [0, 1, 2]
        assert run(capsys, "check", "--config", write_cfg(cfg))[0] == 2

    def test_degenerate_architecture(self, capsys, write_cfg):
        cfg = base_config()
        cfg["architecture"]["base"] = [[k, 0, 0] for k in range(5)]
        assert run(capsys, "check", "--config", write_cfg(cfg))[0] == 2

    def test_non_unit_orientation_rejected(self, capsys, write_cfg):
        cfg = base_config()
        cfg["pose"]["orientation"] = [1, 1, 0]
        code, _, err = run(capsys, "check", "--config", write_cfg(cfg))
        assert code == 2 and "orientation" in err

    def test_nearly_unit_orientation_normalized(self, capsys, write_cfg):
        cfg = base_config()
        cfg["pose"]["orientation"] = [0.6000001, 0.8, 0]
        code, out, err = run(capsys, "check", "--config", write_cfg(cfg))
        assert code == 0 and "warning" in err.lower()

    def test_missing_argument(self, capsys):
        assert main(["check"]) == 2

    def test_unknown_command(self, capsys):
        assert main(["explode", "--config", str(REFERENCE)]) == 2

    def test_unknown_mode_is_config_error(self, capsys):
        code, _, err = run(capsys, "dist", "--config", str(REFERENCE), "--mode", "sideways")
        assert code == 2 and "mode" in err

    def test_bad_t(self, capsys):
        assert main(["param", "--config", str(REFERENCE), "--t", "1,2,3"]) == 2


class TestCheck:
    def test_reference_pose_nonsingular(self, capsys):
        code, out, _ = run(capsys, "check", "--config", str(REFERENCE))
        assert code == 0
        assert rows(out)[0]["verdict"] == "nonsingular"

    def test_fixed_orientation_pose_singular(self, capsys, write_cfg):
        cfg = base_config()
        cfg["pose"]["position"] = list(FIXED_ORIENTATION_ROWS[0][:3])
        code, out, _ = run(capsys, "check", "--config", write_cfg(cfg), "--tol", "1e-6")
        assert code == 0
        assert rows(out)[0]["verdict"] == "singular"

    def test_json(self, capsys):
        code, out, _ = run(capsys, "check", "--config", str(REFERENCE), "--format", "json")
        doc = json.loads(out)
        assert code == 0 and doc["singular"] is False and doc["sigma_ratio"] > 1e-8


class TestParam:
    def test_explicit_exact_points(self, capsys):
        code, out, _ = run(capsys, "param", "--config", str(REFERENCE), "--t", "1/2,-3/7,2/3,5/4",
                           "--t", "0,0,0,0")
        recs = rows(out)
        assert code == 0 and len(recs) == 2
        assert recs[0]["status"] == "ok"
        assert list(recs[0]) == ["index", "t1", "t2", "t3", "t4", "u", "v", "w", "px", "py", "pz", "status"]

    def test_grid_poses_are_singular(self, capsys, model):
        code, out, _ = run(capsys, "param", "--config", str(REFERENCE), "--grid", "25", "--format", "json")
        doc = json.loads(out)
        assert code == 0 and len(doc) == 25
        for item in doc:
            if item["status"] == "ok":
                assert model.normalized_value(np.array(item["pose"], float)) < 1e-8


class TestDist:
    def test_fixed_orientation_csv(self, capsys):
        code, out, _ = run(capsys, "dist", "--config", str(REFERENCE), "--mode", "fixed-orientation")
        assert code == 0
        assert out.splitlines()[0] == ",".join(DIST_COLUMNS)
        recs = rows(out)
        assert len(recs) == 4
        assert float(recs[0]["distance"]) == pytest.approx(FIXED_ORIENTATION_ROWS[0][4], abs=1e-6)
        assert recs[0]["lambda2"] == "" and recs[0]["mu"] == ""
        for k, r in enumerate(recs, start=1):
            assert int(r["index"]) == k
            assert len(r["distance"].replace("-", "").replace(".", "").split("e")[0]) <= 10

    def test_general_json(self, capsys):
        code, out, _ = run(capsys, "dist", "--config", str(REFERENCE), "--starts", "500", "--format", "json")
        doc = json.loads(out)
        assert code == 0 and doc["mode"] == "general"
        assert doc["count"] == len(doc["points"]) >= 1
        d = [p["distance"] for p in doc["points"]]
        assert d == sorted(d)
        assert all(p["mu"] is None for p in doc["points"])

    def test_out_file(self, capsys, tmp_path):
        out = tmp_path / "res.csv"
        code, stdout, _ = run(capsys, "dist", "--config", str(REFERENCE), "--mode", "fixed_orientation",
                              "--out", str(out))
        assert code == 0 and stdout == ""
        assert out.read_text().startswith("index,")

    def test_deterministic_bytes(self, capsys):
        argv = ["dist", "--config", str(REFERENCE), "--mode", "equiform", "--starts", "300", "--seed", "4"]
        a = run(capsys, *argv)[1]
        b = run(capsys, *argv)[1]
        assert a == b and a.count("\n") >= 2

    def test_console_script_subprocess(self, tmp_path):
        env = dict(os.environ, PENTAPOD_PRECISION="128")
        argv = [sys.executable, "-m", "pentapod_sing.cli", "dist", "--config", str(REFERENCE),
                "--mode", "fixed-orientation"]
        a = subprocess.run(argv, capture_output=True, env=env, check=True).stdout
        b = subprocess.run(argv, capture_output=True, env=env, check=True).stdout
        assert a == b and a.startswith(b"index,")

    def test_bad_precision_is_solver_error(self, capsys, monkeypatch):
        monkeypatch.setenv("PENTAPOD_PRECISION", "16")
        assert main(["dist", "--config", str(REFERENCE), "--mode", "fixed-orientation"]) == 3


class TestMesh:
    def test_mesh_json(self, capsys):
        code, out, _ = run(capsys, "mesh", "--config", str(REFERENCE), "--resolution", "24")
        doc = json.loads(out)
        assert code == 0
        assert len(doc["quadric"]["vertices"]) > 0 and len(doc["quadric"]["faces"]) > 0
        assert len(doc["sphere_curve"]["polylines"]) > 0
