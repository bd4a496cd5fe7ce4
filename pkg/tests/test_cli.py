import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from optomech.cli import ConfigError, main, resolve_config, validate_sweep_config

GOLDEN = Path(__file__).parent / "golden"
CONFIG = str(GOLDEN / "config.json")
CONFIG_DISPLACED = str(GOLDEN / "config_displaced.json")


def run_cli(*args):
    result = subprocess.run([sys.executable, "-m", "optomech.cli", *args],
                            capture_output=True, text=True)
    return result


def check_golden(tmp_path, golden_name, *args):
    out = tmp_path / golden_name
    result = run_cli(*args, "--out", str(out))
    assert result.returncode == 0, result.stderr
    assert out.read_bytes() == (GOLDEN / golden_name).read_bytes()


def test_golden_drive_eval(tmp_path):
    check_golden(tmp_path, "drive_eval.csv",
                 "drive-eval", "--config", CONFIG, "--steps", "5")


def test_golden_mechanics(tmp_path):
    check_golden(tmp_path, "mechanics.csv",
                 "mechanics", "--config", CONFIG, "--steps", "5")


def test_golden_coeffs(tmp_path):
    check_golden(tmp_path, "coeffs.csv",
                 "coeffs", "--config", CONFIG, "--steps", "5")


def test_golden_moments(tmp_path):
    check_golden(tmp_path, "moments.csv",
                 "moments", "--config", CONFIG_DISPLACED, "--steps", "5")


def test_golden_quadratures(tmp_path):
    check_golden(tmp_path, "quadratures.csv",
                 "moments", "--config", CONFIG_DISPLACED, "--steps", "5",
                 "--quadratures")


def test_golden_nongauss(tmp_path):
    check_golden(tmp_path, "nongauss.csv",
                 "nongauss", "--config", CONFIG, "--steps", "5")


def test_golden_qfi(tmp_path):
    check_golden(tmp_path, "qfi.csv",
                 "qfi", "--config", CONFIG, "--param", "g0",
                 "--tau", "6.283185307179586")


def test_golden_qfi_sweep(tmp_path):
    check_golden(tmp_path, "qfi_sweep.csv",
                 "qfi", "--config", CONFIG, "--param", "g0",
                 "--tau", "3.141592653589793", "--sweep", "g0", "0.5:1.5:0.5")


def test_golden_cfi(tmp_path):
    check_golden(tmp_path, "cfi.csv",
                 "cfi", "--config", CONFIG_DISPLACED,
                 "--tau", "6.283185307179586")


def test_golden_gravimetry(tmp_path):
    check_golden(tmp_path, "gravimetry.csv", "gravimetry", "--table")


def test_golden_oracle_check(tmp_path):
    check_golden(tmp_path, "oracle_check.csv",
                 "oracle-check", "--config", CONFIG, "--tau", "1.0")


def test_golden_moments_json(tmp_path):
    check_golden(tmp_path, "moments.json",
                 "moments", "--config", CONFIG_DISPLACED, "--steps", "3",
                 "--format", "json")


def test_golden_sweep(tmp_path):
    config = json.loads((GOLDEN / "sweep_config.json").read_text())
    config["output"] = str(tmp_path / "sweep_qfi.csv")
    cfg_path = tmp_path / "sweep.json"
    cfg_path.write_text(json.dumps(config, indent=1, sort_keys=True))
    result = run_cli("sweep", "--config", str(cfg_path), "--threads", "2")
    assert result.returncode == 0, result.stderr
    got = (tmp_path / "sweep_qfi.csv").read_text().splitlines()
    want = (GOLDEN / "sweep_qfi.csv").read_text().splitlines()
    # header fingerprints differ (output path is part of the config)
    assert got[2:] == want[2:]


def test_repeat_runs_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        result = run_cli("nongauss", "--config", CONFIG, "--steps", "4",
                         "--out", str(out))
        assert result.returncode == 0
    assert a.read_bytes() == b.read_bytes()


def test_unknown_config_field(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"g0": 1.0, "coupling_strength": 2.0}')
    result = run_cli("drive-eval", "--config", str(bad))
    assert result.returncode == 2
    assert "coupling_strength" in result.stderr


def test_resolve_config_validations():
    with pytest.raises(ConfigError, match="optical"):
        resolve_config({"optical": "squeezed"})


def test_validate_sweep_unknown_name():
    data = {"command": "qfi", "model": {"g0": 1.0},
            "swept": {"name": "bogus", "start": 0, "stop": 1, "step": 0.5},
            "output": "x.csv"}
    with pytest.raises(ConfigError, match="swept.name"):
        validate_sweep_config(data)


def test_validate_sweep_d2_validity_warning():
    data = {"command": "qfi",
            "model": {"g0": 1.0, "d2": 0.5, "mu_c_re": 1.0},
            "swept": {"name": "tau", "start": 0.5, "stop": 2.0, "step": 0.5},
            "fixed": {"param": "d2"},
            "output": "x.csv"}
    notes = validate_sweep_config(data)
    assert any("validity" in n for n in notes)


def test_validate_only_flag(tmp_path):
    config = json.loads((GOLDEN / "sweep_config.json").read_text())
    cfg_path = tmp_path / "sweep.json"
    cfg_path.write_text(json.dumps(config))
    result = run_cli("sweep", "--config", str(cfg_path), "--validate-only")
    assert result.returncode == 0
    assert "ok" in result.stdout


def test_cache_dir_round_trip(tmp_path, monkeypatch):
    cache = tmp_path / "cache"
    monkeypatch.setenv("OPTOMECH_CACHE_DIR", str(cache))
    out1, out2 = tmp_path / "c1.csv", tmp_path / "c2.csv"
    assert main(["coeffs", "--config", CONFIG, "--steps", "4",
                 "--out", str(out1)]) == 0
    assert any(cache.iterdir())
    assert main(["coeffs", "--config", CONFIG, "--steps", "4",
                 "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_fast_tolerance_profile(tmp_path):
    result = run_cli("--tolerance-profile", "fast", "nongauss",
                     "--config", CONFIG, "--steps", "3",
                     "--out", str(tmp_path / "x.csv"))
    assert result.returncode == 0


def _read_rows(path):
    rows = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#") or "," not in line or line[0].isalpha():
            continue
        rows.append([float(x) for x in line.split(",")])
    return rows


def test_nongauss_sweep_starts_and_ends_at_zero(tmp_path):
    data = {"command": "nongauss", "model": {"g0": 1.0, "mu_c_re": 1.0},
            "swept": {"name": "tau", "start": 0.0,
                      "stop": 2 * math.pi, "step": math.pi / 4},
            "fixed": {}, "output": str(tmp_path / "ng.csv"), "format": "csv"}
    cfg = tmp_path / "ng.json"
    cfg.write_text(json.dumps(data))
    result = run_cli("sweep", "--config", str(cfg))
    assert result.returncode == 0, result.stderr
    rows = _read_rows(tmp_path / "ng.csv")
    assert abs(rows[0][1]) < 1e-8
    assert abs(rows[-1][1]) < 1e-8
    assert max(r[1] for r in rows) > 1.0


def test_qfi_frequency_sweep_peaks_at_resonance(tmp_path):
    data = {"command": "qfi",
            "model": {"g0": 1.0, "epsilon": 0.5, "omega_g": 1.0, "mu_c_re": 1.0},
            "swept": {"name": "omega_g", "start": 0.1, "stop": 2.0, "step": 0.05},
            "fixed": {"param": "g0", "tau": 10 * math.pi},
            "output": str(tmp_path / "qfi.csv"), "format": "csv"}
    cfg = tmp_path / "qfi.json"
    cfg.write_text(json.dumps(data))
    result = run_cli("sweep", "--config", str(cfg), "--threads", "2")
    assert result.returncode == 0, result.stderr
    rows = _read_rows(tmp_path / "qfi.csv")
    best = max(rows, key=lambda r: r[1])
    assert abs(best[0] - 1.0) <= 0.1
