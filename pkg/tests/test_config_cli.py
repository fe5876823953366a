import json
from pathlib import Path

import numpy as np
import pytest

from eo_downlink import cli
from eo_downlink.config import ConfigError, ScenarioConfig, from_dict, load_config
from eo_downlink.imaging import load_raster

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def write_cfg(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def test_default_config_roundtrip():
    cfg = ScenarioConfig()
    assert from_dict(json.loads(cfg.to_json())) == cfg
    assert load_config(CONFIGS / "default.json") == cfg


def test_partial_sections_fill_defaults():
    cfg = from_dict({"orbit": {"min_elevation_deg": 5}, "seeds": [3, 4]})
    assert cfg.orbit.min_elevation_deg == 5 and cfg.orbit.altitude_m == 600e3
    assert cfg.seeds == (3, 4)


@pytest.mark.parametrize("doc, field", [
    ({"orbit": {"altitude_m": -1}}, "orbit.altitude_m"),
    ({"orbit": {"min_elevation_deg": 95}}, "orbit.min_elevation_deg"),
    ({"orbit": {"bogus": 1}}, "orbit.bogus"),
    ({"link": {"bandwidth_hz": "wide"}}, "link.bandwidth_hz"),
    ({"link": {"antenna_efficiency": 1.5}}, "link.antenna_efficiency"),
    ({"link": {"tx_gain_dbi": None, "tx_antenna_diameter_m": None}}, "link.tx_gain_dbi"),
    ({"intervals": 0}, "intervals"),
    ({"seeds": []}, "seeds"),
    ({"bands": [0, 0]}, "bands"),
    ({"scorer": {"kind": "neural"}}, "scorer"),
    ({"scorer": {"kind": "external", "path": "missing.msr"}}, "scorer.path"),
    ({"modcod_table": "missing.csv"}, "modcod_table"),
    ({"schema_version": 2}, "schema_version"),
    ({"mystery": 1}, "mystery"),
])
def test_field_errors_name_the_field(doc, field):
    with pytest.raises(ConfigError, match=field.replace(".", r"\.")):
        from_dict(doc)


def test_gain_fallback_to_aperture():
    cfg = from_dict({"link": {"rx_gain_dbi": None}})
    assert 10 * np.log10(cfg.link.gain("rx")) == pytest.approx(34.41, abs=0.01)


def test_cli_config_errors_exit_1(tmp_path, capsys):
    assert cli.main(["pass", "--config", str(tmp_path / "nope.json")]) == 1
    bad = write_cfg(tmp_path, {"orbit": {"altitude_m": 0}})
    assert cli.main(["pass", "--config", str(bad), "--out", str(tmp_path)]) == 1
    assert "orbit.altitude_m" in capsys.readouterr().err
    (tmp_path / "broken.json").write_text("{")
    assert cli.main(["pass", "--config", str(tmp_path / "broken.json")]) == 1


def test_cli_bad_threads_env_exit_1(tmp_path, monkeypatch):
    monkeypatch.setenv("EO_DOWNLINK_THREADS", "zero")
    assert cli.main(["pass", "--config", str(CONFIGS / "default.json"), "--out", str(tmp_path)]) == 1


def test_cli_runtime_error_exit_2(tmp_path, capsys):
    cfg = str(CONFIGS / "default.json")
    (tmp_path / "junk.msr").write_bytes(b"nonsense")
    code = cli.main(["simulate", "--config", cfg, "--out", str(tmp_path),
                     "--reference", str(tmp_path / "junk.msr"), "--acquired", str(tmp_path / "junk.msr")])
    assert code == 2
    assert "load" in capsys.readouterr().err


def test_pass_verb(tmp_path):
    assert cli.main(["pass", "--config", str(CONFIGS / "default.json"), "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "pass_summary.json").read_text())
    assert summary["t_pass_s"] == pytest.approx(246.99, abs=0.01)
    assert summary["intervals"] == 1000
    lines = (tmp_path / "rate_profile.csv").read_text().splitlines()
    assert lines[0] == "t_start_s,t_end_s,rate_bps,shannon_bps" and len(lines) == 1001


def test_capacity_sweep_verb(tmp_path):
    code = cli.main(["capacity-sweep", "--config", str(CONFIGS / "default.json"), "--out", str(tmp_path),
                     "--epsilons", "10,30", "--noise-figures", "0,2", "--intervals", "200"])
    assert code == 0
    rows = (tmp_path / "capacity_sweep.csv").read_text().splitlines()
    assert rows[0] == "min_elevation_deg,noise_figure_db,c_orbit_bits,c_orbit_tb" and len(rows) == 5


def synth(tmp_path, **kw):
    args = ["synth", "--config", str(CONFIGS / "default.json"), "--out", str(tmp_path), "--seed", "2",
            "--height", "16", "--width", "16"]
    for k, v in kw.items():
        args += [f"--{k.replace('_', '-')}", str(v)]
    assert cli.main(args) == 0
    return [str(tmp_path / f) for f in ("reference.msr", "acquired.msr", "truth.msr")]


def test_synth_simulate_compare(tmp_path):
    ref, acq, truth = synth(tmp_path)
    cfg = str(CONFIGS / "default.json")
    code = cli.main(["simulate", "--config", cfg, "--out", str(tmp_path), "--reference", ref,
                     "--acquired", acq, "--truth", truth, "--capacity-bits", "2000"])
    assert code == 0
    metrics = json.loads((tmp_path / "metrics.json").read_text())
    assert metrics["bits_used"] <= 2000
    assert metrics["payload_bytes"] == (tmp_path / "payload.msp").stat().st_size
    assert load_raster(tmp_path / "reconstructed.msr").shape == (4, 16, 16)
    assert (tmp_path / "confusion.ppm").read_bytes().startswith(b"P6")

    code = cli.main(["compare", "--config", cfg, "--out", str(tmp_path), "--reference", ref,
                     "--acquired", acq, "--truth", truth, "--budgets", "0.5,1", "--seeds", "0,1"])
    assert code == 0
    rows = (tmp_path / "compare.csv").read_text().splitlines()
    assert rows[0].split(",") == cli.COMPARE_COLUMNS and len(rows) == 5


def test_simulate_full_pass_is_lossless(tmp_path):
    ref, acq, truth = synth(tmp_path)
    assert cli.main(["simulate", "--config", str(CONFIGS / "default.json"), "--out", str(tmp_path),
                     "--reference", ref, "--acquired", acq, "--truth", truth]) == 0
    metrics = json.loads((tmp_path / "metrics.json").read_text())
    assert metrics["psnr_db"] == "inf" and metrics["encoding_rate"] == 1.0


def test_convert_roundtrip(tmp_path):
    ref, _, _ = synth(tmp_path, bit_depth=8)
    cfg = str(CONFIGS / "default.json")
    assert cli.main(["convert", "--config", cfg, "--out", str(tmp_path), "--input", ref,
                     "--output", "ref", "--ppm-bands", "0,1,2"]) == 0
    pgms = [str(tmp_path / f"ref_band{k}.pgm") for k in range(4)]
    assert (tmp_path / "ref.ppm").exists()
    assert cli.main(["convert", "--config", cfg, "--out", str(tmp_path), "--input", *pgms,
                     "--output", "again.msr"]) == 0
    assert load_raster(tmp_path / "again.msr") == load_raster(ref)
    assert cli.main(["convert", "--config", cfg, "--out", str(tmp_path), "--input", *pgms]) == 1
