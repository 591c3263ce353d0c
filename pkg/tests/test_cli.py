import json

import pytest

from fdrelay.cli import EXIT_INVALID, EXIT_OK, load_config, main


def test_solve(capsys):
    assert main(["solve", "--n", "2", "--pt-dbw", "20", "--trial-index", "1"]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["j_lower"] <= out["j_max"] <= out["j_up"]
    assert out["config"]["relay_power"] == pytest.approx(50.0)


def test_sweep_and_compare(tmp_path, capsys):
    cfg = tmp_path / "run.conf"
    cfg.write_text("pt_grid_dbw = 10, 20\nrsi_levels_db = -40\nn_values = 2\n"
                   "seed = 3  # comment\n")
    out = tmp_path / "r.csv"
    assert main(["sweep", "--config", str(cfg), "--trials", "2", "--out", str(out)]) == EXIT_OK
    assert out.exists() and out.with_suffix(".json").exists()
    capsys.readouterr()
    base = tmp_path / "hd.csv"
    base.write_text("pt_dbw,mean_rate\n10,1.0\n")
    assert main(["compare", "--report", str(out), "--baseline", str(base)]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("n,rsi_db,pt_dbw")
    assert any(l.endswith("unmatched") for l in lines[1:])


def test_invalid_inputs(tmp_path, capsys):
    assert main(["sweep", "--trials", "0"]) == EXIT_INVALID
    bad = tmp_path / "bad.conf"
    bad.write_text("nonsense_key = 1\n")
    assert main(["sweep", "--config", str(bad)]) == EXIT_INVALID
    assert main(["solve", "--n", "1"]) == EXIT_INVALID
    assert "M ≥ 4 required" in capsys.readouterr().err


def test_load_config_json(tmp_path):
    p = tmp_path / "c.json"
    p.write_text('{"trials": 5, "zfc_mode": "strict"}')
    assert load_config(p) == {"trials": 5, "zfc_mode": "strict"}
