import json
import math
from pathlib import Path

import numpy as np
import pytest

from ghostsim.cli import main
from ghostsim.config import load_config, parse_config
from ghostsim.exceptions import ConfigurationError
from ghostsim.integrals import total_photon_number, visibility
from ghostsim.sweep import RECORD_FIELDS, records_to_csv, report_threshold, run_sweep, worker_count

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

GEOMETRY_SWEEP = """
[geometry]
delta_r = 100
q = 1
nodes = 512

[sweep]
axis = delta_r
min = 10
max = 1e4
count = 12
spacing = log
output = {out}
format = {fmt}
"""


def write(tmp_path, text, name="run.ini"):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestParsing:
    def test_defaults(self):
        cfg = parse_config("[geometry]\ndelta_r = 5\n")
        assert cfg.geometry.geometry.delta_r == 5.0
        assert cfg.geometry.q == 1.0
        assert (cfg.geometry.cutoffs.k_min, cfg.geometry.cutoffs.k_max) == (1e-6, 1.0)
        assert cfg.ctx.system == "natural"

    def test_unknown_key_reports_line_and_field(self):
        with pytest.raises(ConfigurationError) as info:
            parse_config("[geometry]\ndelta_r = 5\nqq = 2\n")
        assert info.value.line == 3
        assert info.value.field == "geometry.qq"

    def test_unknown_section(self):
        with pytest.raises(ConfigurationError):
            parse_config("[geometri]\ndelta_r = 5\n")

    def test_bad_number(self):
        with pytest.raises(ConfigurationError) as info:
            parse_config("[geometry]\ndelta_r = five\n")
        assert info.value.field == "geometry.delta_r"

    def test_empty_sweep_range(self):
        with pytest.raises(ConfigurationError):
            parse_config("[geometry]\ndelta_r = 5\n[sweep]\naxis = delta_r\nmin = 10\nmax = 1\ncount = 5\n")

    def test_bad_axis(self):
        with pytest.raises(ConfigurationError):
            parse_config("[geometry]\ndelta_r = 5\n[sweep]\naxis = colour\nmin = 1\nmax = 2\ncount = 3\n")

    def test_log_sweep_needs_positive(self):
        with pytest.raises(ConfigurationError):
            parse_config("[geometry]\ndelta_r = 5\n[sweep]\naxis = delta_r\nmin = 0\nmax = 2\ncount = 3\nspacing = log\n")

    def test_scenario_section(self):
        cfg = load_config(CONFIGS / "tomography.ini")
        scn = cfg.scenario
        assert scn.T == 1000.0
        assert scn.r_BR.as_array().tolist() == [50.0, 10.0, 0.0]

    def test_scenario_partition_violation(self):
        text = "[scenario]\nr_AL = 5,0,0\nr_AR = 6,0,0\nr_BL = -5,1,0\nr_BR = 5,1,0\n"
        with pytest.raises(ConfigurationError):
            parse_config(text)

    def test_shipped_configs_parse(self):
        for p in CONFIGS.glob("*.ini"):
            load_config(p)


class TestSweep:
    def test_visibility_column(self, tmp_path):
        cfg = parse_config(GEOMETRY_SWEEP.format(out=tmp_path / "o.csv", fmt="csv"))
        records, summary = run_sweep(cfg, workers=2)
        assert len(records) == 12
        for r in records:
            assert r.visibility == pytest.approx(math.exp(-r.n / 2), rel=1e-15)
        assert summary["axis"] == "delta_r"

    def test_worker_count_irrelevant(self, tmp_path):
        cfg = parse_config(GEOMETRY_SWEEP.format(out=tmp_path / "o.csv", fmt="csv"))
        a = records_to_csv(run_sweep(cfg, workers=1)[0])
        b = records_to_csv(run_sweep(cfg, workers=4)[0])
        assert a == b

    def test_charge_sweep_scaling(self, tmp_path):
        text = "[geometry]\ndelta_r = 100\nnodes = 512\n[sweep]\naxis = charge\nmin = 1\nmax = 20\ncount = 6\n"
        records, summary = run_sweep(parse_config(text))
        v_e = records[0].visibility
        assert records[0].q == 1.0
        for r in records:
            assert r.visibility == pytest.approx(v_e ** (r.q**2), rel=1e-10)
        assert summary["slope_n_vs_q_squared"] == pytest.approx(records[0].n, rel=1e-10)

    def test_scenario_sweep(self, tmp_path):
        cfg = load_config(CONFIGS / "tomography.ini")
        records, _ = run_sweep(cfg)
        assert len(records) == 20
        vis = [r.visibility for r in records]
        assert np.all(np.diff(vis) < 0)
        for r in records:
            assert abs(r.c_rl) <= r.visibility + 1e-12
            assert 0 <= r.entropy_bits <= 1

    def test_threads_env(self, monkeypatch):
        monkeypatch.setenv("GHOSTSIM_THREADS", "3")
        assert worker_count() == 3
        monkeypatch.setenv("GHOSTSIM_THREADS", "zero")
        with pytest.raises(ConfigurationError):
            worker_count()


class TestThreshold:
    def test_monotone_in_delta_r(self):
        qs = []
        for dr in (10, 100, 1000, 1e4):
            cfg = parse_config(f"[geometry]\ndelta_r = {dr}\n")
            qs.append(report_threshold(cfg.geometry, cfg.ctx)["q_star_n1"])
        assert np.all(np.diff(qs) < 0)

    def test_zero_charge_unbounded(self):
        cfg = parse_config("[geometry]\ndelta_r = 100\nq = 0\n")
        rep = report_threshold(cfg.geometry, cfg.ctx)
        assert rep["bounded"] is False
        assert math.isinf(rep["q_star_n1"])

    def test_values(self):
        cfg = load_config(CONFIGS / "threshold.ini")
        rep = report_threshold(cfg.geometry, cfg.ctx)
        n_e = total_photon_number(100.0)
        assert rep["n_at_q"] == pytest.approx(n_e, rel=1e-14)
        assert rep["q_star_n1"] == pytest.approx(1 / math.sqrt(n_e), rel=1e-12)
        assert rep["q_star_half_visibility"] == pytest.approx(math.sqrt(2 * math.log(2) / n_e), rel=1e-12)
        assert rep["n_at_nominal"] == pytest.approx(137**2 * n_e, rel=1e-12)


class TestCli:
    def test_sweep_deterministic(self, tmp_path):
        cfg = write(tmp_path, GEOMETRY_SWEEP.format(out=tmp_path / "a.csv", fmt="both"))
        assert main(["sweep", str(cfg)]) == 0
        assert main(["sweep", str(cfg), "--output", str(tmp_path / "b.csv"), "--workers", "3"]) == 0
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        payload = json.loads((tmp_path / "a.json").read_text())
        assert payload["fields"] == list(RECORD_FIELDS)
        assert len(payload["records"]) == 12
        header = (tmp_path / "a.csv").read_text().splitlines()[0].split(",")
        assert header == list(RECORD_FIELDS)

    def test_json_only(self, tmp_path):
        cfg = write(tmp_path, GEOMETRY_SWEEP.format(out=tmp_path / "r.json", fmt="json"))
        assert main(["sweep", str(cfg)]) == 0
        payload = json.loads((tmp_path / "r.json").read_text())
        for rec in payload["records"]:
            assert rec["visibility"] == pytest.approx(visibility(rec["n"]), rel=1e-15)

    def test_unknown_key_exit_2(self, tmp_path, capsys):
        cfg = write(tmp_path, "[geometry]\ndelta_r = 5\nqq = 1\n")
        assert main(["threshold", str(cfg)]) == 2
        err = capsys.readouterr().err
        assert "line 3" in err and "geometry.qq" in err

    def test_empty_range_exit_2(self, tmp_path):
        cfg = write(tmp_path, "[geometry]\ndelta_r = 5\n[sweep]\naxis = delta_r\nmin = 10\nmax = 1\ncount = 5\noutput = x.csv\n")
        assert main(["sweep", str(cfg)]) == 2

    def test_missing_file_exit_2(self, tmp_path):
        assert main(["threshold", str(tmp_path / "nope.ini")]) == 2

    def test_unwritable_output_exit_2(self, tmp_path):
        cfg = write(tmp_path, GEOMETRY_SWEEP.format(out=tmp_path / "missing" / "o.csv", fmt="csv"))
        assert main(["sweep", str(cfg)]) == 2

    def test_threshold_output(self, capsys):
        assert main(["threshold", str(CONFIGS / "threshold.ini")]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["n_at_nominal"] > 1
        assert rep["visibility_at_nominal"] < 1e-40

    def test_scenario_command(self, capsys):
        assert main(["scenario", str(CONFIGS / "tomography.ini")]) == 0
        rec = json.loads(capsys.readouterr().out)
        assert rec["mode"] == "scenario"
        assert 0 < rec["visibility"] < 1

    def test_verify_exit_codes(self, capsys):
        assert main(["verify"]) == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out
        assert main(["verify", "--flip-adjoint-sign"]) == 3
        assert main(["verify", "--fock-N", "2"]) == 3
