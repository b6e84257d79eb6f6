import json

import numpy as np
import pytest

from oscillab.cli import ConfigError, parse_config_file, parse_j_range, plan_grid, run


class TestConfigParsing:
    def test_flat_keys_and_sections(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            """
            [run]
            experiment = necessity   # trailing comment
            s = 0.5
            p = inf
            q = inf
            j = 4..7
            """
        )
        out = parse_config_file(cfg)
        assert out["experiment"] == "necessity"
        assert out["p"] == "inf"

    def test_malformed_line_raises(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("experiment necessity\n")
        with pytest.raises(ConfigError):
            parse_config_file(cfg)

    def test_j_range_forms(self):
        assert parse_j_range("6..9") == [6, 7, 8, 9]
        assert parse_j_range("4,6,8") == [4, 6, 8]


class TestPlanGrid:
    def test_low_s_fixed_period(self):
        g = plan_grid(0.5, 12)
        assert g.period == 32.0
        assert g.max_resolved_freq >= 2.0 * 3.0 * 2.0**12

    def test_high_s_period_grows(self):
        g4 = plan_grid(2.0, 4)
        g6 = plan_grid(2.0, 6)
        assert g6.period > g4.period
        assert g6.max_resolved_freq >= 2.0 * 3.0 * 2.0**6

    def test_budget_guard(self):
        with pytest.raises(ConfigError):
            plan_grid(2.0, 14)

    def test_overrides(self):
        g = plan_grid(0.5, 6, period=64.0, points=2**14)
        assert g.period == 64.0 and g.points == 2**14


class TestRunCommand:
    def test_malformed_config_no_partial_report(self, tmp_path):
        cfg = tmp_path / "broken.cfg"
        cfg.write_text("experiment == what\n")
        out = tmp_path / "out"
        rc = run(["run", str(cfg), "--out", str(out)])
        assert rc != 0
        assert not (out / "necessity.json").exists()

    def test_unknown_experiment(self, tmp_path):
        rc = run(["run", "frobnicate", "--out", str(tmp_path)])
        assert rc != 0

    def test_necessity_smoke_and_determinism(self, tmp_path):
        args = [
            "run", "necessity", "--s", "0.5", "--p", "inf", "--q", "inf",
            "--region", "I", "--j", "4..7", "--L", "32", "--N", str(2**16),
            "--out", str(tmp_path / "a"), "--no-figures",
        ]
        assert run(args) == 0
        body = json.loads((tmp_path / "a" / "necessity.json").read_text())
        for key in ("experiment", "s", "n", "params", "j_values", "measured",
                    "fitted_slope", "predicted_slope", "max_residual", "pass", "config"):
            assert key in body
        assert body["experiment"] == "necessity"
        assert body["params"]["critical_order"] == pytest.approx(-0.5)
        first = (tmp_path / "a" / "necessity.json").read_bytes()
        assert run(args) == 0  # identical config and seed: byte-identical report
        assert (tmp_path / "a" / "necessity.json").read_bytes() == first

    def test_csv_and_figures_emitted(self, tmp_path):
        args = [
            "run", "scaling", "--family", "f_plain", "--s", "0.5", "--j", "4..7",
            "--L", "32", "--N", str(2**16), "--out", str(tmp_path),
        ]
        assert run(args) == 0
        csvs = list(tmp_path.glob("scaling_*.csv"))
        assert len(csvs) == 3
        header, first = csvs[0].read_text().splitlines()[:2]
        assert header == "j,value"
        assert first.startswith("4,")
        assert len(list(tmp_path.glob("scaling_*.png"))) == 3

    def test_kernel_dump_sidecar(self, tmp_path):
        args = [
            "run", "kernel", "--s", "0.5", "--j", "4..7", "--L", "32",
            "--N", str(2**16), "--out", str(tmp_path), "--no-figures",
        ]
        assert run(args) == 0
        bins = sorted(tmp_path.glob("*.bin"))
        assert len(bins) == 2
        raw = np.fromfile(bins[0], dtype="<c16")
        assert raw.size == 2**16
        sidecar = bins[0].with_suffix(".txt").read_text()
        assert "a_prime" in sidecar and "points = 65536" in sidecar

    def test_goal_sum_smoke(self, tmp_path):
        args = [
            "run", "goal-sum", "--s", "0.5", "--j", "4..7", "--radius", "0.25",
            "--L", "32", "--N", str(2**16), "--out", str(tmp_path), "--no-figures",
        ]
        assert run(args) == 0
        body = json.loads((tmp_path / "goal-sum.json").read_text())
        assert body["params"]["m"] == pytest.approx(-0.375)
        assert body["params"]["running_total"] > 0

    def test_decompose_smoke(self, tmp_path):
        args = [
            "run", "decompose", "--s", "0.5", "--j", "4..7", "--lattice-radius", "8",
            "--out", str(tmp_path), "--no-figures",
        ]
        assert run(args) == 0
        body = json.loads((tmp_path / "decompose.json").read_text())
        assert len(body["params"]["residuals"]) == 4

    def test_lemmas_smoke(self, tmp_path):
        args = [
            "run", "lemmas", "--s", "0.5", "--j", "4..7", "--L", "32",
            "--N", str(2**16), "--out", str(tmp_path), "--no-figures",
        ]
        assert run(args) == 0
        body = json.loads((tmp_path / "lemmas.json").read_text())
        assert "t_farfield" in body["params"]["constants"]

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "experiment = scaling\nfamily = f_plain\ns = 0.5\nj = 4..7\nL = 32\nN = 65536\nfigures = false\n"
        )
        rc = run(["run", str(cfg), "--out", str(tmp_path / "o"), "--j", "5..8"])
        assert rc == 0
        body = json.loads((tmp_path / "o" / "scaling.json").read_text())
        assert body["j_values"][0] == 5.0  # flag overrode the file
