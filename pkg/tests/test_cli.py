import pandas as pd
import pytest

from noise_enhanced_qht.cli import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, build_parser, run_command
from noise_enhanced_qht.output import CHERNOFF_COLUMNS, CURVE_COLUMNS, SWEEP_COLUMNS


class TestParser:
    def test_requires_command(self):
        assert run_command([]) == EXIT_CONFIG

    def test_rejects_unknown_probe(self):
        assert run_command(["simulate", "--probe", "squeezed"]) == EXIT_CONFIG

    def test_help(self):
        assert run_command(["--help"]) == EXIT_OK

    def test_sweep_arguments(self):
        args = build_parser().parse_args(["sweep", "--param", "ratio", "--values", "0", "1.5", "--mode", "fix_T2"])
        assert args.values == [0.0, 1.5]
        assert args.mode == "fix_T2"


class TestCommands:
    def test_simulate_writes_curve(self, tmp_path, capsys):
        out = tmp_path / "curve.csv"
        assert run_command(["simulate", "--preset", "fig3", "--t2", "0.6", "--out", str(out)]) == EXIT_OK
        frame = pd.read_csv(out, float_precision="round_trip")
        assert list(frame.columns) == CURVE_COLUMNS
        assert len(frame) == 400
        assert frame["p_noisy"].iloc[0] == 0.5
        assert "η" in capsys.readouterr().out

    def test_csv_is_reproducible(self, tmp_path):
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["simulate", "--t2", "0.6", "--grid-points", "50"]
        assert run_command(argv + ["--out", str(first)]) == EXIT_OK
        assert run_command(argv + ["--out", str(second)]) == EXIT_OK
        assert first.read_bytes() == second.read_bytes()
        assert b"\r\n" not in first.read_bytes()
        assert not list(tmp_path.glob("*.tmp"))

    def test_conditions_isotropic(self, capsys):
        assert run_command(["conditions", "--preset", "fig3", "--t2", "5.5"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        condition_lines = [line for line in lines if line.startswith("조건")]
        assert len(condition_lines) == 2
        assert all("False" in line for line in condition_lines)

    def test_unphysical_exit_code(self, capsys):
        assert run_command(["simulate", "--preset", "fig3", "--t2", "12"]) == EXIT_CONFIG
        assert "2·T1" in capsys.readouterr().err

    def test_degenerate_exit_code(self, tmp_path):
        config = tmp_path / "same.ini"
        config.write_text("[hypothesis1]\ntheta_deg = 75\n", encoding="utf-8")
        assert run_command(["conditions", "--config", str(config)]) == EXIT_NUMERICAL

    def test_bad_config_file(self, tmp_path, capsys):
        config = tmp_path / "bad.ini"
        config.write_text("[time]\nhorizon_s = 0\ngrid_points = 1\n", encoding="utf-8")
        assert run_command(["simulate", "--config", str(config)]) == EXIT_CONFIG
        assert len(capsys.readouterr().err.strip().splitlines()) == 2

    def test_eta_report(self, tmp_path):
        out = tmp_path / "eta.csv"
        assert run_command(["eta", "--t2", "0.6", "--out", str(out)]) == EXIT_OK
        frame = pd.read_csv(out, float_precision="round_trip")
        assert bool(frame["exceeds_unitary_max"].iloc[0])

    def test_sweep(self, tmp_path):
        out = tmp_path / "sweep.csv"
        assert run_command(["sweep", "--param", "t2", "--values", "1.0", "0.6", "--out", str(out)]) == EXIT_OK
        frame = pd.read_csv(out, float_precision="round_trip")
        assert list(frame.columns) == SWEEP_COLUMNS
        assert list(frame["param_value"]) == [1.0, 0.6]

    def test_chernoff(self, tmp_path):
        out = tmp_path / "chernoff.csv"
        argv = ["chernoff", "--t2", "0.6", "--grid-points", "30", "--out", str(out)]
        assert run_command(argv) == EXIT_OK
        frame = pd.read_csv(out, float_precision="round_trip")
        assert list(frame.columns) == CHERNOFF_COLUMNS
        assert frame["exponent_noisy"].iloc[0] == pytest.approx(0.0, abs=1e-10)

    def test_invalid_thread_setting(self, monkeypatch):
        monkeypatch.setenv("QHT_THREADS", "zero")
        assert run_command(["sweep", "--param", "t2", "--values", "1.0"]) == EXIT_CONFIG

    @pytest.mark.slow
    def test_fig4_bundle(self, tmp_path):
        out = tmp_path / "fig4.csv"
        assert run_command(["fig4", "--out", str(out)]) == EXIT_OK
        frame = pd.read_csv(out, float_precision="round_trip")
        assert frame["label"].nunique() == 5
        assert len(frame) == 5 * 300

    def test_sweep_follows_config_and_flags(self, tmp_path):
        config = tmp_path / "run.ini"
        config.write_text("[noise]\np_ground = 0.95\n[time]\nhorizon_s = 3\n", encoding="utf-8")
        plain, configured, flagged = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
        argv = ["sweep", "--param", "t2", "--values", "0.6"]
        assert run_command(argv + ["--out", str(plain)]) == EXIT_OK
        assert run_command(argv + ["--config", str(config), "--out", str(configured)]) == EXIT_OK
        assert run_command(argv + ["--probe", "along_x", "--out", str(flagged)]) == EXIT_OK
        assert plain.read_bytes() != configured.read_bytes()
        assert plain.read_bytes() != flagged.read_bytes()
        frame = pd.read_csv(configured, float_precision="round_trip")
        assert frame["t_star_s"].iloc[0] <= 3.0

    def test_sweep_rejects_swept_flag(self, capsys):
        assert run_command(["sweep", "--param", "t2", "--values", "0.6", "--t2", "1.0"]) == EXIT_CONFIG
        assert "--t2" in capsys.readouterr().err
        assert run_command(["sweep", "--param", "bc", "--values", "0.75", "--bc", "1.0"]) == EXIT_CONFIG
        assert run_command(["sweep", "--param", "ratio", "--mode", "fix_T2", "--t1", "2.0"]) == EXIT_CONFIG

    def test_sweep_control_defaults_to_fig4(self, tmp_path):
        out = tmp_path / "bc.csv"
        assert run_command(["sweep", "--param", "bc", "--values", "0", "0.75", "--out", str(out)]) == EXIT_OK
        frame = pd.read_csv(out, float_precision="round_trip")
        assert list(frame.columns) == SWEEP_COLUMNS
        assert frame["ceiling_excess"].iloc[0] <= 1e-9
        assert frame["ceiling_excess"].iloc[1] > 0.0

    def test_fig3_degenerate_config(self, tmp_path):
        config = tmp_path / "same.ini"
        config.write_text("[hypothesis1]\ntheta_deg = 75\n", encoding="utf-8")
        assert run_command(["fig3", "--config", str(config)]) == EXIT_NUMERICAL

    def test_unwritable_output(self, tmp_path, capsys):
        blocker = tmp_path / "blocker"
        blocker.write_text("", encoding="utf-8")
        assert run_command(["conditions", "--out", str(blocker / "report.csv")]) == EXIT_CONFIG
        assert "입출력" in capsys.readouterr().err
