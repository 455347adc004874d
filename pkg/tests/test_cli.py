"""Tests for the command-line interface."""

import json

import numpy as np
import pytest

from vlclink.cli import main
from vlclink.metrics import CSV_FIELDS


def run_cli(capsys, *argv: str) -> tuple[int, str, str]:
    """Invoke the CLI in-process and capture its output."""
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestRunCommand:
    """Validate `run`."""

    def test_emits_report_json(self, capsys) -> None:
        """Verify a single point prints one JSON report and exits 0."""
        code, out, err = run_cli(
            capsys,
            "run", "--snr-db", "30", "--mode", "sm4", "--frames", "2", "--seed", "1",
        )
        assert code == 0
        assert err == ""
        doc = json.loads(out)
        assert doc["mode"] == "sm4"
        assert doc["frames"] == 2
        assert doc["config"]["point"] == 30.0

    def test_writes_output_file(self, capsys, tmp_path) -> None:
        """Verify --out writes the report to a file instead of stdout."""
        path = tmp_path / "report.json"
        code, out, _ = run_cli(
            capsys,
            "run", "--snr-db", "30", "--mode", "sm4", "--frames", "2",
            "--out", str(path),
        )
        assert code == 0
        assert out == ""
        assert json.loads(path.read_text())["mode"] == "sm4"

    def test_requires_exactly_one_axis(self, capsys) -> None:
        """Verify both axes on the command line is an error."""
        code, _, err = run_cli(
            capsys,
            "run", "--snr-db", "30", "--distance-m", "1.0", "--mode", "sm4",
        )
        assert code == 1
        assert err.startswith("ERROR ")
        doc = json.loads(err.removeprefix("ERROR "))
        assert doc["error"] == "ValueError"

    def test_config_file_with_flag_override(self, capsys, tmp_path) -> None:
        """Verify flags take precedence over the config file."""
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({
            "mode": "sm16", "snr_db": [25.0], "frames": 2, "seed": 3,
        }))
        code, out, _ = run_cli(
            capsys, "run", "--config", str(cfg_path), "--snr-db", "25",
            "--mode", "sd16",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["mode"] == "sd16"  # flag wins
        assert doc["frames"] == 2  # file value survives


class TestSweepCommands:
    """Validate `sweep-snr` and `sweep-distance`."""

    def test_snr_sweep_csv(self, capsys) -> None:
        """Verify CSV output with the canonical header and one row per point."""
        code, out, _ = run_cli(
            capsys,
            "sweep-snr", "--start", "28", "--stop", "30", "--step", "2",
            "--mode", "sm4", "--frames", "2",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == ",".join(CSV_FIELDS)
        assert len(lines) == 3
        assert lines[1].split(",")[1] == "28.0"

    def test_values_list(self, capsys) -> None:
        """Verify --values takes an explicit comma-separated axis."""
        code, out, _ = run_cli(
            capsys,
            "sweep-distance", "--values", "0.4,0.5", "--mode", "sd4", "--frames", "2",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 3
        assert lines[1].split(",")[0] == "0.4"

    def test_repeats_add_aggregate_rows(self, capsys) -> None:
        """Verify --repeats appends one aggregate row per point."""
        code, out, _ = run_cli(
            capsys,
            "sweep-snr", "--values", "30", "--repeats", "2",
            "--mode", "sm4", "--frames", "2",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 4  # header + 2 seeds + aggregate

    def test_missing_axis_spec_is_error(self, capsys) -> None:
        """Verify a sweep without measurements is refused."""
        code, _, err = run_cli(capsys, "sweep-snr", "--mode", "sm4")
        assert code == 1
        assert err.startswith("ERROR ")


class TestCalibrateCommand:
    """Validate `calibrate`."""

    def test_emits_gain_json(self, capsys) -> None:
        """Verify the calibration result is a JSON document with the gain."""
        code, out, _ = run_cli(capsys, "calibrate")
        assert code == 0
        doc = json.loads(out)
        np.testing.assert_allclose(doc["gain"], 3.877099165817e-02, rtol=1e-6)
        assert doc["mode"] == "sm64"
        assert doc["target_distance_m"] == 1.7
        np.testing.assert_allclose(doc["geometry"]["gain"], doc["gain"])


class TestSelftestCommand:
    """Validate `selftest`."""

    def test_exit_zero_and_all_pass(self, capsys) -> None:
        """Verify the invariant suite passes and exits 0."""
        code, out, _ = run_cli(capsys, "selftest")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines and all(line.startswith("PASS") for line in lines)


class TestErrorReporting:
    """Validate the uniform error line."""

    def test_error_line_shape(self, capsys) -> None:
        """Verify failures land on stderr as one ERROR + JSON line."""
        code, _, err = run_cli(
            capsys, "run", "--snr-db", "30", "--mode", "nonsense",
        )
        assert code == 1
        assert err.startswith("ERROR ")
        doc = json.loads(err.removeprefix("ERROR "))
        assert set(doc) == {"error", "message"}
