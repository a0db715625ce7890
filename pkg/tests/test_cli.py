"""Tests for the command-line front end: argument handling, output formats,
exit codes, and numeric agreement with the library."""

from __future__ import annotations

import csv
import io
import json
from typing import Dict, List, Tuple

import pytest

from taxdelay.cli import EXIT_INVALID_INPUT, EXIT_OK, main

TERMINAL_ARGS = ["--mode", "terminal", "--c", "1.2", "--lambda", "1",
                 "--mu", "1", "--q", "0.05", "--ell", "0.1"]
INJECTION_ARGS = ["--mode", "injection", "--c", "1.2", "--lambda", "1",
                  "--mu", "1", "--q", "0.05", "--ell", "0.2",
                  "--varphi", "1.5"]


def run_cli(capsys, *argv: str) -> Tuple[int, str, str]:
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def parse_csv(text: str) -> Tuple[List[str], List[Dict[str, str]]]:
    rows = list(csv.reader(io.StringIO(text)))
    header = rows[0]
    return header, [dict(zip(header, row)) for row in rows[1:]]


# ---------------------------------------------------------------------------
# optimize
# ---------------------------------------------------------------------------


class TestOptimize:
    def test_terminal_csv(self, capsys):
        rc, out, err = run_cli(capsys, "optimize", *TERMINAL_ARGS,
                               "--S", "-5", "--x", "0.25")
        assert rc == EXIT_OK
        header, rows = parse_csv(out)
        assert header == ["mode", "threshold", "boundary_case", "value",
                          "h_residual"]
        assert len(rows) == 1
        row = rows[0]
        assert row["mode"] == "terminal"
        assert row["boundary_case"] == "false"
        assert float(row["threshold"]) == pytest.approx(0.5228512, abs=1e-6)
        assert abs(float(row["h_residual"])) < 1e-7

    def test_injection_json_single_object(self, capsys):
        rc, out, err = run_cli(capsys, "optimize", *INJECTION_ARGS,
                               "--x", "0.25", "--format", "json")
        assert rc == EXIT_OK
        payload = json.loads(out)
        assert isinstance(payload, dict)
        assert payload["mode"] == "injection"
        assert payload["boundary_case"] is False
        assert payload["threshold"] == pytest.approx(0.5314597, abs=1e-6)

    def test_boundary_case_reported(self, capsys):
        rc, out, err = run_cli(capsys, "optimize", *TERMINAL_ARGS,
                               "--S", "3", "--format", "json")
        assert rc == EXIT_OK
        payload = json.loads(out)
        assert payload["boundary_case"] is True
        assert payload["threshold"] == 0.0

    def test_injection_requires_varphi(self, capsys):
        rc, out, err = run_cli(capsys, "optimize", "--mode", "injection",
                               "--c", "1.2", "--lambda", "1", "--mu", "1",
                               "--q", "0.05", "--ell", "0.2")
        assert rc == EXIT_INVALID_INPUT
        assert "error:" in err

    def test_invalid_tax_rate_is_input_error(self, capsys):
        rc, out, err = run_cli(capsys, "optimize", "--mode", "terminal",
                               "--c", "1.2", "--lambda", "1", "--mu", "1",
                               "--q", "0.05", "--ell", "1.5")
        assert rc == EXIT_INVALID_INPUT
        assert "error:" in err

    def test_invalid_model_is_input_error(self, capsys):
        rc, out, err = run_cli(capsys, "optimize", "--mode", "terminal",
                               "--c", "-1", "--lambda", "1", "--mu", "1",
                               "--q", "0.05", "--ell", "0.1")
        assert rc == EXIT_INVALID_INPUT


# ---------------------------------------------------------------------------
# reproduce
# ---------------------------------------------------------------------------


class TestReproduce:
    def test_table_one_values(self, capsys):
        rc, out, err = run_cli(capsys, "reproduce", "1")
        assert rc == EXIT_OK
        header, rows = parse_csv(out)
        assert header == ["ell", "intercept", "slope", "rhs_intercept",
                          "rhs_slope", "threshold"]
        assert [r["ell"] for r in rows] == ["0.1", "0.2", "0.3"]
        assert float(rows[0]["intercept"]) == pytest.approx(0.296297, abs=1e-5)
        assert float(rows[0]["rhs_intercept"]) == pytest.approx(1.142857,
                                                                abs=1e-5)
        assert float(rows[0]["rhs_slope"]) == pytest.approx(-0.047619,
                                                            abs=1e-5)

    def test_json_list(self, capsys):
        rc, out, err = run_cli(capsys, "reproduce", "3", "--format", "json")
        assert rc == EXIT_OK
        payload = json.loads(out)
        assert isinstance(payload, list) and len(payload) == 3
        assert payload[0]["rhs_intercept"] == pytest.approx(24.0)
        assert payload[0]["rhs_slope"] == pytest.approx(-24.0)

    def test_unknown_table_is_input_error(self, capsys):
        rc, out, err = run_cli(capsys, "reproduce", "4")
        assert rc == EXIT_INVALID_INPUT
        assert "error:" in err

    def test_out_writes_file(self, capsys, tmp_path):
        target = tmp_path / "table1.csv"
        rc, out, err = run_cli(capsys, "reproduce", "1", "--out", str(target))
        assert rc == EXIT_OK
        assert out == ""
        header, rows = parse_csv(target.read_text(encoding="utf-8"))
        assert len(rows) == 3

    def test_precision_controls_rendering(self, capsys):
        rc, out, err = run_cli(capsys, "reproduce", "1", "--precision", "3")
        assert rc == EXIT_OK
        _, rows = parse_csv(out)
        assert rows[0]["intercept"] == "0.296"

    def test_nonpositive_precision_is_input_error(self, capsys):
        rc, out, err = run_cli(capsys, "reproduce", "1", "--precision", "0")
        assert rc == EXIT_INVALID_INPUT


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


class TestSweep:
    def test_tax_rate_sweep(self, capsys):
        rc, out, err = run_cli(capsys, "sweep", *TERMINAL_ARGS, "--S", "-5",
                               "--param", "ell", "--from", "0.1",
                               "--to", "0.3", "--steps", "3")
        assert rc == EXIT_OK
        header, rows = parse_csv(out)
        assert header == ["param", "param_value", "threshold", "value",
                          "boundary_case"]
        assert len(rows) == 3
        thresholds = [float(r["threshold"]) for r in rows]
        assert thresholds[0] < thresholds[1] < thresholds[2]

    def test_existence_map(self, capsys):
        rc, out, err = run_cli(capsys, "sweep", *TERMINAL_ARGS,
                               "--param", "S", "--from", "-8", "--to", "0",
                               "--steps", "5", "--q-from", "0.01",
                               "--q-to", "0.09", "--q-steps", "3")
        assert rc == EXIT_OK
        header, rows = parse_csv(out)
        assert header == ["S", "q", "h_at_zero", "positive_threshold"]
        assert len(rows) == 15
        flags = {r["positive_threshold"] for r in rows}
        assert flags == {"true", "false"}

    def test_existence_map_needs_all_grid_flags(self, capsys):
        rc, out, err = run_cli(capsys, "sweep", *TERMINAL_ARGS,
                               "--param", "S", "--from", "-8", "--to", "0",
                               "--steps", "5", "--q-from", "0.01")
        assert rc == EXIT_INVALID_INPUT
        assert "error:" in err

    def test_existence_map_terminal_s_only(self, capsys):
        rc, out, err = run_cli(capsys, "sweep", *TERMINAL_ARGS,
                               "--param", "ell", "--from", "0.1",
                               "--to", "0.3", "--steps", "3",
                               "--q-from", "0.01", "--q-to", "0.09",
                               "--q-steps", "3")
        assert rc == EXIT_INVALID_INPUT

    def test_single_step_grid_is_input_error(self, capsys):
        rc, out, err = run_cli(capsys, "sweep", *TERMINAL_ARGS, "--S", "-5",
                               "--param", "ell", "--from", "0.1",
                               "--to", "0.3", "--steps", "1")
        assert rc == EXIT_INVALID_INPUT


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


class TestSimulate:
    def test_terminal_run_agrees_with_formula(self, capsys):
        rc, out, err = run_cli(capsys, "simulate", *TERMINAL_ARGS,
                               "--S", "-5", "--b", "2", "--paths", "4000",
                               "--horizon", "200", "--seed", "7")
        assert rc == EXIT_OK
        header, rows = parse_csv(out)
        row = rows[0]
        assert header[:2] == ["mode", "threshold"]
        assert float(row["threshold"]) == 2.0
        assert float(row["stderr"]) > 0.0
        assert abs(float(row["z_score"])) < 5.0
        assert row["bias_exceeded"] == "false"

    def test_repeat_run_bit_identical(self, capsys):
        argv = ["simulate", *TERMINAL_ARGS, "--S", "-5", "--b", "2",
                "--paths", "2000", "--horizon", "200", "--seed", "11"]
        rc1, out1, _ = run_cli(capsys, *argv)
        rc2, out2, _ = run_cli(capsys, *argv)
        assert rc1 == rc2 == EXIT_OK
        assert out1 == out2

    def test_injection_defaults_to_optimum(self, capsys):
        rc, out, err = run_cli(capsys, "simulate", *INJECTION_ARGS,
                               "--paths", "2000", "--horizon", "200",
                               "--seed", "3", "--format", "json")
        assert rc == EXIT_OK
        payload = json.loads(out)
        assert payload["threshold"] == pytest.approx(0.5314597, abs=1e-6)
        assert payload["ruin_fraction"] is None

    def test_short_horizon_warns(self, capsys):
        rc, out, err = run_cli(capsys, "simulate", *TERMINAL_ARGS,
                               "--S", "-5", "--b", "2", "--paths", "2000",
                               "--horizon", "5", "--seed", "1")
        assert rc == EXIT_OK
        assert "bias" in err
        _, rows = parse_csv(out)
        assert rows[0]["bias_exceeded"] == "true"

    def test_antithetic_needs_even_paths(self, capsys):
        rc, out, err = run_cli(capsys, "simulate", *TERMINAL_ARGS,
                               "--S", "-5", "--b", "2", "--paths", "2001",
                               "--horizon", "200", "--seed", "1",
                               "--antithetic")
        assert rc == EXIT_INVALID_INPUT
        assert "error:" in err


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------


class TestValidate:
    def test_battery_passes(self, capsys):
        rc, out, err = run_cli(capsys, "validate")
        assert rc == EXIT_OK
        header, rows = parse_csv(out)
        assert header == ["name", "passed", "detail"]
        assert len(rows) >= 8
        assert all(r["passed"] == "true" for r in rows)
        assert all(r["detail"] for r in rows)
