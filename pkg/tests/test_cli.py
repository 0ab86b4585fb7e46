"""Exit codes, output layout and config round trips for the CLI."""

import json
import math
import subprocess
import sys

import pytest

from greedycert.cli import main


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestCert:
    def test_two_pair_partial_factor(self, capsys):
        code, obj = run_json(capsys, [
            "cert", "--dict", "example1", "--theta1", "0.2618", "--theta2",
            "0.7854", "--qstar", "0,1", "--q", "0", "--alg", "omp"])
        assert code == 0
        assert list(obj) == ["config", "report"]
        assert obj["report"]["aggregate"] == pytest.approx(1.3660, abs=1e-3)
        assert obj["config"]["mode"] == "subset"

    def test_cardinality_mode(self, capsys):
        code, obj = run_json(capsys, [
            "cert", "--dict", "gaussian", "--m", "20", "--n", "40",
            "--qstar", "0,1,2", "--card", "1", "--alg", "ols", "--seed", "5"])
        assert code == 0
        assert obj["config"]["card"] == 1
        assert isinstance(obj["report"]["verdict"], bool)

    def test_brc_mode(self, capsys):
        code, obj = run_json(capsys, [
            "cert", "--dict", "example1", "--theta1", str(math.pi / 12),
            "--theta2", str(math.pi / 4), "--qstar", "0,1", "--brc"])
        assert code == 0
        assert obj["report"]["verdict"] is True
        assert obj["report"]["aggregate"] == pytest.approx(1.3660254, abs=1e-6)

    def test_brc_rejects_ols(self, capsys):
        assert main(["cert", "--dict", "example1", "--qstar", "0,1",
                     "--brc", "--alg", "ols"]) == 2
        assert "ols" in capsys.readouterr().err

    def test_missing_support_rejected(self, capsys):
        assert main(["cert", "--dict", "example1"]) == 2

    def test_unknown_flag_rejected(self, capsys):
        assert main(["cert", "--dict", "example1", "--qstar", "0", "--bogus"]) == 2

    def test_q_and_card_exclusive(self, capsys):
        assert main(["cert", "--dict", "example1", "--qstar", "0,1",
                     "--q", "0", "--card", "1"]) == 2


class TestGreedy:
    def test_trace_fields(self, capsys):
        code, obj = run_json(capsys, [
            "greedy", "--alg", "ols", "--dict", "gaussian", "--m", "50",
            "--n", "100", "--k", "5", "--seed", "7"])
        assert code == 0
        assert obj["status"] == "success"
        assert sorted(r["selected"] for r in obj["iterations"]) == sorted(obj["support"])
        assert len(obj["amplitudes"]) == 5

    def test_output_file(self, tmp_path, capsys):
        path = tmp_path / "trace.json"
        assert main(["greedy", "--dict", "gaussian", "--m", "30", "--n", "40",
                     "--k", "3", "--output", str(path)]) == 0
        obj = json.loads(path.read_text())
        assert list(obj)[0] == "config"
        assert "status" in obj


class TestConstruct:
    def test_failure_not_applicable_when_condition_holds(self, capsys):
        # wide first pair: the full-support condition holds, 0.8165 < 1
        code, obj = run_json(capsys, [
            "construct", "--dict", "example1", "--theta1", str(math.pi / 3),
            "--theta2", str(math.pi / 4), "--qstar", "0,1"])
        assert code == 0
        assert obj["applicable"] is False and obj["input"] is None

    def test_failure_verified_when_condition_fails(self, capsys):
        code, obj = run_json(capsys, [
            "construct", "--dict", "example1", "--theta1", str(math.pi / 12),
            "--theta2", str(math.pi / 4), "--qstar", "0,1"])
        assert code == 0
        assert obj["applicable"] is True
        assert obj["status"] in ("wrong_atom", "tie_failure")
        assert obj["failure_iteration"] == 0

    def test_reach_selects_order(self, capsys):
        code, obj = run_json(capsys, [
            "construct", "--goal", "reach", "--dict", "gaussian", "--m", "20",
            "--n", "40", "--order", "3,7,11", "--seed", "2"])
        assert code == 0
        assert obj["selections"] == [3, 7, 11]

    def test_reach_requires_order(self, capsys):
        assert main(["construct", "--goal", "reach", "--dict", "gaussian",
                     "--m", "20", "--n", "40"]) == 2


class TestBpAndSpark:
    def test_bp_check_reports(self, capsys):
        code, obj = run_json(capsys, [
            "bp-check", "--dict", "gaussian", "--m", "3", "--n", "5",
            "--qstar", "0,1", "--seed", "3"])
        assert code == 0
        assert set(obj) == {"config", "nsp", "brc_bp"}
        assert len(obj["brc_bp"]["patterns"]) == 4

    def test_bp_check_dimension_guard(self, capsys):
        assert main(["bp-check", "--dict", "gaussian", "--m", "2", "--n", "8",
                     "--qstar", "0"]) == 2

    def test_spark_two_pairs(self, capsys):
        code, obj = run_json(capsys, ["spark", "--dict", "example1",
                                      "--theta1", "0.5", "--theta2", "0.7"])
        assert code == 0
        assert obj["spark"] == 4

    def test_spark_null_when_independent(self, capsys):
        # a single-spike pulse gives an identity dictionary
        code, obj = run_json(capsys, ["spark", "--dict", "convolutive",
                                      "--n", "5", "--sigma", "0.01"])
        assert code == 0
        assert obj["spark"] is None


class TestExperiments:
    def test_default_outputs(self, tmp_path, capsys):
        code = main(["scatter", "--m", "50", "--n", "6", "--k", "5",
                     "--trials", "5", "--seed", "4", "--outdir", str(tmp_path)])
        assert code == 0
        printed = capsys.readouterr().out.splitlines()
        assert len(printed) == 2
        csv_path = tmp_path / "scatter-seed4.csv"
        json_path = tmp_path / "scatter-seed4.json"
        assert csv_path.exists() and json_path.exists()
        first = csv_path.read_text().splitlines()[0]
        assert json.loads(first[2:])["kind"] == "scatter"
        assert list(json.loads(json_path.read_text()))[0] == "config"

    def test_phase_curve_columns(self, tmp_path, capsys):
        out = tmp_path / "pc.csv"
        assert main(["phase-curve", "--m", "20", "--n", "40", "--k", "4",
                     "--trials", "5", "--seed", "1", "--output", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[1] == "q,rate_omp,rate_ols"
        assert len(lines) == 2 + 4

    def test_config_round_trip_bytes(self, tmp_path, capsys):
        first = tmp_path / "a.csv"
        assert main(["phase-curve", "--m", "20", "--n", "40", "--k", "4",
                     "--trials", "6", "--seed", "9", "--output", str(first)]) == 0
        again = tmp_path / "b.csv"
        assert main(["phase-curve", "--config", str(first),
                     "--output", str(again)]) == 0
        assert first.read_bytes() == again.read_bytes()

    def test_config_round_trip_from_json(self, tmp_path, capsys):
        first = tmp_path / "a.json"
        assert main(["brc-sigma", "--n", "40", "--sigmas", "1.0,2.0",
                     "--output", str(first)]) == 0
        again = tmp_path / "b.json"
        assert main(["brc-sigma", "--config", str(first),
                     "--output", str(again)]) == 0
        assert first.read_bytes() == again.read_bytes()

    def test_config_conflicts_with_flags(self, tmp_path, capsys):
        first = tmp_path / "a.csv"
        assert main(["scatter", "--m", "50", "--n", "6", "--k", "5",
                     "--trials", "3", "--output", str(first)]) == 0
        assert main(["scatter", "--config", str(first), "--trials", "5"]) == 2
        assert "--config" in capsys.readouterr().err

    def test_config_kind_mismatch(self, tmp_path, capsys):
        first = tmp_path / "a.csv"
        assert main(["scatter", "--m", "50", "--n", "6", "--k", "5",
                     "--trials", "3", "--output", str(first)]) == 0
        assert main(["phase-curve", "--config", str(first)]) == 2

    def test_worker_count_invisible(self, tmp_path, capsys):
        one = tmp_path / "w1.csv"
        many = tmp_path / "w3.csv"
        base = ["phase-curve", "--m", "20", "--n", "40", "--k", "4",
                "--trials", "6", "--seed", "2"]
        assert main(base + ["--workers", "1", "--output", str(one)]) == 0
        assert main(base + ["--workers", "3", "--output", str(many)]) == 0
        assert one.read_bytes() == many.read_bytes()

    def test_missing_dims_rejected(self, capsys):
        assert main(["phase-curve", "--k", "4", "--trials", "2"]) == 2

    def test_io_failure_exit(self, capsys):
        assert main(["scatter", "--m", "50", "--n", "6", "--k", "5",
                     "--trials", "3", "--output", "/nonexistent/x.csv"]) == 3


class TestHelpAndEntry:
    def test_help_exits_zero(self, capsys):
        assert main(["cert", "--help"]) == 0
        text = capsys.readouterr().out
        assert "--qstar" in text and "--theta1" in text and "radians" in text

    def test_subcommand_required(self, capsys):
        assert main([]) == 2

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "greedycert.cli", "spark", "--dict",
             "example1"], capture_output=True, text=True)
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["spark"] == 4
