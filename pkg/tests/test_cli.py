import json
import math
import os

import pytest

from seqrate import CumulativeFunction
from seqrate.cli import main

HERE = os.path.dirname(__file__)


def problem(name: str) -> str:
    return os.path.join(HERE, "problems", name)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


GOLDEN = [
    ("check-lossy", "worked_g1.json", 0),
    ("check-lossy", "step_leak.json", 0),
    ("check-lossy", "step_leak_tight.json", 1),
    ("check-lossless", "lossless_ok.json", 0),
    ("check-lossless", "lossless_blocked.json", 1),
    ("check-lossy", "back_loaded.json", 0),
    ("check-lossy", "hamming_matrix.json", 0),
    ("check-lossy", "logloss.json", 0),
    ("validate", "worked_g1.json", 0),
    ("validate", "invalid_jump_at_zero.json", 2),
]


class TestExitCodes:
    @pytest.mark.parametrize("command,name,expected", GOLDEN)
    def test_golden_suite(self, capsys, command, name, expected):
        code, payload = run(capsys, command, problem(name))
        assert code == expected
        assert isinstance(payload, dict)

    def test_unknown_field_rejected(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"crdf": {"knots": []}, "surprise": 1}))
        code, payload = run(capsys, "validate", str(bad))
        assert code == 2
        assert "surprise" in payload["error"]

    def test_malformed_json_rejected(self, capsys, tmp_path):
        bad = tmp_path / "broken.json"
        bad.write_text("{not json")
        code, payload = run(capsys, "validate", str(bad))
        assert code == 2

    def test_invalid_crdf_diagnostic_names_invariant(self, capsys):
        code, payload = run(capsys, "check-lossless", problem("invalid_jump_at_zero.json"))
        assert code == 2
        assert "zero-initial-value" in payload["error"]


class TestAnalysisOutputs:
    def test_worked_boundary_margin(self, capsys):
        code, payload = run(capsys, "check-lossy", problem("worked_g1.json"))
        assert code == 0
        assert payload["achievable"] is True
        assert abs(payload["margin"]) <= 1e-12
        assert payload["details"]["min_distortion"] == pytest.approx(0.5)

    def test_step_leak_margin_zero(self, capsys):
        _, payload = run(capsys, "check-lossy", problem("step_leak.json"))
        assert abs(payload["margin"]) <= 1e-12
        assert payload["details"]["withheld_offset"] == pytest.approx(0.8)

    def test_effective_reports_breakpoints(self, capsys):
        code, payload = run(capsys, "effective", problem("worked_g3.json"))
        assert code == 0
        alphas = [k["alpha"] for k in payload["effective_crdf"]["knots"]]
        assert alphas == [0.0, 0.25, 0.5, 1.0]
        assert payload["offset"] == pytest.approx(1.0)

    def test_envelope_command(self, capsys):
        code, payload = run(capsys, "envelope", problem("worked_g3.json"))
        assert code == 0
        assert payload["envelope"]["knots"] == [[0.0, 0.0], [0.5, 1.0], [1.0, 1.0]]

    def test_min_distortion_command(self, capsys):
        code, payload = run(capsys, "min-distortion", problem("back_loaded.json"))
        assert code == 0
        assert payload["min_distortion"] == pytest.approx(0.4, abs=1e-12)

    def test_schedule_command(self, capsys):
        code, payload = run(capsys, "schedule", problem("back_loaded.json"))
        assert code == 0
        assert payload["blocks"][1]["sent"] == [
            {"desc_block": 1, "rate": 0.3},
            {"desc_block": 2, "rate": 0.3},
        ]
        assert payload["predicted_avg_distortion"] == pytest.approx(0.4, abs=1e-12)

    def test_oracle_command_and_flag(self, capsys):
        code, payload = run(capsys, "oracle", problem("back_loaded.json"))
        assert code == 0
        assert payload["min_distortion"] == 0.4
        code, payload = run(capsys, "check-lossy", problem("back_loaded.json"), "--oracle")
        assert code == 0
        assert payload["oracle"]["min_distortion"] == 0.4

    def test_rd_curve_command(self, capsys):
        code, payload = run(capsys, "rd-curve", problem("worked_g1.json"))
        assert code == 0
        for r, d in payload["points"]:
            assert d == pytest.approx(1.0 - r, abs=1e-12)

    def test_infinite_budget_serialized_as_token(self, capsys):
        _, payload = run(capsys, "effective", problem("logloss.json"))
        assert payload["offset"] == 0.0


class TestCsvAndFigures:
    def test_csv_matches_in_process_evaluation(self, capsys, tmp_path):
        out = tmp_path / "table.csv"
        code, _ = run(capsys, "check-lossy", problem("step_leak.json"), "--csv", str(out))
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "alpha,G,L,G_eff,envelope,slope,D_of_slope"
        with open(problem("step_leak.json")) as fh:
            raw = json.load(fh)
        G = CumulativeFunction.from_json_dict(raw["crdf"])
        L = CumulativeFunction.from_json_dict(raw["cldf"])
        seen_knots = set()
        for line in lines[1:]:
            cells = line.split(",")
            alpha = float(cells[0])
            assert float(cells[1]) == G.evaluate(alpha)
            assert float(cells[2]) == L.evaluate(alpha)
            seen_knots.add(alpha)
        assert set(G.alphas) <= seen_knots
        assert set(L.alphas) <= seen_knots

    def test_emit_figure_example1(self, capsys, tmp_path):
        csv_path = tmp_path / "fig.csv"
        png_path = tmp_path / "fig.png"
        code, payload = run(capsys, "emit-figure", "example1", problem("back_loaded.json"),
                            "--csv", str(csv_path), "--png", str(png_path))
        assert code == 0
        assert payload["columns"] == ["alpha", "G", "L", "G_eff", "upper_bound"]
        g1, dbar = 0.6, 0.4
        for row in payload["rows"]:
            alpha, bound = row[0], row[4]
            assert bound == pytest.approx(min(alpha + g1 - 1.0 + dbar, g1), abs=1e-12)
        assert csv_path.exists() and png_path.exists()
        assert png_path.stat().st_size > 0

    def test_emit_figure_theorem2(self, capsys):
        code, payload = run(capsys, "emit-figure", "theorem2", problem("worked_g1.json"))
        assert code == 0
        assert payload["columns"] == ["alpha", "G", "L", "G_eff", "envelope"]
        by_alpha = {row[0]: row for row in payload["rows"]}
        assert by_alpha[0.5][3] == 1.0  # effective schedule jumps to 1
        assert by_alpha[0.25][4] == pytest.approx(0.5)  # envelope 2*alpha

    def test_emit_figure_example2_needs_entropy(self, capsys):
        code, payload = run(capsys, "emit-figure", "example2", problem("logloss.json"))
        assert code == 0
        h, g1, dbar = 2.0, 1.0, 1.0
        for row in payload["rows"]:
            alpha, bound = row[0], row[4]
            assert bound == pytest.approx(min(alpha * h + g1 - h + dbar, g1), abs=1e-12)
