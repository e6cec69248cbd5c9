"""Command-line interface: outputs, exit codes, pipeline equivalence."""
from __future__ import annotations

import json
import os

import pytest
from click.testing import CliRunner

from argbench.cli import main

FIXTURES = os.path.abspath("fixtures")


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


class TestReplay:
    def test_cesium_transcript_listing(self, runner, tmp_path):
        out = tmp_path / "state.json"
        result = runner.invoke(
            main,
            [
                "replay",
                "--input", f"{FIXTURES}/cesium_brainstorm.jsonl",
                "--output", str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        assert (
            "Team version: The cesium-137 canister was stolen (3 votes: P1, P2, P3)"
            in result.output
        )
        assert "Deleted answer a3" in result.output
        assert "E1: likely (55-70%)" in result.output
        state = json.loads(out.read_text())
        assert state["sequence"] == 62

    def test_ill_formed_script_exits_2(self, runner, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text("not json\n")
        result = runner.invoke(main, ["replay", "--input", str(bad)])
        assert result.exit_code == 2


class TestAnalyze:
    def test_hakka_expertise_likely(self, runner):
        result = runner.invoke(
            main, ["analyze", "--input", f"{FIXTURES}/hakka_analysis.json"]
        )
        assert result.exit_code == 0, result.output
        assert "Hakka has chemical weapons: for, likely (55-70%)" in result.output
        assert (
            "HE Hakka has expertise to develop chemical weapons: for, likely (55-70%)"
            in result.output
        )
        assert (
            "HB Hakka has a member with a bachelor's degree in chemistry: "
            "for, very likely (80-95%)" in result.output
        )

    def test_writes_computed_document(self, runner, tmp_path):
        out = tmp_path / "computed.json"
        result = runner.invoke(
            main,
            [
                "analyze",
                "--input", f"{FIXTURES}/cesium_analysis_final.json",
                "--output", str(out),
            ],
        )
        assert result.exit_code == 0
        doc = json.loads(out.read_text())
        assert doc["computed"]["H1"]["strength"] == "likely[55,70)"

    def test_structural_errors_exit_1(self, runner, tmp_path):
        doc = json.loads(open(f"{FIXTURES}/hakka_analysis.json").read())
        doc["links"][0]["evidence_id"] = "E9"
        bad = tmp_path / "broken.json"
        bad.write_text(json.dumps(doc))
        result = runner.invoke(main, ["analyze", "--input", str(bad)])
        assert result.exit_code == 1
        assert "dangling evidence id E9" in result.output

    def test_unreadable_input_exits_2(self, runner):
        result = runner.invoke(main, ["analyze", "--input", "/no/such/file.json"])
        assert result.exit_code == 2


class TestCheck:
    def test_cesium_findings_stable_order(self, runner):
        result = runner.invoke(
            main, ["check", "--input", f"{FIXTURES}/cesium_analysis.json"]
        )
        assert result.exit_code == 0  # warnings do not fail the run
        lines = [line for line in result.output.splitlines() if line]
        assert lines[0].startswith("warning confirmation-bias H1:")
        assert lines[1].startswith("warning relevance-justification LE3H4:")
        assert lines[-1].startswith("warning imprecise-assessment H2:")
        again = runner.invoke(
            main, ["check", "--input", f"{FIXTURES}/cesium_analysis.json"]
        )
        assert again.output == result.output

    def test_structural_error_exits_1(self, runner, tmp_path):
        doc = json.loads(open(f"{FIXTURES}/cesium_analysis.json").read())
        doc["arguments"][0]["sub_hypotheses"] = []
        bad = tmp_path / "broken.json"
        bad.write_text(json.dumps(doc))
        result = runner.invoke(main, ["check", "--input", str(bad)])
        assert result.exit_code == 1
        assert "error structure" in result.output


class TestReport:
    def test_report_with_figures(self, runner, tmp_path):
        out = tmp_path / "report.md"
        result = runner.invoke(
            main,
            [
                "report",
                "--input", f"{FIXTURES}/cesium_analysis_final.json",
                "--output", str(out),
                "--format", "markup",
            ],
        )
        assert result.exit_code == 0, result.output
        text = out.read_text()
        assert "The cesium-137 canister likely (55-70%) was stolen." in text
        assert "very unlikely (5-20%)" in text
        assert "almost no chance (1-5%)" in text
        figures = tmp_path / "report_figures"
        assert sorted(os.listdir(figures)) == ["A1.png", "A2.png", "A3.png"]
        assert "![Argumentation fragment for A1](report_figures/A1.png)" in text

    def test_stdout_render_deterministic(self, runner):
        args = [
            "report",
            "--input", f"{FIXTURES}/cesium_analysis_final.json",
            "--no-figures",
        ]
        first = runner.invoke(main, args)
        second = runner.invoke(main, args)
        assert first.exit_code == 0
        assert first.output == second.output


class TestSimulateTeams:
    def test_three_then_three_scenario(self, runner):
        result = runner.invoke(
            main,
            [
                "simulate-teams",
                "--input", f"{FIXTURES}/team_scenarios/three_then_three_at_9h.yaml",
            ],
        )
        assert result.exit_code == 0, result.output
        assert "T1 closed at 9h (size 6)" in result.output

    def test_full_team_scenario(self, runner):
        result = runner.invoke(
            main,
            [
                "simulate-teams",
                "--input", f"{FIXTURES}/team_scenarios/full_team_by_3h.yaml",
            ],
        )
        assert "T1 closed at 3h (size 12)" in result.output

    def test_seven_at_six_hours(self, runner):
        result = runner.invoke(
            main,
            [
                "simulate-teams",
                "--input", f"{FIXTURES}/team_scenarios/seven_at_six_hours.yaml",
            ],
        )
        assert "T1 closed at 6h (size 7)" in result.output

    def test_four_at_twelve_hours(self, runner):
        result = runner.invoke(
            main,
            [
                "simulate-teams",
                "--input", f"{FIXTURES}/team_scenarios/four_at_twelve_hours.yaml",
            ],
        )
        assert "T1 closed at 12h (size 4)" in result.output

    def test_random_policy_deterministic(self, runner, tmp_path):
        scenario = tmp_path / "random.yaml"
        scenario.write_text(
            "policy: random-fixed\nseed: 7\nparticipants: [P1, P2, P3, P4, P5, P6, P7]\n"
        )
        first = runner.invoke(main, ["simulate-teams", "--input", str(scenario)])
        second = runner.invoke(main, ["simulate-teams", "--input", str(scenario)])
        assert first.exit_code == 0
        assert first.output == second.output
        assert "closed (size 4)" in first.output


class TestPipelineEquivalence:
    def test_cli_matches_service_pipeline(self, runner, tmp_path):
        """analyze + check + report on a file equals the service on the
        same content."""
        from fastapi.testclient import TestClient

        from argbench.service import create_app, seed_demo
        from argbench.storage import ProblemStore

        store = ProblemStore(str(tmp_path / "data"))
        tokens = seed_demo(store, f"{FIXTURES}/cesium_brainstorm.jsonl")
        client = TestClient(create_app(store))
        headers = {"Authorization": f"Bearer {tokens['P1']}"}
        client.post(
            "/problems/cesium/analyses/P1/import",
            json={"expected_sequence": 0},
            headers=headers,
        )
        doc = client.get("/problems/cesium/analyses/P1", headers=headers).json()
        doc.pop("sequence")
        path = tmp_path / "exported.json"
        path.write_text(json.dumps(doc))

        service_findings = client.get(
            "/problems/cesium/analyses/P1/findings", headers=headers
        ).json()["rendered"]
        cli_result = runner.invoke(main, ["check", "--input", str(path)])
        cli_findings = [line for line in cli_result.output.splitlines() if line]
        assert cli_findings == service_findings

        service_render = client.get(
            "/problems/cesium/analyses/P1/report/render?format=plain", headers=headers
        ).text
        report_result = runner.invoke(
            main, ["report", "--input", str(path), "--no-figures"]
        )
        assert report_result.output == service_render
