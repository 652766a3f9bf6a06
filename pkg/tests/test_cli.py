import json

import pytest
from click.testing import CliRunner

from ragebench.cli import main


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({
        "datasets": ["naturalquestions"],
        "sample_size": 2,
        "seed": 7,
        "output_dir": str(tmp_path / "runs"),
    }))
    return path


class TestRun:
    def test_run_and_results(self, runner, config_file, tmp_path):
        result = runner.invoke(main, ["run", "--config", str(config_file),
                                      "--session-id", "cli1"])
        assert result.exit_code == 0, result.output
        assert "done" in result.output
        assert "best combination:" in result.output

        session_dir = tmp_path / "runs" / "cli1"
        res = runner.invoke(main, ["results", "--session", str(session_dir)])
        assert res.exit_code == 0
        lines = [json.loads(line) for line in res.output.strip().splitlines()]
        assert len(lines) == 2

        rec = runner.invoke(main, ["recommend", "--session", str(session_dir)])
        assert rec.exit_code == 0
        assert json.loads(rec.output)["best_combination_id"]

        emitted = runner.invoke(main, ["recommend", "--session", str(session_dir),
                                       "--emit-config"])
        assert emitted.exit_code == 0
        grid = json.loads(emitted.output)["grid"]
        assert all(len(v) == 1 for v in grid.values())

    def test_results_export_file(self, runner, config_file, tmp_path):
        runner.invoke(main, ["run", "--config", str(config_file), "--session-id", "cli2"])
        out = tmp_path / "export.jsonl"
        result = runner.invoke(main, [
            "results", "--session", str(tmp_path / "runs" / "cli2"), "--out", str(out)
        ])
        assert result.exit_code == 0
        assert out.exists()


class TestEstimate:
    def test_with_calibration(self, runner, config_file):
        result = runner.invoke(main, ["estimate", "--config", str(config_file),
                                      "--per-line-seconds", "2.0"])
        assert result.exit_code == 0
        assert "4.0 s" in result.output

    def test_without_history_fails_cleanly(self, runner, config_file):
        result = runner.invoke(main, ["estimate", "--config", str(config_file)])
        assert result.exit_code != 0
        assert "per_line_seconds" in result.output


class TestConfigHandling:
    def test_env_fallback(self, runner, config_file):
        result = runner.invoke(main, ["validate"],
                               env={"RAGEBENCH_CONFIG": str(config_file)})
        assert result.exit_code == 0, result.output
        assert json.loads(result.output)["sample_size"] == 2

    def test_missing_config_usage_error(self, runner):
        result = runner.invoke(main, ["validate"], env={"RAGEBENCH_CONFIG": None})
        assert result.exit_code != 0
        assert "RAGEBENCH_CONFIG" in result.output

    def test_invalid_config_message(self, runner, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{")
        result = runner.invoke(main, ["estimate", "--config", str(bad)])
        assert result.exit_code != 0
        assert "invalid config" in result.output

    def test_missing_file(self, runner, tmp_path):
        result = runner.invoke(main, ["validate", "--config", str(tmp_path / "nope.json")])
        assert result.exit_code != 0

    def test_recommend_without_finished_session(self, runner, tmp_path):
        (tmp_path / "empty").mkdir()
        result = runner.invoke(main, ["recommend", "--session", str(tmp_path / "empty")])
        assert result.exit_code != 0
        assert "finished" in result.output
