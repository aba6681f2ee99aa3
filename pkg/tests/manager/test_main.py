import json

import pytest

from src.config.config import THREADS_ENV_VAR
from src.core.errors import ConfigurationError
from src.manager.main import build_parser, main, resolve_threads

OPTIMIZE = {
  "experiment": "optimize",
  "problem": {"id": "quadratic", "dim": 2, "theta": 1.0},
  "schedule": {"C_gamma": 0.1},
  "iterations": 60,
  "horizons": [10, 30],
  "replicates": 3,
  "seed": 4,
}
MOMENTS = {"experiment": "moments", "problem": {"id": "ar1"}, "mlmc": {"T_grid": [2, 4, 8]}, "seed": 2}
IWAE = {"experiment": "iwae", "iwae": {"T_grid": [2, 8]}, "replicates": 200, "seed": 1}


def write_config(tmp_path, data, name="config.json"):
  path = tmp_path / name
  path.write_text(json.dumps(data), encoding="utf-8")
  return str(path)


def failures_from(capsys):
  err = capsys.readouterr().err.strip().splitlines()
  return json.loads(err[-1])


def outputs(directory):
  return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


def test_optimize_writes_every_table(tmp_path):
  config = write_config(tmp_path, OPTIMIZE)
  assert main(["optimize", "--config", config, "--out", str(tmp_path / "run")]) == 0
  names = set(outputs(tmp_path / "run"))
  assert names == {"replicate_0.csv", "replicate_1.csv", "replicate_2.csv", "optimize.csv", "summary.csv"}
  lines = (tmp_path / "run" / "optimize.csv").read_text(encoding="utf-8").splitlines()
  assert lines[0] == "n,cumulative_cost,grad_sq_norm,selected_fraction"
  assert lines[1].startswith("# meta: config_hash=")
  assert len(lines) == 2 + 61
  summary = (tmp_path / "run" / "summary.csv").read_text(encoding="utf-8").splitlines()
  assert [row.split(",")[0] for row in summary[2:]] == ["10", "30", "60"]


def test_reruns_are_byte_identical(tmp_path):
  config = write_config(tmp_path, OPTIMIZE)
  assert main(["optimize", "--config", config, "--out", str(tmp_path / "a")]) == 0
  assert main(["optimize", "--config", config, "--out", str(tmp_path / "b"), "--threads", "3"]) == 0
  assert outputs(tmp_path / "a") == outputs(tmp_path / "b")

  assert main(["optimize", "--config", config, "--out", str(tmp_path / "c"), "--seed", "5"]) == 0
  assert outputs(tmp_path / "c")["optimize.csv"] != outputs(tmp_path / "a")["optimize.csv"]


def test_moments_and_iwae_reruns_are_byte_identical(tmp_path):
  for data in (MOMENTS, IWAE):
    config = write_config(tmp_path, data, f"{data['experiment']}.json")
    for run in ("first", "second"):
      assert main([data["experiment"], "--config", config, "--out", str(tmp_path / data["experiment"] / run)]) == 0
    assert outputs(tmp_path / data["experiment"] / "first") == outputs(tmp_path / data["experiment"] / "second")


def test_report_plots_are_byte_identical(tmp_path):
  config = write_config(tmp_path, OPTIMIZE)
  assert main(["optimize", "--config", config, "--out", str(tmp_path / "run")]) == 0
  report = {
    "experiment": "report",
    "report": {"input": str(tmp_path / "run" / "optimize.csv"), "plots": ["loglog_gradnorm", "cost_axis"]},
  }
  report_config = write_config(tmp_path, report, "report.json")
  assert main(["report", "--config", report_config, "--out", str(tmp_path / "plots1")]) == 0
  assert main(["report", "--config", report_config, "--out", str(tmp_path / "plots2")]) == 0
  first = outputs(tmp_path / "plots1")
  assert set(first) == {"optimize_loglog_gradnorm.svg", "optimize_cost_axis.svg"}
  assert first == outputs(tmp_path / "plots2")


def test_too_few_moment_replicates_fail_the_run(tmp_path, capsys):
  config = write_config(tmp_path, MOMENTS)
  assert main(["moments", "--config", config, "--out", str(tmp_path / "m"), "--replicates", "20"]) == 1
  report = failures_from(capsys)
  assert report["status"] == "failed" and report["command"] == "moments"
  assert report["failures"][0]["error"] == "InvariantViolation"
  assert "replicates = 20 < 1000" in report["failures"][0]["message"]


def test_wrong_subcommand_is_a_configuration_error(tmp_path, capsys):
  config = write_config(tmp_path, OPTIMIZE)
  assert main(["iwae", "--config", config]) == 1
  assert failures_from(capsys)["failures"][0]["error"] == "ConfigurationError"


def test_broken_json_is_reported(tmp_path, capsys):
  path = tmp_path / "broken.json"
  path.write_text('{"experiment": "optimize",', encoding="utf-8")
  assert main(["optimize", "--config", str(path)]) == 1
  failure = failures_from(capsys)["failures"][0]
  assert failure["error"] == "ConfigParseError"
  assert "line 1" in failure["message"]


def test_config_flag_is_required():
  with pytest.raises(SystemExit):
    build_parser().parse_args(["optimize"])
  with pytest.raises(SystemExit):
    build_parser().parse_args(["train", "--config", "x.json"])


def test_thread_count_resolution(monkeypatch):
  monkeypatch.delenv(THREADS_ENV_VAR, raising=False)
  assert resolve_threads(None) == 1
  assert resolve_threads(4) == 4
  monkeypatch.setenv(THREADS_ENV_VAR, "3")
  assert resolve_threads(None) == 3
  assert resolve_threads(2) == 2
  monkeypatch.setenv(THREADS_ENV_VAR, "many")
  with pytest.raises(ConfigurationError):
    resolve_threads(None)
  with pytest.raises(ConfigurationError):
    resolve_threads(0)
