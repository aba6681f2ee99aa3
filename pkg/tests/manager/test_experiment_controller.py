import numpy as np
import pytest

from src.config.experiment_config import config_from_dict
from src.core.errors import ConfigurationError, PlotError
from src.manager.experiment_controller import ExperimentResult, build_problem, run_experiment, starting_point
from src.optim.problems import IwaeProblem
from src.utils.parsers import ResultTable


def test_build_problem_follows_the_problem_block():
    cfg = config_from_dict({"experiment": "optimize", "problem": {"id": "quadratic", "dim": 3}})
    assert build_problem(cfg).dim == 3
    cfg = config_from_dict({"experiment": "moments", "problem": {"id": "ar1"}})
    assert build_problem(cfg).dim == 1
    cfg = config_from_dict({"experiment": "optimize", "problem": {"id": "iwae"}, "iwae": {"estimator": "plain"}})
    assert isinstance(build_problem(cfg), IwaeProblem)
    with pytest.raises(ConfigurationError):
        build_problem(config_from_dict({"experiment": "iwae"}))


def test_starting_point():
    cfg = config_from_dict({"experiment": "optimize", "problem": {"id": "quadratic", "dim": 3}})
    assert starting_point(cfg, 3).tolist() == [0.0, 0.0, 0.0]
    cfg = config_from_dict({"experiment": "optimize", "problem": {"id": "quadratic", "dim": 3, "theta": 2}})
    assert starting_point(cfg, 3).tolist() == [2.0, 2.0, 2.0]
    cfg = config_from_dict({"experiment": "optimize", "problem": {"id": "quadratic", "dim": 2, "theta": [1, -1]}})
    assert np.array_equal(starting_point(cfg, 2), [1.0, -1.0])


def test_result_is_ok_without_failures():
    table = ResultTable(["n"], [[0]])
    assert ExperimentResult(table).ok
    assert not ExperimentResult(table, failures=["summary.csv: non-finite values in rows [0]"]).ok


def test_iwae_experiment_table(tmp_path):
    cfg = config_from_dict({
        "experiment": "iwae", "iwae": {"T_grid": [2, 8], "k": 3}, "replicates": 50, "output": str(tmp_path),
    })
    result = run_experiment(cfg)
    assert result.ok
    assert result.files == [tmp_path / "iwae.csv"]
    assert result.table.column("T").tolist() == [2.0, 8.0]
    assert np.all(result.table.column("plain_cost") == 3)
    assert np.all(result.table.column("mlmc_cost") > 3)
    # the plain estimator is shared across the grid
    assert len(set(result.table.column("plain_bias").tolist())) == 1


def test_run_experiment_rejects_bad_requests(tmp_path):
    cfg = config_from_dict({"experiment": "iwae", "output": str(tmp_path)})
    with pytest.raises(ConfigurationError):
        run_experiment(cfg, threads=0)

    empty = tmp_path / "empty.csv"
    empty.write_text("n,grad_sq_norm\n# meta: seed=0\n", encoding="utf-8")
    report = config_from_dict({"experiment": "report", "report": {"input": str(empty)}, "output": str(tmp_path)})
    with pytest.raises(PlotError) as info:
        run_experiment(report)
    assert any("report experiment" in note for note in info.value.__notes__)
