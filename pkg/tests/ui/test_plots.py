import pytest

from src.core.errors import PlotError
from src.ui.plots import emit_plot
from src.utils.parsers import ResultTable


def gradnorm_table():
  rows = [[n, 2 ** (n % 7), 100.0 / (n + 1) ** 0.5] for n in range(0, 200)]
  return ResultTable(["n", "cumulative_cost", "grad_sq_norm"], rows)


def test_loglog_gradnorm_has_data_and_reference(tmp_path):
  svg = emit_plot(gradnorm_table(), "loglog_gradnorm", tmp_path / "g.svg").read_text(encoding="utf-8")
  assert svg.startswith("<svg")
  assert svg.count("<path") == 2
  assert svg.count("stroke-dasharray") == 1


def test_same_table_gives_same_bytes(tmp_path):
  a = emit_plot(gradnorm_table(), "cost_axis", tmp_path / "a.svg").read_bytes()
  b = emit_plot(gradnorm_table(), "cost_axis", tmp_path / "b.svg").read_bytes()
  assert a == b
  assert a.count(b"<path") == 2


def test_bias_vs_T_draws_every_bias_column(tmp_path):
  table = ResultTable(["T", "plain_bias", "plain_se", "mlmc_bias"], [[2, 0.2, 0.01, 0.1], [8, 0.2, 0.01, 0.03],
                                                                      [32, 0.2, 0.01, 0.008]])
  svg = emit_plot(table, "bias_vs_T", tmp_path / "b.svg").read_text(encoding="utf-8")
  assert svg.count("<path") == 2
  assert "mlmc_bias" in svg and "plain_se" not in svg


def test_empty_table_writes_nothing(tmp_path):
  target = tmp_path / "empty.svg"
  with pytest.raises(PlotError):
    emit_plot(ResultTable(["n", "grad_sq_norm"], []), "loglog_gradnorm", target)
  assert not target.exists()


def test_plot_errors(tmp_path):
  with pytest.raises(PlotError):
    emit_plot(gradnorm_table(), "histogram", tmp_path / "x.svg")
  with pytest.raises(PlotError):
    emit_plot(ResultTable(["T", "m2"], [[2, 1.0]]), "bias_vs_T", tmp_path / "x.svg")
  with pytest.raises(PlotError):
    emit_plot(ResultTable(["n", "grad_sq_norm"], [[0, 1.0], [1, 0.0]]), "loglog_gradnorm", tmp_path / "x.svg")
  assert not (tmp_path / "x.svg").exists()
