import math

import numpy as np
import pytest

from src.core.errors import DomainError
from src.utils.parsers import ResultTable, format_meta, format_number, parse_meta, parse_number, read_csv, write_csv


def sample_table():
    return ResultTable(["n", "grad_sq_norm"], [[0, 1.5], [1, 0.1], [2, 1e-20]], {"config_hash": "abc", "seed": "7"})


def test_format_number():
    assert format_number(3) == "3"
    assert format_number(np.int64(12)) == "12"
    assert format_number(0.1) == "0.10000000000000001"
    assert format_number(1e-20) == "9.9999999999999995e-21"
    assert float(format_number(math.pi)) == math.pi
    with pytest.raises(DomainError):
        format_number(True)


def test_parse_number():
    assert parse_number("42") == 42 and isinstance(parse_number("42"), int)
    assert parse_number("0.10000000000000001") == 0.1


def test_meta_line():
    line = format_meta({"config_hash": "ab12", "seed": "7"})
    assert line == "# meta: config_hash=ab12,seed=7"
    assert parse_meta(line) == {"config_hash": "ab12", "seed": "7"}
    with pytest.raises(DomainError):
        format_meta({"note": "a,b"})
    with pytest.raises(DomainError):
        parse_meta("config_hash=ab12")


def test_csv_layout(tmp_path):
    path = write_csv(sample_table(), tmp_path / "out" / "table.csv")
    lines = path.read_text(encoding="utf-8").split("\n")
    assert lines[0] == "n,grad_sq_norm"
    assert lines[1] == "# meta: config_hash=abc,seed=7"
    assert lines[2] == "0,1.5"
    assert lines[-1] == ""


def test_csv_reads_back(tmp_path):
    table = sample_table()
    again = read_csv(write_csv(table, tmp_path / "table.csv"))
    assert again.header == table.header
    assert again.rows == table.rows
    assert again.metadata == table.metadata


def test_csv_bytes_are_deterministic(tmp_path):
    a = write_csv(sample_table(), tmp_path / "a.csv").read_bytes()
    b = write_csv(sample_table(), tmp_path / "b.csv").read_bytes()
    assert a == b


def test_non_finite_values_are_refused(tmp_path):
    with pytest.raises(DomainError):
        write_csv(ResultTable(["x"], [[float("nan")]]), tmp_path / "nan.csv")


def test_result_table():
    table = sample_table()
    assert len(table) == 3
    assert table.column("n").tolist() == [0.0, 1.0, 2.0]
    assert table.has_columns("n", "grad_sq_norm") and not table.has_columns("level")
    with pytest.raises(DomainError):
        table.column("level")
    with pytest.raises(DomainError):
        ResultTable(["a", "b"], [[1]])
    with pytest.raises(DomainError):
        ResultTable([], [])


def test_read_rejects_truncated_files(tmp_path):
    path = tmp_path / "short.csv"
    path.write_text("n\n", encoding="utf-8")
    with pytest.raises(DomainError):
        read_csv(path)
