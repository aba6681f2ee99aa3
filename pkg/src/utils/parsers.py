import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from src.config.config import CSV_SIGNIFICANT_DIGITS, META_PREFIX
from src.core.errors import DomainError

Number = int | float


@dataclass
class ResultTable:
    """
    Numeric result of an experiment: column names, rows of numbers and run metadata
    (config hash, seed, artifact version).
    """
    header: list[str]
    rows: list[list[Number]]
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        width = len(self.header)
        if width == 0:
            raise DomainError("a result table needs at least one column")
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise DomainError(f"row {i} has {len(row)} values, header has {width}")

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        """Values of one column as a float array."""
        try:
            j = self.header.index(name)
        except ValueError:
            raise DomainError(f"no column {name!r} in {self.header}") from None
        return np.array([row[j] for row in self.rows], dtype=float)

    def has_columns(self, *names: str) -> bool:
        return all(name in self.header for name in names)


def format_number(value: Number) -> str:
    """Integers as they are, reals with 17 significant digits and '.' as decimal point.

    Example:
    >>> format_number(0.1)
    '0.10000000000000001'
    """
    if isinstance(value, (bool, np.bool_)):
        raise DomainError("booleans are not numeric table entries")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), f".{CSV_SIGNIFICANT_DIGITS}g")


def parse_number(text: str) -> Number:
    try:
        return int(text)
    except ValueError:
        return float(text)


def format_meta(metadata: dict[str, str]) -> str:
    """Formats metadata into the comment line written under the CSV header.

    Example:
    >>> format_meta({"config_hash": "ab12", "seed": "7"})
    '# meta: config_hash=ab12,seed=7'
    """
    for key, value in metadata.items():
        if any(c in f"{key}{value}" for c in ",=\n"):
            raise DomainError(f"metadata {key}={value} cannot contain ',', '=' or newlines")
    return f"{META_PREFIX} " + ",".join(f"{key}={value}" for key, value in metadata.items())


def parse_meta(line: str) -> dict[str, str]:
    """Reparses a metadata comment line back into its dict."""
    if not line.startswith(META_PREFIX):
        raise DomainError(f"metadata line must start with {META_PREFIX!r}")
    body = line[len(META_PREFIX):].strip()
    return dict(item.split("=", 1) for item in body.split(",") if "=" in item)


def write_csv(table: ResultTable, path: str | Path) -> Path:
    """Header line, metadata line, then one line per row. Output is byte-identical for equal tables."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(table.header)
        f.write(format_meta(table.metadata) + "\n")
        for row in table.rows:
            if not all(math.isfinite(float(v)) for v in row):
                raise DomainError(f"non-finite value in row {row}")
            writer.writerow([format_number(v) for v in row])
    return path


def read_csv(path: str | Path) -> ResultTable:
    """Load a table written by ``write_csv``."""
    with Path(path).open("r", encoding="utf-8", newline="") as f:
        lines = f.read().splitlines()
    if len(lines) < 2:
        raise DomainError(f"{path} is missing its header or metadata line")
    header = next(csv.reader([lines[0]]))
    metadata = parse_meta(lines[1])
    rows = [[parse_number(v) for v in values] for values in csv.reader(lines[2:])]
    return ResultTable(header, rows, metadata)
