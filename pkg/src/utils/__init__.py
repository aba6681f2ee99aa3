from .parsers import ResultTable, format_number, parse_number, format_meta, parse_meta, write_csv, read_csv

__all__ = ["ResultTable", "format_number", "parse_number", "format_meta", "parse_meta", "write_csv", "read_csv"]
