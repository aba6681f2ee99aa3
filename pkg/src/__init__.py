from .ui.logging import LogLevel, LogEntry, Logger, LoggerInstance
from .core import MLMCError, RngStream

__all__ = ["LogLevel", "LogEntry", "Logger", "LoggerInstance", "MLMCError", "RngStream"]
