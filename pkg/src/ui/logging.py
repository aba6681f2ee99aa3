from typing import List, Dict, Optional
from datetime import datetime
from dataclasses import dataclass
from enum import Enum
import threading
import json
import os

from rich.console import Console
from rich.progress import Progress, BarColumn, MofNCompleteColumn, TimeElapsedColumn

from src.config.config import LOG_DIR, LOG_FILENAME, LOG_MAX_ENTRIES

LOG_KEEP_IN_MEMORY = 10
LOG_DEBUG = False
LOGGER_CODENAME = 'LOGGER '
LOGGER_PREFIX = f"[blue][{LOGGER_CODENAME}][/]"

console = Console()

class LogLevel(Enum):
  """
  Log levels, the value is the rich markup tag printed in front of the message.
  """
  DEBUG =      "[blue][     ][/]"
  INFO =      "[green][  -  ][/]"
  WARNING =  "[yellow][ /!\\ ][/]"
  ERROR =    "[red][ !!! ][/]"
  CRITICAL = "[magenta][!!!!!][/]"

@dataclass
class LogEntry:
  """
  A single stored log line.
  """
  timestamp: datetime
  level: LogLevel
  prefix: str
  message: str

  def __str__(self) -> str:
    return f"{self.prefix} {self.level.value} {self.message}"

  def to_dict(self) -> dict:
    """Serializable form, used by the archive file.

    Returns:
        dict: timestamp in ISO format plus level name, prefix and message
    """
    return {
      'timestamp': self.timestamp.isoformat(),
      'level': self.level.name,
      'prefix': self.prefix,
      'message': self.message
    }

  @classmethod
  def from_dict(cls, data: dict) -> 'LogEntry':
    """Create LogEntry from its archived dictionary.

    Args:
        data (dict): dictionary produced by ``to_dict``

    Returns:
        LogEntry: the restored entry
    """
    return cls(
      timestamp=datetime.fromisoformat(data['timestamp']),
      level=LogLevel[data['level']],
      prefix=data['prefix'],
      message=data['message']
    )


def _debug_logger(msg: str):
  if LOG_DEBUG: console.print(str(LogEntry(datetime.now(), LogLevel.DEBUG, LOGGER_PREFIX, msg)))

class Logger:
  """
  Process-wide log store. Every subsystem gets its own prefixed LoggerInstance from it.

  Entries are kept in memory up to ``max_logs``; older entries are spilled as JSON lines to
  ``<log_dir>/<log_file>``. The directory is only created when something is archived.
  """
  _instance: Optional['Logger'] = None
  _lock: threading.Lock = threading.Lock()

  def __new__(cls) -> 'Logger':
    if cls._instance is None:
      with cls._lock:
        if cls._instance is None:
          cls._instance = super(Logger, cls).__new__(cls)

    return cls._instance

  def __init__(self, max_logs: int = LOG_MAX_ENTRIES, log_file: str = LOG_FILENAME) -> None:
    if hasattr(self, '_initialized'):
      return

    self._logs: List[LogEntry] = []
    self._instances: Dict[str, LoggerInstance] = {}
    self._logs_lock = threading.Lock()
    self._instances_lock = threading.Lock()

    self._max_logs = max_logs

    self._logs_dir = LOG_DIR
    self._log_file = os.path.join(self._logs_dir, log_file)

    self._initialized = True

  def _store_log(self, entry: LogEntry) -> None:
    with self._logs_lock:
      self._logs.append(entry)
      self._check_and_archive()

  def get_logger(self, prefix: str, console_enabled: bool = True) -> 'LoggerInstance':
    """
    Get (or create) the logger instance for a prefix.

    Args:
        prefix (str): Prefix added to each message, usually a coloured codename.
        console_enabled (bool, optional): Prints to console or not. Defaults to True.
    """
    with self._instances_lock:
      if prefix not in self._instances:
        instance = LoggerInstance(prefix, console_enabled)
        instance._set_parent(self)
        self._instances[prefix] = instance

      return self._instances[prefix]

  def set_console_enabled(self, enabled: bool) -> None:
    """Switch console output for every instance created so far (the CLI's --verbose)."""
    with self._instances_lock:
      for instance in self._instances.values():
        instance.set_console_enabled(enabled)

  def get_logs(self, level: Optional[LogLevel] = None, prefix: Optional[str] = None, start_time: Optional[datetime] = None, end_time: Optional[datetime] = None) -> List[LogEntry]:
    """
    Retrieve stored logs with optional filtering.

    Args:
        level: Filter by log level
        prefix: Filter by prefix
        start_time: Filter logs after this time
        end_time: Filter logs before this time

    Returns:
        List of LogEntry objects matching the criteria
    """
    with self._logs_lock:
      filtered_logs = self._logs.copy()

    if level is not None:
      filtered_logs = [log for log in filtered_logs if log.level == level]

    if prefix is not None:
      filtered_logs = [log for log in filtered_logs if log.prefix == prefix]

    if start_time is not None:
      filtered_logs = [log for log in filtered_logs if log.timestamp >= start_time]

    if end_time is not None:
      filtered_logs = [log for log in filtered_logs if log.timestamp <= end_time]

    return filtered_logs

  def get_all_logs(self) -> List[LogEntry]:
    """Get all stored log entries."""
    with self._logs_lock:
      return self._logs.copy()

  def clear_logs(self) -> None:
    """Clear all stored log entries."""
    with self._logs_lock:
      self._logs.clear()

  def _check_and_archive(self) -> None:
    """Spill the oldest entries to the archive once the buffer is full; the newest stay in memory."""
    if len(self._logs) < self._max_logs:
      return
    keep = min(LOG_KEEP_IN_MEMORY, len(self._logs) - 1)
    cut = len(self._logs) - keep
    spilled, self._logs = self._logs[:cut], self._logs[cut:]
    try:
      os.makedirs(self._logs_dir, exist_ok=True)
      with open(self._log_file, 'a', encoding='utf-8') as f:
        for entry in spilled:
          f.write(json.dumps(entry.to_dict()) + '\n')
    except OSError as e:
      error_log = LogEntry(datetime.now(), LogLevel.ERROR, LOGGER_PREFIX, f"Failed to archive logs: {e}")
      self._logs.append(error_log)
      console.print(str(error_log))
      return
    _debug_logger(f"archived {len(spilled)} entries to {self._log_file}")

  def read_archive(self) -> List[LogEntry]:
    """Entries spilled to the archive file so far, oldest first."""
    if not os.path.exists(self._log_file):
      return []
    with open(self._log_file, 'r', encoding='utf-8') as f:
      return [LogEntry.from_dict(json.loads(line)) for line in f if line.strip()]


class LoggerInstance:
  """
  Prefixed view on the Logger used by one subsystem (optimizer, kernels, experiments...).
  """
  def __init__(self, prefix: str, console_enabled: bool = True):
    self.prefix = prefix
    self.console_enabled = console_enabled
    self._parent_logger: Optional[Logger] = None

  def _set_parent(self, parent_logger: 'Logger') -> None:
    self._parent_logger = parent_logger

  def _log(self, level: LogLevel, message: str) -> None:
    if self._parent_logger is None:
      raise RuntimeError("Logger instance not properly initialized")

    entry = LogEntry(timestamp=datetime.now(), level=level, prefix=self.prefix, message=message)
    self._parent_logger._store_log(entry)

    if self.console_enabled:
      console.print(str(entry))

  def debug(self, message: str) -> None:
    """Log debug message."""
    self._log(LogLevel.DEBUG, message)

  def info(self, message: str) -> None:
    """Log info message."""
    self._log(LogLevel.INFO, message)

  def warning(self, message: str) -> None:
    """Log warning message."""
    self._log(LogLevel.WARNING, message)

  def error(self, message: str) -> None:
    """Log error message."""
    self._log(LogLevel.ERROR, message)

  def critical(self, message: str) -> None:
    """Log critical message."""
    self._log(LogLevel.CRITICAL, message)

  def set_console_enabled(self, enabled: bool) -> None:
    """Enable or disable console output for this instance."""
    self.console_enabled = enabled

  def progress(self, description: str) -> Progress:
    """A rich progress bar for replicate loops; silent unless console output is on.

    Usage:
    >>> with log.progress("replicates") as bar:
    ...   task = bar.add_task("replicates", total=20)
    ...   bar.advance(task)
    """
    return Progress(
      f"{self.prefix} {description}",
      BarColumn(),
      MofNCompleteColumn(),
      TimeElapsedColumn(),
      console=console,
      disable=not self.console_enabled,
      transient=True,
    )
