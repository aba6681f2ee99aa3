from datetime import datetime, timedelta

from src.ui.logging import LogEntry, LogLevel, Logger, LoggerInstance


def test_singleton():
  logger1 = Logger()
  logger2 = Logger()
  assert logger1 is logger2, "Logger does not work as a singleton"


def test_one_instance_per_prefix():
  logger = Logger()
  a = logger.get_logger("[TESTING]", console_enabled=False)
  b = logger.get_logger("[TESTING]", console_enabled=True)
  assert a is b
  assert isinstance(a, LoggerInstance)


def test_filter_by_prefix_and_level():
  logger = Logger()
  logger.clear_logs()
  optim = logger.get_logger("[OPTIMTEST]", console_enabled=False)
  kernels = logger.get_logger("[KERNTEST]", console_enabled=False)

  optim.info("run started")
  optim.warning("running with an invalid schedule")
  kernels.error("state left the support")
  kernels.debug("stored, never printed")

  assert [e.message for e in logger.get_logs(prefix="[OPTIMTEST]")] == ["run started", "running with an invalid schedule"]
  assert [e.message for e in logger.get_logs(level=LogLevel.ERROR)] == ["state left the support"]
  assert len(logger.get_all_logs()) == 4

  later = datetime.now() + timedelta(minutes=1)
  assert logger.get_logs(start_time=later) == []


def test_entry_round_trip():
  entry = LogEntry(datetime(2024, 5, 1, 12, 0, 0), LogLevel.WARNING, "[EXPRMNT]", "too few replicates")
  assert LogEntry.from_dict(entry.to_dict()) == entry
  assert str(entry).startswith("[EXPRMNT] ")


def test_console_switch_reaches_every_instance():
  logger = Logger()
  instance = logger.get_logger("[SWITCHTEST]", console_enabled=False)
  logger.set_console_enabled(True)
  assert instance.console_enabled
  logger.set_console_enabled(False)
  assert not instance.console_enabled


def test_progress_bar_is_silent_when_console_is_off():
  instance = Logger().get_logger("[PROGTEST]", console_enabled=False)
  with instance.progress("replicates") as bar:
    task = bar.add_task("replicates", total=3)
    for _ in range(3):
      bar.advance(task)
    assert bar.tasks[0].completed == 3


def test_full_buffer_spills_oldest_entries(tmp_path, monkeypatch):
  logger = Logger()
  logger.clear_logs()
  monkeypatch.setattr(logger, "_max_logs", 4)
  monkeypatch.setattr(logger, "_logs_dir", str(tmp_path / "logs"))
  monkeypatch.setattr(logger, "_log_file", str(tmp_path / "logs" / "run.log"))
  instance = logger.get_logger("[SPILLTEST]", console_enabled=False)

  assert logger.read_archive() == []
  for n in range(4):
    instance.info(f"iteration {n}")

  assert [e.message for e in logger.read_archive()] == ["iteration 0"]
  assert [e.message for e in logger.get_all_logs()] == ["iteration 1", "iteration 2", "iteration 3"]
  logger.clear_logs()
