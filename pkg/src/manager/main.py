import argparse
import json
import os
import sys

from src.config.config import THREADS_ENV_VAR
from src.config.experiment_config import load_config, with_overrides
from src.core.errors import ConfigurationError, MLMCError
from src.ui.logging import Logger
from .experiment_controller import run_experiment

logger = Logger()

STARTER_CODENAME='STARTER'

server_logger = logger.get_logger(f'[{STARTER_CODENAME}]')
verbose_logger = logger.get_logger(f'[{STARTER_CODENAME}] |:', False)

SUBCOMMANDS = {
  "moments": "bias and moments of the MLMC estimator over a grid of truncation bounds",
  "optimize": "MLMC-Adagrad / MLMC-AMSGrad runs with the randomized iterate",
  "iwae": "bias of plain and MLMC importance weighted gradients",
  "report": "print a result table and draw its plots",
}


def build_parser() -> argparse.ArgumentParser:
  parser = argparse.ArgumentParser(prog="mlmc-opt", description="Adaptive stochastic optimization with MLMC gradients")
  commands = parser.add_subparsers(dest="command", required=True)
  for name, help_text in SUBCOMMANDS.items():
    sub = commands.add_parser(name, help=help_text)
    sub.add_argument("--config", required=True, help="JSON experiment configuration")
    sub.add_argument("--seed", type=int, default=None, help="Overrides the configured seed")
    sub.add_argument("--replicates", type=int, default=None, help="Overrides the configured replicate count")
    sub.add_argument("--out", default=None, help="Output directory")
    sub.add_argument("--threads", type=int, default=None, help=f"Replicate threads (falls back to ${THREADS_ENV_VAR}, then 1)")
    sub.add_argument("-v", "--verbose", action="store_true", help="Enable verbose mode")
  return parser


def resolve_threads(flag: int | None) -> int:
  """--threads, else the environment variable, else 1."""
  if flag is not None:
    threads = flag
  else:
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None or raw.strip() == "":
      return 1
    try:
      threads = int(raw)
    except ValueError:
      raise ConfigurationError(f"{THREADS_ENV_VAR}={raw!r} is not an integer") from None
  if threads < 1:
    raise ConfigurationError(f"thread count must be >= 1, got {threads}")
  return threads


def report_failures(command: str, failures: list[dict]) -> None:
  """Machine-readable failure list on stderr."""
  print(json.dumps({"command": command, "status": "failed", "failures": failures}, sort_keys=True), file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
  args = build_parser().parse_args(argv)
  if args.verbose:
    logger.set_console_enabled(True)

  try:
    cfg = load_config(args.config)
    if cfg.experiment != args.command:
      raise ConfigurationError(f"{args.config} describes a {cfg.experiment} experiment, not {args.command}")
    cfg = with_overrides(cfg, seed=args.seed, replicates=args.replicates, output=args.out)
    threads = resolve_threads(args.threads)
    verbose_logger.debug(f"{args.command}: {cfg}")
    result = run_experiment(cfg, threads)
  except MLMCError as e:
    server_logger.error(f"{args.command} failed: {e}")
    report_failures(args.command, [{"error": type(e).__name__, "message": str(e), "notes": getattr(e, "__notes__", [])}])
    return 1

  if not result.ok:
    server_logger.error(f"{args.command}: {len(result.failures)} invariant check(s) failed")
    report_failures(args.command, [{"error": "InvariantViolation", "message": f} for f in result.failures])
    return 1

  for path in result.files:
    verbose_logger.info(f"wrote {path}")
  server_logger.info(f"{args.command} done: {len(result.table)} rows, {len(result.files)} file(s)")
  return 0


if __name__ == "__main__":
  sys.exit(main())
