"""JSON experiment configuration: strict loading into dataclasses, CLI overrides and the config hash."""
import dataclasses
import hashlib
import json
import types
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Literal, Optional, Union, get_args, get_origin, get_type_hints

from src.core.errors import ConfigParseError, ConfigurationError
from src.optim.preconditioners import OptimizerConfig
from src.optim.schedules import ScheduleSpec, validate_schedule
from .config import (
    CONFIG_HASH_LENGTH,
    DEFAULT_CLIP_BOUND,
    DEFAULT_LEVEL_Q,
    DEFAULT_T_GRID,
    IWAE_DEFAULT_PARTICLES,
    IWAE_PROPOSAL_SCALE,
    MIN_MOMENT_REPLICATES,
)

ExperimentKind = Literal["moments", "optimize", "iwae", "report"]
PlotKind = Literal["loglog_gradnorm", "bias_vs_T", "cost_axis"]

DEFAULT_REPLICATES = {"moments": MIN_MOMENT_REPLICATES, "optimize": 5, "iwae": MIN_MOMENT_REPLICATES, "report": 1}
DEFAULT_OUTPUT = "results"


@dataclass(frozen=True)
class ProblemConfig:
    """
    Which optimization problem to build.

    ``theta`` is where moment studies evaluate the estimator and where optimization starts: a
    scalar is broadcast to every coordinate, ``None`` means the origin.
    """
    id: Literal["quadratic", "ar1", "iwae"]
    dim: int = 10
    bound: float = DEFAULT_CLIP_BOUND
    init: Literal["fixed", "stationary"] = "fixed"
    x0: Optional[float] = None
    kernel: Literal["rwmh", "mala"] = "rwmh"
    scale: Optional[float] = None
    warm_start: bool = False
    phi: float = 0.5
    theta: Union[float, tuple[float, ...], None] = None


@dataclass(frozen=True)
class MlmcConfig:
    q: float = DEFAULT_LEVEL_Q
    T_grid: tuple[int, ...] = DEFAULT_T_GRID


@dataclass(frozen=True)
class IwaeConfig:
    """Linear-Gaussian latent model; ``ys`` are the observations an ``iwae`` problem fits."""
    k: int = IWAE_DEFAULT_PARTICLES
    proposal_scale: float = IWAE_PROPOSAL_SCALE
    proposal_mean: float = 0.0
    theta: float = 0.0
    y: float = 3.0
    ys: tuple[float, ...] = (3.0,)
    estimator: Literal["mlmc", "plain"] = "mlmc"
    T_grid: tuple[int, ...] = (2, 8, 32, 128)


@dataclass(frozen=True)
class ReportConfig:
    input: Optional[str] = None
    plots: tuple[PlotKind, ...] = ("loglog_gradnorm",)


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: ExperimentKind
    problem: Optional[ProblemConfig] = None
    schedule: ScheduleSpec = field(default_factory=ScheduleSpec)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    mlmc: MlmcConfig = field(default_factory=MlmcConfig)
    iwae: IwaeConfig = field(default_factory=IwaeConfig)
    report: ReportConfig = field(default_factory=ReportConfig)
    iterations: int = 10_000
    horizons: tuple[int, ...] = ()
    replicates: Optional[int] = None
    seed: int = 0
    output: str = DEFAULT_OUTPUT
    allow_invalid_schedule: bool = False

    @property
    def replicate_count(self) -> int:
        return DEFAULT_REPLICATES[self.experiment] if self.replicates is None else self.replicates


def _reject_duplicates(pairs: list[tuple[str, Any]]) -> dict:
    seen = {}
    for key, value in pairs:
        if key in seen:
            raise ConfigParseError(f"duplicate key {key!r}")
        seen[key] = value
    return seen


def _convert(value: Any, hint: Any, path: str, errors: list[str]) -> Any:
    """Check ``value`` against a type hint and return it in the dataclass' own types."""
    origin = get_origin(hint)
    if origin is Union or origin is types.UnionType:
        if value is None and type(None) in get_args(hint):
            return None
        options = [a for a in get_args(hint) if a is not type(None)]
        if len(options) == 1:
            return _convert(value, options[0], path, errors)
        for option in options:
            trial: list[str] = []
            converted = _convert(value, option, path, trial)
            if not trial:
                return converted
        errors.append(f"{path}: {value!r} does not match {hint}")
        return None
    if origin is Literal:
        if value not in get_args(hint):
            errors.append(f"{path}: {value!r} is not one of {', '.join(map(repr, get_args(hint)))}")
        return value
    if origin is tuple:
        item = get_args(hint)[0]
        if not isinstance(value, list):
            errors.append(f"{path}: expected a list")
            return None
        return tuple(_convert(v, item, f"{path}[{i}]", errors) for i, v in enumerate(value))
    if dataclasses.is_dataclass(hint):
        return _build(hint, value, path, errors)
    if isinstance(hint, type) and issubclass(hint, Enum):
        try:
            return hint(value)
        except ValueError:
            errors.append(f"{path}: {value!r} is not one of {', '.join(repr(m.value) for m in hint)}")
            return None
    if hint is bool:
        if not isinstance(value, bool):
            errors.append(f"{path}: expected true or false")
        return value
    if hint is int:
        if isinstance(value, bool) or not isinstance(value, int):
            errors.append(f"{path}: expected an integer")
        return value
    if hint is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            errors.append(f"{path}: expected a number")
            return None
        return float(value)
    if hint is str:
        if not isinstance(value, str):
            errors.append(f"{path}: expected a string")
        return value
    raise TypeError(f"no converter for {hint}")


def _build(cls: type, data: Any, path: str, errors: list[str]) -> Any:
    if not isinstance(data, dict):
        errors.append(f"{path}: expected an object")
        return None
    hints = get_type_hints(cls)
    fields = {f.name: f for f in dataclasses.fields(cls)}
    for key in data:
        if key not in fields:
            errors.append(f"{path}.{key}: unknown key")
    kwargs = {}
    for name, f in fields.items():
        if name in data:
            kwargs[name] = _convert(data[name], hints[name], f"{path}.{name}", errors)
        elif f.default is dataclasses.MISSING and f.default_factory is dataclasses.MISSING:
            errors.append(f"{path}.{name}: missing required key")
    if errors:
        return None
    return cls(**kwargs)


def _semantic_errors(cfg: ExperimentConfig) -> list[str]:
    errors = []
    if cfg.experiment in ("moments", "optimize") and cfg.problem is None:
        errors.append(f"config.problem: missing required key for a {cfg.experiment} experiment")
    if cfg.experiment == "report" and cfg.report.input is None:
        errors.append("config.report.input: missing required key for a report")
    if cfg.replicates is not None and cfg.replicates < 1:
        errors.append(f"config.replicates: must be >= 1, got {cfg.replicates}")
    if cfg.iterations < 1:
        errors.append(f"config.iterations: must be >= 1, got {cfg.iterations}")
    if any(h < 1 or h > cfg.iterations for h in cfg.horizons):
        errors.append(f"config.horizons: every horizon must lie in [1, iterations={cfg.iterations}]")
    if not 0.0 < cfg.mlmc.q < 1.0:
        errors.append(f"config.mlmc.q: must lie in (0, 1), got {cfg.mlmc.q}")
    for name, grid in (("mlmc.T_grid", cfg.mlmc.T_grid), ("iwae.T_grid", cfg.iwae.T_grid)):
        if not grid or any(T < 2 for T in grid):
            errors.append(f"config.{name}: need a non-empty list of bounds >= 2")
    if cfg.iwae.k < 1:
        errors.append(f"config.iwae.k: must be >= 1, got {cfg.iwae.k}")
    if not 0 <= cfg.seed < 1 << 64:
        errors.append(f"config.seed: must be a 64-bit unsigned integer, got {cfg.seed}")
    return errors


def config_from_dict(data: Any) -> ExperimentConfig:
    """Validate a parsed document.

    Raises:
        ConfigurationError: unknown or missing keys (listed with their full path), wrong types,
            or a schedule that breaks the convergence conditions (unless ``allow_invalid_schedule``)
    """
    errors: list[str] = []
    cfg = _build(ExperimentConfig, data, "config", errors)
    if cfg is None:
        raise ConfigurationError("invalid configuration", errors)
    errors = _semantic_errors(cfg)
    if errors:
        raise ConfigurationError("invalid configuration", errors)
    if not cfg.allow_invalid_schedule:
        violations = validate_schedule(cfg.schedule, cfg.optimizer)
        if violations:
            raise ConfigurationError(
                f"schedule breaks the {cfg.optimizer.kind.value} convergence conditions", [str(v) for v in violations]
            )
    return cfg


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a JSON document."""
    try:
        data = json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as e:
        raise ConfigParseError(e.msg, e.lineno, e.colno) from e
    return config_from_dict(data)


def load_config(path: str | Path) -> ExperimentConfig:
    """Read a UTF-8 JSON config file.

    Raises:
        ConfigParseError: not JSON, not UTF-8, or a repeated key
        ConfigurationError: the file cannot be read or the document fails validation
    """
    try:
        text = Path(path).read_bytes().decode("utf-8")
    except UnicodeDecodeError as e:
        raise ConfigParseError(f"{path} is not UTF-8: {e.reason}") from e
    except OSError as e:
        raise ConfigurationError(f"cannot read config {path}: {e.strerror}") from e
    return parse_config(text)


def with_overrides(cfg: ExperimentConfig, seed: int | None = None, replicates: int | None = None,
                   output: str | None = None) -> ExperimentConfig:
    """Apply command line overrides; None leaves a value untouched."""
    changes = {k: v for k, v in (("seed", seed), ("replicates", replicates), ("output", output)) if v is not None}
    cfg = dataclasses.replace(cfg, **changes)
    errors = _semantic_errors(cfg)
    if errors:
        raise ConfigurationError("invalid override", errors)
    return cfg


def _plain(value: Any) -> Any:
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def config_to_dict(cfg: ExperimentConfig) -> dict:
    """The fully defaulted configuration as plain JSON types; ``replicates`` is resolved."""
    data = _plain(dataclasses.asdict(cfg))
    data["replicates"] = cfg.replicate_count
    return data


def config_hash(cfg: ExperimentConfig) -> str:
    """SHA-256 of the canonical JSON of the configuration without its output path, shortened."""
    data = config_to_dict(cfg)
    data.pop("output")
    canonical = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:CONFIG_HASH_LENGTH]
