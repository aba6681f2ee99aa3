class MLMCError(Exception):
    """Base class for every error raised by the library."""


class DomainError(MLMCError, ValueError):
    """An argument lies outside the domain the quantity is defined on."""


class ConfigurationError(MLMCError):
    """Invalid configuration: bad schedule, missing kernel gradient, unknown keys...

    Args:
        message (str): human readable summary
        violations (list[str], optional): every individual problem found, e.g. key paths
    """

    def __init__(self, message: str, violations: list[str] | None = None):
        self.violations = list(violations or [])
        if self.violations:
            message = f"{message}: " + "; ".join(self.violations)
        super().__init__(message)


class ConfigParseError(ConfigurationError):
    """The configuration document is not valid JSON (or repeats a key)."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class LengthError(MLMCError):
    """A chain or a list of values is shorter than the operation needs."""


class StateError(MLMCError):
    """A chain state or an iterate is not finite / has zero target density."""


class DegenerateWeightsError(MLMCError):
    """Every importance weight vanished, normalization is undefined."""


class UnsupportedError(MLMCError):
    """The operation is not defined for this kind of input."""


class PlotError(MLMCError):
    """The table handed to the plotter does not fit the requested plot kind."""


class OptimizerError(MLMCError):
    """An error raised inside the optimization loop, tagged with the iteration index."""

    def __init__(self, iteration: int, cause: Exception):
        self.iteration = iteration
        self.cause = cause
        super().__init__(f"iteration {iteration}: {type(cause).__name__}: {cause}")
