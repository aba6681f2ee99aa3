from .errors import (
    MLMCError,
    DomainError,
    ConfigurationError,
    ConfigParseError,
    LengthError,
    StateError,
    DegenerateWeightsError,
    UnsupportedError,
    PlotError,
    OptimizerError,
)
from .rng import RngStream, make_stream, standard_normal
from .records import ParamVector, RunRecord, as_param_vector

__all__ = [
    "MLMCError", "DomainError", "ConfigurationError", "ConfigParseError", "LengthError",
    "StateError", "DegenerateWeightsError", "UnsupportedError", "PlotError", "OptimizerError",
    "RngStream", "make_stream", "standard_normal",
    "ParamVector", "RunRecord", "as_param_vector",
]
