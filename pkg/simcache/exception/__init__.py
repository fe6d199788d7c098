from .custom_exception import (
    ConfigError,
    DomainError,
    IncompleteRunError,
    OutputError,
    SimCacheException,
    SimulationStateError,
    TraceFormatError,
)

__all__ = [
    "SimCacheException",
    "DomainError",
    "ConfigError",
    "TraceFormatError",
    "IncompleteRunError",
    "SimulationStateError",
    "OutputError",
]
