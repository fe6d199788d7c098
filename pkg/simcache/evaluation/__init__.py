from .metrics import (
    METRICS,
    AggregateStats,
    MetricStats,
    RunSummary,
    aggregate,
    speedup,
    standard_error,
    summarize,
)

__all__ = [
    "METRICS",
    "AggregateStats",
    "MetricStats",
    "RunSummary",
    "aggregate",
    "speedup",
    "standard_error",
    "summarize",
]
