from .settings import (
    CacheLevelConfig,
    ExperimentSettings,
    FillPolicy,
    FillPolicyKind,
    MemConfig,
    PipelineConfig,
    PrefetchConfig,
    SimConfig,
    WorkloadConfig,
)

__all__ = [
    "CacheLevelConfig",
    "ExperimentSettings",
    "FillPolicy",
    "FillPolicyKind",
    "MemConfig",
    "PipelineConfig",
    "PrefetchConfig",
    "SimConfig",
    "WorkloadConfig",
]
