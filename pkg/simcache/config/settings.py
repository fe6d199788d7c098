"""
Typed run description.

Every model is frozen so a config can be hashed into a fingerprint and shared
between runs without copying.
"""

import hashlib
import json
from enum import Enum
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class WorkloadConfig(_Frozen):
    count: int = Field(20000, ge=1)
    mem_fraction: float = Field(0.225, ge=0.0, le=1.0)
    addr_low: int = Field(1, ge=1)
    addr_high: int = Field(500, ge=1)
    seq_base: int = Field(1000, ge=0)
    per_thread_offset: int = Field(0, ge=0)
    count_is_total: bool = False
    trace_path: Optional[str] = None

    @model_validator(mode="after")
    def _check_bounds(self):
        if self.addr_low > self.addr_high:
            raise ValueError(f"addr_low ({self.addr_low}) must not exceed addr_high ({self.addr_high})")
        return self

    def count_for_thread(self, thread: int, threads: int) -> int:
        if not self.count_is_total:
            return self.count
        share, extra = divmod(self.count, threads)
        return share + (1 if thread < extra else 0)


class PipelineConfig(_Frozen):
    decode_width: int = Field(4, ge=1)
    decode_period: float = Field(0.4, gt=0.0)
    decode_sigma: float = Field(1.0, ge=0.0)
    execute_width: int = Field(8, ge=1)
    execute_period: float = Field(0.4, gt=0.0)
    execute_sigma: float = Field(0.5, ge=0.0)
    window_capacity: int = Field(32, ge=0)
    strict_width: bool = True
    park_idle: bool = True


class CacheLevelConfig(_Frozen):
    capacity: int = Field(ge=1)
    # cost of bringing a block into this level from the next deeper source
    fetch_latency_mean: float = Field(gt=0.0)
    fetch_latency_sigma: float = Field(0.5, ge=0.0)


class FillPolicyKind(str, Enum):
    GLOBAL_FIFO = "global"
    PARTITIONED_FIFO = "partitioned"
    IDEAL = "ideal"


class FillPolicy(_Frozen):
    variant: FillPolicyKind = FillPolicyKind.GLOBAL_FIFO
    num_partitions: Optional[int] = Field(None, ge=1)

    @classmethod
    def global_fifo(cls) -> "FillPolicy":
        return cls(variant=FillPolicyKind.GLOBAL_FIFO)

    @classmethod
    def partitioned(cls, num_partitions: int) -> "FillPolicy":
        return cls(variant=FillPolicyKind.PARTITIONED_FIFO, num_partitions=num_partitions)

    @classmethod
    def ideal(cls) -> "FillPolicy":
        return cls(variant=FillPolicyKind.IDEAL)

    @property
    def partitions(self) -> int:
        if self.variant is FillPolicyKind.PARTITIONED_FIFO:
            return self.num_partitions or 1
        return 1


def _default_levels() -> tuple[CacheLevelConfig, ...]:
    return (
        CacheLevelConfig(capacity=128, fetch_latency_mean=2.5),
        CacheLevelConfig(capacity=256, fetch_latency_mean=10.0),
        CacheLevelConfig(capacity=512, fetch_latency_mean=60.0),
    )


class MemConfig(_Frozen):
    levels: tuple[CacheLevelConfig, ...] = Field(default_factory=_default_levels, min_length=1)
    policy: FillPolicy = Field(default_factory=FillPolicy)
    mlp_width: int = Field(1, ge=1)
    base_period: float = Field(1.0, gt=0.0)


class PrefetchConfig(_Frozen):
    enabled: bool = False
    degree: int = Field(0, ge=0)
    target_level: int = Field(1, ge=1)
    # under PartitionedFifo, L1 prefetch fills stay inside the owner's partition
    partitioned: bool = True


class SimConfig(_Frozen):
    workload: WorkloadConfig = Field(default_factory=WorkloadConfig)
    pipeline: PipelineConfig = Field(default_factory=PipelineConfig)
    mem: MemConfig = Field(default_factory=MemConfig)
    threads: int = Field(1, ge=1)
    prefetch: PrefetchConfig = Field(default_factory=PrefetchConfig)
    seed: int = 0
    seeds: int = Field(20, ge=1)
    deterministic_latencies: bool = False

    @model_validator(mode="before")
    @classmethod
    def _partitions_follow_threads(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        mem = data.get("mem")
        policy = mem.get("policy") if isinstance(mem, dict) else None
        if isinstance(policy, dict) and policy.get("num_partitions") is None:
            if policy.get("variant") == FillPolicyKind.PARTITIONED_FIFO:
                data = {**data, "mem": {**mem, "policy": {**policy, "num_partitions": data.get("threads", 1)}}}
        return data

    @model_validator(mode="after")
    def _check_cross_fields(self):
        policy = self.mem.policy
        if policy.variant is FillPolicyKind.PARTITIONED_FIFO and policy.partitions != self.threads:
            raise ValueError(
                f"partitioned policy needs one partition per thread ({policy.partitions} partitions, {self.threads} threads)"
            )
        if self.prefetch.target_level > len(self.mem.levels):
            raise ValueError(
                f"prefetch target level {self.prefetch.target_level} does not exist ({len(self.mem.levels)} levels)"
            )
        return self

    def fingerprint(self) -> str:
        """SHA-256 of the canonical JSON of this config, seed fields excluded."""
        canonical = json.dumps(
            self.model_dump(mode="json", exclude={"seed", "seeds"}),
            sort_keys=True,
            separators=(",", ":"),
        )
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class ExperimentSettings(_Frozen):
    total_instructions: int = Field(20000, ge=1)
    hierarchy_depths: tuple[int, ...] = (3,)
    coresweep_cores: tuple[int, ...] = (1, 2, 4, 8, 16, 32, 64)
    coresweep_l1_capacity: int = Field(512, ge=1)
    coresweep_l1_latency: float = Field(60.0, gt=0.0)
    prefetchsweep_degrees: tuple[int, ...] = tuple(range(9))
    technique_threads: int = Field(4, ge=1)
    technique_prefetch_degree: int = Field(4, ge=0)
    technique_prefetch_level: int = Field(2, ge=1)

    @model_validator(mode="after")
    def _check_sweeps(self):
        for name in ("hierarchy_depths", "coresweep_cores", "prefetchsweep_degrees"):
            values = getattr(self, name)
            if any(b <= a for a, b in zip(values, values[1:])):
                raise ValueError(f"{name} must be strictly increasing")
        for name in ("hierarchy_depths", "coresweep_cores"):
            if any(v < 1 for v in getattr(self, name)):
                raise ValueError(f"{name} must be positive")
        if any(d < 0 for d in self.prefetchsweep_degrees):
            raise ValueError("prefetchsweep_degrees must be non-negative")
        return self
