"""
Run summaries, seed-ensemble aggregation and speedup.
"""

import math
from typing import TYPE_CHECKING, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..exception.custom_exception import SimulationStateError

if TYPE_CHECKING:
    from ..workflow.simulation_workflow import Simulation

# emission order of every per-run metric
METRICS: tuple[str, ...] = (
    "accesses",
    "l1_misses",
    "l2_misses",
    "l3_misses",
    "competitive_misses",
    "prefetches_issued",
    "retired",
    "sim_time",
    "max_window_occupancy",
    "miss_rate_per_instruction",
    "miss_rate_per_access",
    "l2_l1_ratio",
    "l3_l2_ratio",
)


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


class RunSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    seed: int
    config_fingerprint: str
    threads: int
    instructions: int
    retired: int
    accesses: int
    l1_misses: int
    l2_misses: int
    l3_misses: int
    competitive_misses: int
    prefetches_issued: int
    sim_time: float
    max_window_occupancy: int
    events: int
    thread_retired: tuple[int, ...]
    thread_accesses: tuple[int, ...]
    thread_l1_misses: tuple[int, ...]

    @property
    def miss_rate_per_instruction(self) -> float:
        return _ratio(self.l1_misses, self.instructions)

    @property
    def miss_rate_per_access(self) -> float:
        return _ratio(self.l1_misses, self.accesses)

    @property
    def l2_l1_ratio(self) -> float:
        return _ratio(self.l2_misses, self.l1_misses)

    @property
    def l3_l2_ratio(self) -> float:
        return _ratio(self.l3_misses, self.l2_misses)

    def metric(self, name: str) -> float:
        return float(getattr(self, name))


class MetricStats(BaseModel):
    model_config = ConfigDict(frozen=True)

    mean: float
    stddev: float
    min: float
    max: float
    n: int


class AggregateStats(BaseModel):
    model_config = ConfigDict(frozen=True)

    config_fingerprint: str
    n: int
    metrics: dict[str, MetricStats]

    def __getitem__(self, metric: str) -> MetricStats:
        return self.metrics[metric]

    def mean(self, metric: str) -> float:
        return self.metrics[metric].mean


def summarize(sim: "Simulation") -> RunSummary:
    """Snapshot of a finished run."""
    if not sim.finished:
        raise SimulationStateError("cannot summarize a run that has not terminated")
    counters = sim.hierarchy.counters
    return RunSummary(
        seed=sim.seed,
        config_fingerprint=sim.cfg.fingerprint(),
        threads=sim.cfg.threads,
        instructions=sim.workload_total,
        retired=sum(s.rob_count for s in sim.states),
        accesses=counters.accesses,
        l1_misses=counters.l1_misses,
        l2_misses=counters.l2_misses,
        l3_misses=counters.l3_misses,
        competitive_misses=counters.competitive_misses,
        prefetches_issued=counters.prefetches_issued,
        sim_time=sim.engine.now(),
        max_window_occupancy=max((s.max_window_occupancy for s in sim.states), default=0),
        events=sim.engine.executed,
        thread_retired=tuple(s.rob_count for s in sim.states),
        thread_accesses=tuple(counters.thread_accesses),
        thread_l1_misses=tuple(counters.thread_l1_misses),
    )


def _stats(values: Sequence[float]) -> MetricStats:
    # sorting first makes the reduction independent of input order
    ordered = np.sort(np.asarray(values, dtype=float))
    lo, hi = float(ordered[0]), float(ordered[-1])
    mean = min(max(float(np.mean(ordered)), lo), hi)
    stddev = float(np.std(ordered, ddof=1)) if len(ordered) > 1 else 0.0
    return MetricStats(mean=mean, stddev=stddev, min=lo, max=hi, n=len(ordered))


def aggregate(summaries: Sequence[RunSummary]) -> AggregateStats:
    if not summaries:
        raise SimulationStateError("cannot aggregate an empty set of runs")
    fingerprints = {s.config_fingerprint for s in summaries}
    if len(fingerprints) != 1:
        raise SimulationStateError(f"runs come from {len(fingerprints)} different configurations")
    return AggregateStats(
        config_fingerprint=fingerprints.pop(),
        n=len(summaries),
        metrics={name: _stats([s.metric(name) for s in summaries]) for name in METRICS},
    )


def standard_error(stats: AggregateStats, metric: str = "sim_time") -> float:
    m = stats[metric]
    return m.stddev / math.sqrt(m.n)


def speedup(baseline: AggregateStats, variant: AggregateStats, metric: str = "sim_time") -> float:
    """Fractional reduction of `metric` relative to the baseline; negative means slower."""
    base = baseline.mean(metric)
    if base == 0:
        raise SimulationStateError(f"baseline mean {metric} is zero")
    return 1.0 - variant.mean(metric) / base
