"""
Canned experiments: each one is a sweep of run configurations, every point
aggregated over a seed ensemble.
"""

import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Any, Callable, Iterable, Optional, Sequence

import pandas as pd

from ..config.settings import ExperimentSettings, SimConfig
from ..evaluation.metrics import METRICS, AggregateStats, RunSummary, aggregate, speedup
from ..exception.custom_exception import ConfigError, SimulationStateError
from ..logger import GLOBAL_LOGGER as log
from ..utils.config_loader import with_overrides
from .simulation_workflow import run_single

CSV_COLUMNS = ["sweep", "metric", "mean", "stddev", "min", "max", "n"]

# published reference points, reported next to measured values
PUBLISHED_L2_L1_RATIO = 224 / 2560
PUBLISHED_L3_L2_RATIO = 12 / 224
PUBLISHED_SPEEDUP = 0.15


class ExperimentName(str, Enum):
    HIERARCHY = "hierarchy"
    CORESWEEP = "coresweep"
    PREFETCHSWEEP = "prefetchsweep"
    TECHNIQUE = "technique"


@dataclass(frozen=True)
class ExperimentRow:
    value: float
    label: str
    stats: AggregateStats


@dataclass
class ExperimentTable:
    sweep_name: str
    rows: list[ExperimentRow] = field(default_factory=list)

    def add(self, value: float, label: str, stats: AggregateStats) -> None:
        if self.rows and value <= self.rows[-1].value:
            raise SimulationStateError(f"sweep values must increase: {value} after {self.rows[-1].value}")
        self.rows.append(ExperimentRow(value, label, stats))

    def row(self, label: str) -> ExperimentRow:
        for r in self.rows:
            if r.label == label:
                return r
        raise KeyError(label)


@dataclass(frozen=True)
class SweepPoint:
    value: float
    label: str
    cfg: SimConfig


def seed_list(base_seed: int, seeds: int) -> list[int]:
    return [base_seed + i for i in range(seeds)]


def _run_pair(args: tuple[SimConfig, int]) -> RunSummary:
    cfg, seed = args
    return run_single(cfg, seed)


def run_ensemble(cfg: SimConfig, seeds: Sequence[int], workers: int = 1) -> list[RunSummary]:
    """Independent runs, returned in seed order regardless of completion order."""
    jobs = [(cfg, s) for s in seeds]
    if workers <= 1 or len(jobs) <= 1:
        return [_run_pair(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_pair, jobs))


# ---------- Sweep definitions ----------
def _hierarchy_points(base: SimConfig, settings: ExperimentSettings) -> list[SweepPoint]:
    points = []
    ram_latency = base.mem.levels[-1].fetch_latency_mean
    for depth in settings.hierarchy_depths:
        if depth > len(base.mem.levels):
            raise SimulationStateError(f"hierarchy depth {depth} exceeds the {len(base.mem.levels)} configured levels")
        overrides: list[tuple[str, Any]] = [("levels", depth), (f"l{depth}_latency", ram_latency)]
        if base.prefetch.target_level > depth:
            overrides.append(("prefetch_level", depth))
        points.append(SweepPoint(depth, str(depth), with_overrides(base, overrides)))
    return points


def _coresweep_points(base: SimConfig, settings: ExperimentSettings) -> list[SweepPoint]:
    points = []
    for cores in settings.coresweep_cores:
        cfg = with_overrides(base, [
            ("threads", cores),
            ("partitions", None),
            ("count", settings.total_instructions),
            ("count_is_total", True),
            ("per_thread_offset", base.workload.addr_high),
            ("prefetch_level", 1),
            ("capacities", settings.coresweep_l1_capacity),
            ("latencies", settings.coresweep_l1_latency),
        ])
        points.append(SweepPoint(cores, str(cores), cfg))
    return points


def _prefetchsweep_points(base: SimConfig, settings: ExperimentSettings) -> list[SweepPoint]:
    points = []
    for degree in settings.prefetchsweep_degrees:
        cfg = with_overrides(base, [
            ("threads", 1),
            ("partitions", None),
            ("prefetch", degree > 0),
            ("prefetch_degree", degree),
            ("prefetch_level", 1),
        ])
        points.append(SweepPoint(degree, str(degree), cfg))
    return points


def _technique_points(base: SimConfig, settings: ExperimentSettings) -> list[SweepPoint]:
    shared = [
        ("threads", settings.technique_threads),
        ("partitions", None),
        ("count", settings.total_instructions),
        ("count_is_total", True),
    ]
    no_prefetch = [("prefetch", False), ("prefetch_degree", 0), ("prefetch_level", 1)]
    variants = [
        ("ideal", shared + no_prefetch + [("policy", "ideal")]),
        ("global", shared + no_prefetch + [("policy", "global")]),
        ("partitioned", shared + [
            ("policy", "partitioned"),
            ("prefetch", True),
            ("prefetch_degree", settings.technique_prefetch_degree),
            ("prefetch_level", settings.technique_prefetch_level),
        ]),
    ]
    return [SweepPoint(i, label, with_overrides(base, overrides)) for i, (label, overrides) in enumerate(variants)]


SWEEPS: dict[ExperimentName, Callable[[SimConfig, ExperimentSettings], list[SweepPoint]]] = {
    ExperimentName.HIERARCHY: _hierarchy_points,
    ExperimentName.CORESWEEP: _coresweep_points,
    ExperimentName.PREFETCHSWEEP: _prefetchsweep_points,
    ExperimentName.TECHNIQUE: _technique_points,
}


def _report(name: ExperimentName, table: ExperimentTable) -> None:
    if name is ExperimentName.HIERARCHY and table.rows:
        stats = table.rows[-1].stats
        log.info(
            "Miss ratios down the hierarchy",
            l2_l1=stats.mean("l2_l1_ratio"),
            l2_l1_published=PUBLISHED_L2_L1_RATIO,
            l3_l2=stats.mean("l3_l2_ratio"),
            l3_l2_published=PUBLISHED_L3_L2_RATIO,
            miss_rate_per_instruction=stats.mean("miss_rate_per_instruction"),
            miss_rate_per_access=stats.mean("miss_rate_per_access"),
        )
    elif name is ExperimentName.TECHNIQUE and len(table.rows) == 3:
        gain = speedup(table.row("global").stats, table.row("partitioned").stats)
        log.info("Partitioned fill speedup over shared fill", speedup=gain, published=PUBLISHED_SPEEDUP)


def run_experiment(
    name: str | ExperimentName,
    base: SimConfig,
    settings: Optional[ExperimentSettings] = None,
    seeds: Optional[int] = None,
    workers: int = 1,
) -> ExperimentTable:
    """Run every sweep point of `name` over `seeds` seeds starting at `base.seed`."""
    try:
        experiment = ExperimentName(name)
    except ValueError as e:
        known = ", ".join(n.value for n in ExperimentName)
        raise SimulationStateError(f"unknown experiment {name!r} (known: {known})", e) from e

    settings = settings or ExperimentSettings()
    n_seeds = base.seeds if seeds is None else seeds
    if n_seeds < 1:
        raise ConfigError(f"ensemble needs at least one seed, got {n_seeds}", key="seeds")
    seed_values = seed_list(base.seed, n_seeds)
    table = ExperimentTable(experiment.value)
    for point in SWEEPS[experiment](base, settings):
        summaries = run_ensemble(point.cfg, seed_values, workers)
        stats = aggregate(summaries)
        table.add(point.value, point.label, stats)
        log.info(
            "Sweep point finished",
            experiment=experiment.value,
            point=point.label,
            seeds=n_seeds,
            l1_misses=stats.mean("l1_misses"),
            sim_time=stats.mean("sim_time"),
        )
    _report(experiment, table)
    return table


# ---------- Output ----------
def table_frame(table: ExperimentTable, metrics: Iterable[str] = METRICS) -> pd.DataFrame:
    metrics = list(metrics)
    records = [
        {
            "sweep": row.label,
            "metric": metric,
            "mean": row.stats[metric].mean,
            "stddev": row.stats[metric].stddev,
            "min": row.stats[metric].min,
            "max": row.stats[metric].max,
            "n": row.stats[metric].n,
        }
        for row in table.rows
        for metric in metrics
    ]
    return pd.DataFrame.from_records(records, columns=CSV_COLUMNS)


def emit_csv(table: ExperimentTable, sink: IO, metrics: Iterable[str] = METRICS) -> None:
    buffer = io.StringIO()
    table_frame(table, metrics).to_csv(buffer, index=False, lineterminator="\n", float_format=lambda x: repr(float(x)))
    text = buffer.getvalue()
    if isinstance(sink, io.TextIOBase) or "b" not in getattr(sink, "mode", "b"):
        sink.write(text)
    else:
        sink.write(text.encode("utf-8"))
