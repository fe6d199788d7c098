"""
Wires one simulated processor: workload, per-thread decode/execute processes,
the cache service process and the memory hierarchy, all on one event engine.
"""

from enum import Enum
from typing import Any, Callable, Optional

import numpy as np

from ..config.settings import SimConfig
from ..engine.event_engine import EventEngine
from ..exception.custom_exception import ConfigError
from ..evaluation.metrics import RunSummary, summarize
from ..logger import GLOBAL_LOGGER as log
from ..memory.hierarchy import MemoryHierarchy, new_hierarchy
from ..memory.prefetcher import prefetch_step
from ..pipeline.processor import PipelineState, check_done, decode_step, execute_step
from ..workload.generator import InstructionStream, RngPurpose, generate_workload, make_rng
from ..workload.trace_io import read_trace, split_by_thread


class Outcome(Enum):
    RUN = "run"      # hold, then activate again
    PARK = "park"    # dormant until woken
    STOP = "stop"    # nothing left to do, ever


def jittered_hold(mean: float, sigma: float, rng: np.random.Generator, deterministic: bool) -> Callable[[], float]:
    """|Normal(mean, sigma)| per activation, or exactly `mean` in deterministic mode."""
    if deterministic:
        return lambda: mean
    return lambda: abs(float(rng.normal(mean, sigma)))


class ModelProcess:
    """A process that re-arms itself after each activation unless it parks or stops."""

    def __init__(self, engine: EventEngine, name: str, step: Callable[[], Outcome], hold: Callable[[], float]):
        self.engine = engine
        self.name = name
        self.step = step
        self.hold = hold
        self.armed = False
        self.parked = False
        self.stopped = False
        self.activations = 0

    def start(self) -> None:
        self._arm(0.0)

    def _arm(self, delay: float) -> None:
        if self.armed or self.stopped:
            return
        self.armed = True
        self.engine.schedule(self.activate, delay)

    def activate(self) -> None:
        self.armed = False
        self.activations += 1
        outcome = self.step()
        if outcome is Outcome.RUN:
            self._arm(self.hold())
        elif outcome is Outcome.PARK:
            self.parked = True
        else:
            self.stopped = True

    def wake(self) -> None:
        if self.parked:
            self.parked = False
            self._arm(self.hold())


class Simulation:
    """One run of the processor model for a given config and seed."""

    def __init__(self, cfg: SimConfig, seed: Optional[int] = None,
                 streams: Optional[list[InstructionStream]] = None):
        self.cfg = cfg
        self.seed = cfg.seed if seed is None else seed
        deterministic = cfg.deterministic_latencies
        self.engine = EventEngine()
        self.streams = streams if streams is not None else load_workload(cfg, self.seed)
        self.workload_total = sum(len(s) for s in self.streams)
        self.states = [PipelineState(thread=t) for t in range(cfg.threads)]
        self.hierarchy: MemoryHierarchy = new_hierarchy(
            cfg.mem,
            threads=cfg.threads,
            rng=make_rng(self.seed, RngPurpose.CACHE),
            deterministic=deterministic,
        )
        self._done = False

        pipe = cfg.pipeline
        self.decoders = [
            ModelProcess(self.engine, f"decode-{t}", self._decode_step(t),
                         jittered_hold(pipe.decode_period, pipe.decode_sigma,
                                       make_rng(self.seed, RngPurpose.DECODE, t), deterministic))
            for t in range(cfg.threads)
        ]
        self.executors = [
            ModelProcess(self.engine, f"execute-{t}", self._execute_step(t),
                         jittered_hold(pipe.execute_period, pipe.execute_sigma,
                                       make_rng(self.seed, RngPurpose.EXECUTE, t), deterministic))
            for t in range(cfg.threads)
        ]
        self._cache_latency = 0.0
        self.cache_process = ModelProcess(self.engine, "cache", self._cache_step,
                                          lambda: cfg.mem.base_period + self._cache_latency)
        self.hierarchy.on_l1_fill(self._wake_executors)

    # ---------- Process bodies ----------
    def _decode_step(self, t: int) -> Callable[[], Outcome]:
        stream, state = self.streams[t], self.states[t]
        pipe, prefetch = self.cfg.pipeline, self.cfg.prefetch

        def step() -> Outcome:
            prefetch_step(self.hierarchy, stream, prefetch, owner=t)
            moved = decode_step(state, stream, pipe)
            if moved:
                self.executors[t].wake()
            if stream.exhausted:
                return Outcome.STOP
            if moved == 0 and pipe.park_idle:
                return Outcome.PARK
            return Outcome.RUN

        return step

    def _execute_step(self, t: int) -> Callable[[], Outcome]:
        stream, state = self.streams[t], self.states[t]
        pipe = self.cfg.pipeline

        def step() -> Outcome:
            retired = execute_step(state, self.hierarchy.l1_hit, pipe, on_retire=self.hierarchy.note_retired)
            if retired:
                self.decoders[t].wake()
                self._done = check_done(self.states, self.workload_total)
            if stream.exhausted and not state.window:
                return Outcome.STOP
            if retired == 0 and pipe.park_idle:
                return Outcome.PARK
            return Outcome.RUN

        return step

    def _cache_step(self) -> Outcome:
        self._cache_latency = self.hierarchy.service_misses([s.window for s in self.states])
        return Outcome.RUN

    def _wake_executors(self, _address: int) -> None:
        for executor in self.executors:
            executor.wake()

    # ---------- Run ----------
    @property
    def finished(self) -> bool:
        return self.engine.finished

    def run(self, max_events: Optional[int] = None) -> float:
        self._done = check_done(self.states, self.workload_total)
        for t in range(self.cfg.threads):
            self.decoders[t].start()
            self.executors[t].start()
        self.cache_process.start()
        return self.engine.run(lambda _engine: self._done, max_events=max_events, snapshot=self.partial_state)

    def partial_state(self) -> dict[str, Any]:
        counters = self.hierarchy.counters
        return {
            "instructions": self.workload_total,
            "retired": sum(s.rob_count for s in self.states),
            "thread_retired": [s.rob_count for s in self.states],
            "accesses": counters.accesses,
            "level_misses": list(counters.level_misses),
            "competitive_misses": counters.competitive_misses,
            "prefetches_issued": counters.prefetches_issued,
        }


def load_workload(cfg: SimConfig, seed: int) -> list[InstructionStream]:
    if cfg.workload.trace_path:
        try:
            with open(cfg.workload.trace_path, "rb") as f:
                return split_by_thread(read_trace(f), cfg.threads)
        except OSError as e:
            raise ConfigError(f"cannot read trace: {e}", key="trace_path", error_details=e) from e
    return generate_workload(cfg.workload, cfg.threads, seed)


def run_single(cfg: SimConfig, seed: Optional[int] = None, max_events: Optional[int] = None) -> RunSummary:
    sim = Simulation(cfg, seed)
    log.debug("Run started", seed=sim.seed, threads=cfg.threads, instructions=sim.workload_total,
              policy=cfg.mem.policy.variant.value)
    sim.run(max_events=max_events)
    sim.hierarchy.check()
    summary = summarize(sim)
    log.debug("Run finished", seed=summary.seed, sim_time=summary.sim_time,
              l1_misses=summary.l1_misses, accesses=summary.accesses, events=summary.events)
    return summary
