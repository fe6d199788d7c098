"""
Cache hierarchy and the cache service process logic.

Levels are numbered from 1 (L1). The fill policy applies to L1 only; deeper
levels are always a single FIFO. On a miss the block is installed from the
level it was found in (or RAM) up to L1, deepest level first, and the cache
process is charged the fetch latency of the deepest level it filled.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ..config.settings import FillPolicyKind, MemConfig
from ..exception.custom_exception import ConfigError
from ..workload.generator import Instruction
from .cache_level import CacheLevel


@dataclass
class MissCounters:
    levels: int
    threads: int = 1
    accesses: int = 0
    level_misses: list[int] = field(default_factory=list)
    competitive_misses: int = 0
    prefetches_issued: int = 0
    thread_accesses: list[int] = field(default_factory=list)
    thread_l1_misses: list[int] = field(default_factory=list)

    def __post_init__(self):
        self.level_misses = self.level_misses or [0] * self.levels
        self.thread_accesses = self.thread_accesses or [0] * self.threads
        self.thread_l1_misses = self.thread_l1_misses or [0] * self.threads

    def misses(self, level: int) -> int:
        return self.level_misses[level - 1] if level <= self.levels else 0

    @property
    def l1_misses(self) -> int:
        return self.misses(1)

    @property
    def l2_misses(self) -> int:
        return self.misses(2)

    @property
    def l3_misses(self) -> int:
        return self.misses(3)

    def record_access(self, thread: int) -> None:
        self.accesses += 1
        self.thread_accesses[thread] += 1

    def record_l1_miss(self, thread: int) -> None:
        self.level_misses[0] += 1
        self.thread_l1_misses[thread] += 1

    def check(self) -> None:
        chain = [self.accesses] + self.level_misses
        assert all(deeper <= shallower for shallower, deeper in zip(chain, chain[1:])), chain


class MemoryHierarchy:
    def __init__(self, cfg: MemConfig, threads: int = 1, rng: Optional[np.random.Generator] = None,
                 deterministic: bool = False):
        self.cfg = cfg
        self.policy = cfg.policy.variant
        self.ideal = self.policy is FillPolicyKind.IDEAL
        self.deterministic = deterministic or rng is None
        self._rng = rng
        if self.policy is FillPolicyKind.PARTITIONED_FIFO and cfg.policy.partitions > cfg.levels[0].capacity:
            raise ConfigError(
                f"{cfg.policy.partitions} partitions exceed the L1 capacity of {cfg.levels[0].capacity}",
                key="partitions",
            )
        self.levels = [
            CacheLevel(f"L{i + 1}", level.capacity, cfg.policy.partitions if i == 0 else 1)
            for i, level in enumerate(cfg.levels)
        ]
        self.counters = MissCounters(levels=len(self.levels), threads=threads)
        self._probed: set[tuple[int, int]] = set()
        self._evicted_by: dict[int, int] = {}
        self._next_thread = 0
        self._l1_listeners: list[Callable[[int], None]] = []

    @property
    def depth(self) -> int:
        return len(self.levels)

    def on_l1_fill(self, listener: Callable[[int], None]) -> None:
        self._l1_listeners.append(listener)

    def level(self, level: int) -> CacheLevel:
        if not 1 <= level <= self.depth:
            raise ConfigError(f"no cache level {level} (configured: {self.depth})", key="prefetch_level")
        return self.levels[level - 1]

    # ---------- Mechanism ----------
    def lookup(self, level: int, address: int) -> bool:
        """Membership across the whole level; partitions only matter on fill."""
        if self.ideal:
            return True
        return address in self.level(level)

    def l1_hit(self, address: int) -> bool:
        return self.ideal or address in self.levels[0]

    def fill(self, level: int, address: int, owner: int, shared_victim: bool = False) -> Optional[int]:
        """Install `address` for `owner`; returns the evicted address, if any. Counters are untouched."""
        cache = self.level(level)
        partition = cache.oldest_partition() if (shared_victim and level == 1) else None
        was_resident = address in cache
        evicted = cache.fill(address, owner, partition)
        if level == 1:
            if evicted is not None:
                self._evicted_by[evicted.address] = owner
            if not was_resident:
                for listener in self._l1_listeners:
                    listener(address)
        return evicted.address if evicted is not None else None

    def _latency(self, level: int) -> float:
        level_cfg = self.cfg.levels[level - 1]
        if self.deterministic:
            return level_cfg.fetch_latency_mean
        return abs(float(self._rng.normal(level_cfg.fetch_latency_mean, level_cfg.fetch_latency_sigma)))

    def fetch(self, address: int, owner: int) -> float:
        """Walk the hierarchy below L1 for a block that missed L1; returns the added latency."""
        source = next((lv for lv in range(2, self.depth + 1) if address in self.levels[lv - 1]), None)
        deepest = (source - 1) if source is not None else self.depth
        for lv in range(2, deepest + 1):
            self.counters.level_misses[lv - 1] += 1
        for lv in range(deepest, 0, -1):
            self.fill(lv, address, owner)
        return self._latency(deepest)

    # ---------- Accounting ----------
    def _first_probe(self, inst: Instruction) -> bool:
        key = (inst.thread, inst.seq)
        if key in self._probed:
            return False
        self._probed.add(key)
        return True

    def ideal_access(self, inst: Instruction) -> float:
        """Every access hits; only the access itself is counted."""
        if self._first_probe(inst):
            self.counters.record_access(inst.thread)
        return 0.0

    def note_retired(self, inst: Instruction) -> None:
        """A memory instruction retired; count it as an L1 hit if it was never probed."""
        key = (inst.thread, inst.seq)
        if key in self._probed:
            self._probed.discard(key)
        else:
            self.counters.record_access(inst.thread)

    def _demand_miss(self, inst: Instruction) -> float:
        self._probed.add((inst.thread, inst.seq))
        self.counters.record_access(inst.thread)
        self.counters.record_l1_miss(inst.thread)
        by = self._evicted_by.get(inst.address)
        if by is not None and by != inst.thread:
            self.counters.competitive_misses += 1
        return self.fetch(inst.address, inst.thread)

    def service_misses(self, windows: Sequence[Sequence[Instruction]]) -> float:
        """One cache-process activation: account accesses and service up to mlp_width L1 misses.

        Threads are scanned round-robin, starting one thread later on every call.
        Returns the latency to add to the process hold.
        """
        latency = 0.0
        serviced = 0
        count = len(windows)
        start = self._next_thread
        self._next_thread = (start + 1) % count if count else 0
        for k in range(count):
            for inst in windows[(start + k) % count]:
                if not inst.accesses_memory:
                    continue
                if self.ideal:
                    latency += self.ideal_access(inst)
                elif inst.address in self.levels[0]:
                    if self._first_probe(inst):
                        self.counters.record_access(inst.thread)
                else:
                    latency += self._demand_miss(inst)
                    serviced += 1
                    if serviced >= self.cfg.mlp_width:
                        return latency
        return latency

    def prefetch(self, address: int, owner: int, target_level: int, partitioned: bool = True) -> int:
        """Install `address` at `target_level` and every deeper level; returns 1 if it was absent."""
        if self.ideal or address in self.level(target_level):
            return 0
        for lv in range(self.depth, target_level - 1, -1):
            self.fill(lv, address, owner, shared_victim=not partitioned)
        self.counters.prefetches_issued += 1
        return 1

    def check(self) -> None:
        for cache in self.levels:
            cache.check()
        self.counters.check()


def new_hierarchy(cfg: MemConfig, threads: int = 1, rng: Optional[np.random.Generator] = None,
                  deterministic: bool = False) -> MemoryHierarchy:
    return MemoryHierarchy(cfg, threads=threads, rng=rng, deterministic=deterministic)
