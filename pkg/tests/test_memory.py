from collections import deque

import numpy as np
import pytest

from simcache.config.settings import CacheLevelConfig, FillPolicy, MemConfig, PrefetchConfig
from simcache.exception.custom_exception import ConfigError
from simcache.memory.cache_level import CacheLevel, partition_capacities
from simcache.memory.hierarchy import new_hierarchy
from simcache.memory.prefetcher import prefetch_step
from simcache.workload.generator import Instruction, InstructionStream


def load(seq, address, thread=0):
    return Instruction(seq=seq, accesses_memory=True, address=address, thread=thread)


def default_mem(**kw) -> MemConfig:
    return MemConfig(**kw)


# ---------- construction ----------
def test_defaults_build_three_empty_levels():
    hier = new_hierarchy(default_mem(), deterministic=True)
    assert [lv.capacity for lv in hier.levels] == [128, 256, 512]
    assert all(len(lv) == 0 for lv in hier.levels)
    assert hier.counters.accesses == 0
    assert hier.counters.l1_misses == hier.counters.l2_misses == hier.counters.l3_misses == 0


def test_partitioned_l1_splits_capacity():
    hier = new_hierarchy(default_mem(policy=FillPolicy.partitioned(4)), threads=4, deterministic=True)
    assert hier.levels[0].partition_capacity == [32, 32, 32, 32]
    assert hier.levels[1].partitions == 1


def test_too_many_partitions_is_a_config_error():
    mem = MemConfig(levels=(CacheLevelConfig(capacity=3, fetch_latency_mean=60.0),), policy=FillPolicy.partitioned(5))
    with pytest.raises(ConfigError):
        new_hierarchy(mem, threads=5)


@pytest.mark.parametrize("capacity,partitions,expected", [(128, 4, [32] * 4), (10, 3, [4, 3, 3]), (5, 5, [1] * 5)])
def test_partition_capacities_floor_split(capacity, partitions, expected):
    assert partition_capacities(capacity, partitions) == expected
    assert sum(expected) == capacity


# ---------- fill and lookup ----------
def test_global_fifo_evicts_oldest():
    level = CacheLevel("L1", 3)
    for a in "ABC":
        assert level.fill(ord(a), owner=0) is None
    evicted = level.fill(ord("D"), owner=0)
    assert evicted.address == ord("A")
    assert level.addresses() == {ord("B"), ord("C"), ord("D")}


def test_partition_eviction_stays_in_owner_partition():
    level = CacheLevel("L1", 4, partitions=2)
    level.fill(100, owner=1)
    for a in (1, 2):
        level.fill(a, owner=0)
    evicted = level.fill(3, owner=0)
    assert evicted.address == 1
    assert level.queue(0) == [2, 3]
    assert level.queue(1) == [100]


def test_fill_of_resident_address_is_a_no_op():
    level = CacheLevel("L1", 3)
    level.fill(1, 0)
    level.fill(2, 0)
    assert level.fill(1, 0) is None
    assert level.queue() == [1, 2]


def test_lookup_ignores_partitions():
    hier = new_hierarchy(default_mem(policy=FillPolicy.partitioned(2)), threads=2, deterministic=True)
    assert not hier.lookup(1, 42)
    hier.fill(1, 42, owner=0)
    assert hier.lookup(1, 42)
    assert hier.l1_hit(42)


def test_evicted_address_is_no_longer_found():
    hier = new_hierarchy(
        MemConfig(levels=(CacheLevelConfig(capacity=2, fetch_latency_mean=1.0),)), deterministic=True
    )
    for a in (1, 2, 3):
        hier.fill(1, a, owner=0)
    assert not hier.lookup(1, 1)


@pytest.mark.parametrize("seed", range(10))
def test_global_fifo_matches_queue_oracle(seed):
    rng = np.random.default_rng(seed)
    for _ in range(100):
        capacity = int(rng.integers(1, 9))
        level = CacheLevel("L", capacity)
        oracle: deque[int] = deque()
        for address in rng.integers(0, 12, size=int(rng.integers(1, 60))).tolist():
            expected = None
            if address not in oracle:
                if len(oracle) == capacity:
                    expected = oracle.popleft()
                oracle.append(address)
            evicted = level.fill(address, owner=0)
            assert (evicted.address if evicted else None) == expected
            assert level.queue() == list(oracle)
        level.check()


@pytest.mark.parametrize("seed", range(10))
def test_partitioned_fifo_matches_per_owner_oracle(seed):
    rng = np.random.default_rng(1000 + seed)
    for _ in range(100):
        partitions = int(rng.integers(1, 4))
        capacity = int(rng.integers(partitions, 9))
        level = CacheLevel("L", capacity, partitions)
        shares = partition_capacities(capacity, partitions)
        oracle = [deque() for _ in range(partitions)]
        for _ in range(int(rng.integers(1, 60))):
            address, owner = int(rng.integers(0, 12)), int(rng.integers(0, partitions))
            resident = any(address in q for q in oracle)
            expected = None
            if not resident:
                q = oracle[owner]
                if len(q) == shares[owner]:
                    expected = q.popleft()
                q.append(address)
            evicted = level.fill(address, owner)
            assert (evicted.address if evicted else None) == expected
            assert [level.queue(p) for p in range(partitions)] == [list(q) for q in oracle]
        level.check()


def test_shared_victim_takes_oldest_partition_slot():
    level = CacheLevel("L1", 4, partitions=2)
    level.fill(1, owner=1)
    level.fill(2, owner=0)
    level.fill(3, owner=1)
    level.fill(4, owner=0)
    p = level.oldest_partition()
    assert p == 1
    evicted = level.fill(5, owner=0, partition=p)
    assert evicted.address == 1
    assert level.queue(1) == [3, 5]


# ---------- miss servicing ----------
def test_cold_miss_walks_to_ram():
    hier = new_hierarchy(default_mem(), deterministic=True)
    latency = hier.service_misses([[load(0, 7)]])
    c = hier.counters
    assert (c.accesses, c.l1_misses, c.l2_misses, c.l3_misses) == (1, 1, 1, 1)
    assert latency == 60.0
    assert all(7 in lv for lv in hier.levels)


def test_l2_hit_costs_the_l1_fill():
    hier = new_hierarchy(default_mem(), deterministic=True)
    hier.fill(2, 7, owner=0)
    latency = hier.service_misses([[load(0, 7)]])
    c = hier.counters
    assert (c.l1_misses, c.l2_misses, c.l3_misses) == (1, 0, 0)
    assert latency == 2.5
    assert 7 in hier.levels[0]


def test_l3_hit_costs_the_l2_fill():
    hier = new_hierarchy(default_mem(), deterministic=True)
    hier.fill(3, 7, owner=0)
    assert hier.service_misses([[load(0, 7)]]) == 10.0
    assert (hier.counters.l1_misses, hier.counters.l2_misses, hier.counters.l3_misses) == (1, 1, 0)


def test_l1_hit_only_counts_the_access():
    hier = new_hierarchy(default_mem(), deterministic=True)
    hier.fill(1, 7, owner=0)
    inst = load(0, 7)
    assert hier.service_misses([[inst]]) == 0.0
    assert hier.counters.accesses == 1
    assert hier.counters.l1_misses == 0
    # the same waiting instruction is not counted twice
    hier.service_misses([[inst]])
    hier.note_retired(inst)
    assert hier.counters.accesses == 1


def test_retired_without_probe_counts_as_hit():
    hier = new_hierarchy(default_mem(), deterministic=True)
    hier.note_retired(load(0, 7))
    assert hier.counters.accesses == 1
    assert hier.counters.l1_misses == 0


def test_mlp_width_limits_misses_per_activation():
    hier = new_hierarchy(default_mem(), deterministic=True)
    window = [load(0, 1), load(1, 2), load(2, 3)]
    assert hier.service_misses([window]) == 60.0
    assert hier.counters.l1_misses == 1
    wide = new_hierarchy(default_mem(mlp_width=2), deterministic=True)
    assert wide.service_misses([window]) == 120.0
    assert wide.counters.l1_misses == 2


def test_scan_rotates_over_threads():
    hier = new_hierarchy(default_mem(), threads=2, deterministic=True)
    windows = [[load(0, 1, thread=0)], [load(0, 2, thread=1)]]
    hier.service_misses(windows)
    assert hier.l1_hit(1) and not hier.l1_hit(2)
    hier.service_misses(windows)
    assert hier.l1_hit(2)
    assert hier.counters.thread_l1_misses == [1, 1]


def test_competitive_miss_after_cross_thread_eviction():
    mem = MemConfig(levels=(CacheLevelConfig(capacity=1, fetch_latency_mean=60.0),))
    hier = new_hierarchy(mem, threads=2, deterministic=True)
    hier.service_misses([[load(0, 1, thread=0)], []])
    hier.service_misses([[], [load(0, 2, thread=1)]])
    assert not hier.l1_hit(1)
    hier.service_misses([[load(1, 1, thread=0)], []])
    assert hier.counters.competitive_misses == 1
    # a thread evicting its own block is not competition
    hier.service_misses([[load(2, 3, thread=0)], []])
    hier.service_misses([[load(3, 1, thread=0)], []])
    assert hier.counters.competitive_misses == 1


def test_counters_stay_ordered_down_the_hierarchy():
    hier = new_hierarchy(default_mem(), rng=np.random.default_rng(0))
    rng = np.random.default_rng(1)
    for seq, address in enumerate(rng.integers(1, 900, size=3000).tolist()):
        hier.service_misses([[load(seq, address)]])
        c = hier.counters
        assert c.l3_misses <= c.l2_misses <= c.l1_misses <= c.accesses
    hier.check()


def test_jittered_latencies_stay_positive():
    hier = new_hierarchy(default_mem(), rng=np.random.default_rng(3))
    latencies = [hier.service_misses([[load(i, 10_000 + i)]]) for i in range(200)]
    assert all(lat >= 0 for lat in latencies)
    assert np.mean(latencies) == pytest.approx(60.0, abs=0.2)


# ---------- ideal ----------
def test_ideal_always_hits_without_fills():
    hier = new_hierarchy(default_mem(policy=FillPolicy.ideal()), deterministic=True)
    assert hier.lookup(1, 12345)
    assert hier.service_misses([[load(0, 7), load(1, 8)]]) == 0.0
    assert hier.counters.accesses == 2
    assert hier.counters.l1_misses == 0
    assert all(len(lv) == 0 for lv in hier.levels)


# ---------- prefetch ----------
def test_prefetch_disabled_issues_nothing():
    hier = new_hierarchy(default_mem(), deterministic=True)
    stream = InstructionStream([load(0, 5)])
    assert prefetch_step(hier, stream, PrefetchConfig(enabled=True, degree=0), owner=0) == 0
    assert prefetch_step(hier, stream, PrefetchConfig(enabled=False, degree=4), owner=0) == 0


def test_prefetch_deduplicates_addresses():
    hier = new_hierarchy(default_mem(), deterministic=True)
    stream = InstructionStream([load(0, 9), load(1, 9)])
    assert prefetch_step(hier, stream, PrefetchConfig(enabled=True, degree=2), owner=0) == 1
    assert hier.counters.prefetches_issued == 1
    assert hier.counters.l1_misses == 0


def test_prefetch_to_l2_fills_deeper_levels_only():
    hier = new_hierarchy(default_mem(), deterministic=True)
    stream = InstructionStream([load(0, 9), load(1, 10)])
    prefetch_step(hier, stream, PrefetchConfig(enabled=True, degree=4, target_level=2), owner=0)
    assert not hier.l1_hit(9)
    assert 9 in hier.levels[1] and 9 in hier.levels[2]
    assert hier.service_misses([[load(0, 9)]]) == 2.5


def test_prefetch_looks_ahead_from_the_cursor():
    hier = new_hierarchy(default_mem(), deterministic=True)
    stream = InstructionStream([load(0, 1), load(1, 2), load(2, 3)])
    stream.take(1)
    prefetch_step(hier, stream, PrefetchConfig(enabled=True, degree=1), owner=0)
    assert hier.l1_hit(2)
    assert not hier.l1_hit(1)
