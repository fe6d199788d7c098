"""
One fully associative cache level with FIFO replacement.

A level is split into FIFO partitions. GlobalFifo is the single-partition
case; PartitionedFifo gives every thread its own partition for replacement
while lookups still see the whole level.
"""

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Optional

from ..exception.custom_exception import ConfigError


@dataclass(frozen=True, slots=True)
class CacheEntry:
    address: int
    owner: int
    serial: int
    partition: int = 0


def partition_capacities(capacity: int, partitions: int) -> list[int]:
    """Floor split of `capacity`; the remainder goes to the lowest-indexed partitions."""
    if partitions < 1:
        raise ConfigError(f"need at least one partition, got {partitions}", key="partitions")
    if partitions > capacity:
        raise ConfigError(f"{partitions} partitions exceed a capacity of {capacity} blocks", key="partitions")
    share, extra = divmod(capacity, partitions)
    return [share + (1 if p < extra else 0) for p in range(partitions)]


class CacheLevel:
    def __init__(self, name: str, capacity: int, partitions: int = 1):
        if capacity < 1:
            raise ConfigError(f"{name} capacity must be at least 1, got {capacity}", key="capacities")
        self.name = name
        self.capacity = capacity
        self.partition_capacity = partition_capacities(capacity, partitions)
        self._queues: list[deque[int]] = [deque() for _ in range(partitions)]
        self._resident: dict[int, CacheEntry] = {}
        self._serial = itertools.count()

    def __len__(self):
        return len(self._resident)

    def __contains__(self, address: int) -> bool:
        return address in self._resident

    @property
    def partitions(self) -> int:
        return len(self._queues)

    def entry(self, address: int) -> Optional[CacheEntry]:
        return self._resident.get(address)

    def partition_of(self, owner: int) -> int:
        return owner % len(self._queues)

    def queue(self, partition: int = 0) -> list[int]:
        """Resident addresses of one partition, oldest first."""
        return list(self._queues[partition])

    def addresses(self) -> set[int]:
        return set(self._resident)

    def fill(self, address: int, owner: int, partition: Optional[int] = None) -> Optional[CacheEntry]:
        """Insert `address` for `owner`; returns the evicted entry, if any.

        A resident address is left untouched and nothing is evicted.
        """
        if address in self._resident:
            return None
        p = self.partition_of(owner) if partition is None else partition
        queue = self._queues[p]
        evicted = None
        if len(queue) >= self.partition_capacity[p]:
            evicted = self._resident.pop(queue.popleft())
        queue.append(address)
        self._resident[address] = CacheEntry(address, owner, next(self._serial), p)
        assert len(queue) <= self.partition_capacity[p]
        return evicted

    def oldest_partition(self) -> int:
        """Partition whose head is the oldest block of the whole level (empty partitions first)."""
        best, best_serial = 0, None
        for p, queue in enumerate(self._queues):
            if len(queue) < self.partition_capacity[p]:
                return p
            serial = self._resident[queue[0]].serial
            if best_serial is None or serial < best_serial:
                best, best_serial = p, serial
        return best

    def check(self) -> None:
        """Residency index and queues hold the same address set, within capacity."""
        queued = [a for q in self._queues for a in q]
        assert len(queued) == len(set(queued)) == len(self._resident)
        assert set(queued) == set(self._resident)
        assert len(queued) <= self.capacity
        for p, q in enumerate(self._queues):
            assert len(q) <= self.partition_capacity[p]
