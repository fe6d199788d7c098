from .cache_level import CacheEntry, CacheLevel, partition_capacities
from .hierarchy import MemoryHierarchy, MissCounters, new_hierarchy
from .prefetcher import prefetch_step

__all__ = [
    "CacheEntry",
    "CacheLevel",
    "partition_capacities",
    "MemoryHierarchy",
    "MissCounters",
    "new_hierarchy",
    "prefetch_step",
]
