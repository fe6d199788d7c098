"""
Lookahead prefetcher.

Address prediction is exact: the prefetcher reads the owning thread's own
future stream, so `degree` is the number of upcoming memory instructions
whose blocks are brought in ahead of use. Prefetch fills add no pipeline
latency and never touch the miss counters.
"""

from ..config.settings import PrefetchConfig
from ..workload.generator import InstructionStream
from .hierarchy import MemoryHierarchy


def prefetch_step(hier: MemoryHierarchy, stream: InstructionStream, cfg: PrefetchConfig, owner: int) -> int:
    """Prefetch the next `cfg.degree` memory instructions after the stream cursor; returns fills issued."""
    if not cfg.enabled or cfg.degree == 0:
        return 0
    issued = 0
    # decoded instructions already sit in the window, where the cache process
    # services their misses; lookahead covers the undecoded remainder only
    for inst in stream.upcoming_memory(cfg.degree):
        issued += hier.prefetch(inst.address, owner, cfg.target_level, partitioned=cfg.partitioned)
    return issued
