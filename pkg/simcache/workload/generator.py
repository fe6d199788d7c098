import bisect
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterator

import numpy as np

from ..config.settings import WorkloadConfig
from ..exception.custom_exception import DomainError


class RngPurpose(IntEnum):
    WORKLOAD = 0
    DECODE = 1
    EXECUTE = 2
    CACHE = 3


def make_rng(seed: int, purpose: RngPurpose, thread: int = 0) -> np.random.Generator:
    """Independent PCG64 stream per (purpose, thread); adding a thread never shifts another's draws."""
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(int(purpose), thread))
    return np.random.Generator(np.random.PCG64(sequence))


@dataclass(frozen=True, slots=True)
class Instruction:
    seq: int
    accesses_memory: bool
    address: int
    thread: int = 0


@dataclass(eq=False)
class InstructionStream:
    instructions: list[Instruction] = field(default_factory=list)
    cursor: int = 0

    def __post_init__(self):
        self._memory_positions = [i for i, inst in enumerate(self.instructions) if inst.accesses_memory]

    def __eq__(self, other):
        if not isinstance(other, InstructionStream):
            return NotImplemented
        return self.instructions == other.instructions

    def __len__(self):
        return len(self.instructions)

    def __iter__(self) -> Iterator[Instruction]:
        return iter(self.instructions)

    @property
    def remaining(self) -> int:
        return len(self.instructions) - self.cursor

    @property
    def exhausted(self) -> bool:
        return self.cursor >= len(self.instructions)

    @property
    def memory_count(self) -> int:
        return len(self._memory_positions)

    def take(self, n: int) -> list[Instruction]:
        taken = self.instructions[self.cursor:self.cursor + n]
        self.cursor += len(taken)
        return taken

    def upcoming_memory(self, k: int) -> list[Instruction]:
        """The next k memory-accessing instructions at or after the cursor."""
        if k <= 0:
            return []
        start = bisect.bisect_left(self._memory_positions, self.cursor)
        return [self.instructions[i] for i in self._memory_positions[start:start + k]]


def sample_addresses(rng: np.random.Generator, low: int, high: int, size: int) -> np.ndarray:
    if low > high:
        raise DomainError(f"address range is empty: low={low} > high={high}")
    if low == high:
        return np.full(size, low, dtype=np.int64)
    mode = (low + high) / 2.0
    draws = np.floor(rng.triangular(low, mode, high, size=size)).astype(np.int64)
    return np.clip(draws, low, high)


def sample_address(rng: np.random.Generator, low: int, high: int) -> int:
    """Floor of a symmetric triangular draw on [low, high], clamped into range."""
    return int(sample_addresses(rng, low, high, 1)[0])


def floored_triangular_pmf(low: int, high: int) -> np.ndarray:
    """Exact mass of floor(X) for X ~ Triangular(low, midpoint, high); index 0 is `low`.

    `high` itself only carries the (zero) mass of the exact endpoint.
    """
    if low > high:
        raise DomainError(f"address range is empty: low={low} > high={high}")
    if low == high:
        return np.ones(1)
    mode = (low + high) / 2.0
    span = high - low

    def cdf(x: float) -> float:
        if x <= low:
            return 0.0
        if x >= high:
            return 1.0
        if x <= mode:
            return (x - low) ** 2 / (span * (mode - low))
        return 1.0 - (high - x) ** 2 / (span * (high - mode))

    edges = np.arange(low, high + 1, dtype=float)
    mass = np.array([cdf(k + 1) - cdf(k) for k in edges[:-1]] + [0.0])
    return mass


def generate_stream(cfg: WorkloadConfig, thread: int, seed: int, count: int | None = None) -> InstructionStream:
    """Synthetic instruction stream of one thread; a pure function of (cfg, thread, seed)."""
    n = cfg.count if count is None else count
    rng = make_rng(seed, RngPurpose.WORKLOAD, thread)
    is_memory = rng.random(n) < cfg.mem_fraction
    addresses = np.zeros(n, dtype=np.int64)
    n_memory = int(is_memory.sum())
    if n_memory:
        offset = thread * cfg.per_thread_offset
        addresses[is_memory] = sample_addresses(rng, cfg.addr_low, cfg.addr_high, n_memory) + offset

    instructions = [
        Instruction(seq=cfg.seq_base + i, accesses_memory=bool(mem), address=int(addr), thread=thread)
        for i, (mem, addr) in enumerate(zip(is_memory.tolist(), addresses.tolist()))
    ]
    return InstructionStream(instructions)


def generate_workload(cfg: WorkloadConfig, threads: int, seed: int) -> list[InstructionStream]:
    return [generate_stream(cfg, t, seed, cfg.count_for_thread(t, threads)) for t in range(threads)]
