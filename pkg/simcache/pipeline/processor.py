"""
Per-thread processor front end: decode into a bounded instruction window,
execute/retire into the reorder buffer.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from ..config.settings import PipelineConfig
from ..workload.generator import Instruction, InstructionStream


@dataclass
class PipelineState:
    thread: int = 0
    window: list[Instruction] = field(default_factory=list)
    rob_count: int = 0
    max_window_occupancy: int = 0


def decode_step(state: PipelineState, stream: InstructionStream, cfg: PipelineConfig) -> int:
    """Move up to decode_width instructions from the stream head into the window."""
    n = cfg.decode_width
    if cfg.window_capacity > 0:
        n = min(n, cfg.window_capacity - len(state.window))
    if n <= 0:
        return 0
    moved = stream.take(n)
    state.window.extend(moved)
    occupancy = len(state.window)
    if occupancy > state.max_window_occupancy:
        state.max_window_occupancy = occupancy
    assert cfg.window_capacity == 0 or occupancy <= cfg.window_capacity
    return len(moved)


def execute_step(
    state: PipelineState,
    l1_lookup: Callable[[int], bool],
    cfg: PipelineConfig,
    on_retire: Optional[Callable[[Instruction], None]] = None,
) -> int:
    """Retire non-memory instructions, then memory instructions whose block is in L1.

    Both passes draw from one width budget when `strict_width` is set; memory
    instructions that miss stay in the window.
    """
    budget = cfg.execute_width if cfg.strict_width else len(state.window)
    retired: list[Instruction] = []
    waiting: list[Instruction] = []
    for inst in state.window:
        if not inst.accesses_memory and len(retired) < budget:
            retired.append(inst)
        else:
            waiting.append(inst)

    remaining: list[Instruction] = []
    for inst in waiting:
        if inst.accesses_memory and len(retired) < budget and l1_lookup(inst.address):
            retired.append(inst)
            if on_retire is not None:
                on_retire(inst)
        else:
            remaining.append(inst)

    state.window = remaining
    state.rob_count += len(retired)
    return len(retired)


def check_done(states: Union[PipelineState, Sequence[PipelineState]], workload_total: int) -> bool:
    if isinstance(states, PipelineState):
        states = [states]
    return sum(s.rob_count for s in states) == workload_total
