from .generator import (
    Instruction,
    InstructionStream,
    RngPurpose,
    generate_stream,
    generate_workload,
    make_rng,
    sample_address,
)
from .trace_io import read_trace, split_by_thread, write_trace

__all__ = [
    "Instruction",
    "InstructionStream",
    "RngPurpose",
    "generate_stream",
    "generate_workload",
    "make_rng",
    "sample_address",
    "read_trace",
    "split_by_thread",
    "write_trace",
]
