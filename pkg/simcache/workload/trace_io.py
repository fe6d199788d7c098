"""
Instruction trace files.

Format: ASCII text, header `seq,mem,addr,thread`, then one `seq,mem,addr,thread`
line per instruction with `mem` in {0, 1}. Lines end with `\\n`.
"""

import io
from collections import defaultdict
from typing import IO, Iterable, Union

from ..exception.custom_exception import TraceFormatError
from .generator import Instruction, InstructionStream

TRACE_HEADER = "seq,mem,addr,thread"


def write_trace(stream: Union[InstructionStream, Iterable[InstructionStream]], sink: IO) -> None:
    streams = [stream] if isinstance(stream, InstructionStream) else list(stream)
    lines = [TRACE_HEADER]
    for s in streams:
        lines.extend(
            f"{inst.seq},{1 if inst.accesses_memory else 0},{inst.address},{inst.thread}" for inst in s
        )
    text = "\n".join(lines) + "\n"
    if isinstance(sink, io.TextIOBase) or "b" not in getattr(sink, "mode", "b"):
        sink.write(text)
    else:
        sink.write(text.encode("ascii"))


def _parse_int(field: str, name: str, line: int) -> int:
    try:
        return int(field)
    except ValueError as e:
        raise TraceFormatError(f"{name} is not an integer: {field!r}", line, e) from e


def _parse_line(text: str, line: int) -> Instruction:
    fields = text.split(",")
    if len(fields) != 4:
        raise TraceFormatError(f"expected 4 fields, got {len(fields)}", line)
    seq = _parse_int(fields[0], "seq", line)
    mem = _parse_int(fields[1], "mem", line)
    address = _parse_int(fields[2], "addr", line)
    thread = _parse_int(fields[3], "thread", line)
    if mem not in (0, 1):
        raise TraceFormatError(f"mem must be 0 or 1, got {mem}", line)
    if address < 0 or thread < 0 or seq < 0:
        raise TraceFormatError("seq, addr and thread must be non-negative", line)
    if mem == 0 and address != 0:
        raise TraceFormatError(f"non-memory instruction carries address {address}", line)
    if mem == 1 and address == 0:
        raise TraceFormatError("memory instruction uses the reserved address 0", line)
    return Instruction(seq=seq, accesses_memory=bool(mem), address=address, thread=thread)


def read_trace(source: Union[str, bytes, IO]) -> InstructionStream:
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        try:
            source = source.decode("ascii")
        except UnicodeDecodeError as e:
            raise TraceFormatError("trace is not ASCII", 0, e) from e

    lines = source.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].strip() != TRACE_HEADER:
        raise TraceFormatError(f"missing header {TRACE_HEADER!r}", 1)

    instructions = []
    last_seq: dict[int, int] = {}
    for lineno, text in enumerate(lines[1:], start=2):
        inst = _parse_line(text.strip(), lineno)
        previous = last_seq.get(inst.thread)
        if previous is not None and inst.seq <= previous:
            raise TraceFormatError(f"seq {inst.seq} does not increase within thread {inst.thread}", lineno)
        last_seq[inst.thread] = inst.seq
        instructions.append(inst)
    return InstructionStream(instructions)


def split_by_thread(stream: InstructionStream, threads: int) -> list[InstructionStream]:
    """One stream per thread id in [0, threads); instructions of other threads are an error."""
    buckets: dict[int, list[Instruction]] = defaultdict(list)
    for inst in stream:
        if inst.thread >= threads:
            raise TraceFormatError(f"trace names thread {inst.thread} but only {threads} are configured", 0)
        buckets[inst.thread].append(inst)
    return [InstructionStream(buckets[t]) for t in range(threads)]
