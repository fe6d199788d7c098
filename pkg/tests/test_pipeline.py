import pytest

from simcache.config.settings import PipelineConfig
from simcache.pipeline.processor import PipelineState, check_done, decode_step, execute_step
from simcache.workload.generator import Instruction, InstructionStream


def plain(seq):
    return Instruction(seq=seq, accesses_memory=False, address=0)


def load(seq, address):
    return Instruction(seq=seq, accesses_memory=True, address=address)


def never(_address):
    return False


def always(_address):
    return True


# ---------- decode ----------
def test_decode_from_empty_stream_moves_nothing():
    state = PipelineState()
    assert decode_step(state, InstructionStream([]), PipelineConfig()) == 0
    assert state.window == []


def test_decode_moves_decode_width():
    state = PipelineState()
    stream = InstructionStream([plain(i) for i in range(10)])
    assert decode_step(state, stream, PipelineConfig()) == 4
    assert [i.seq for i in state.window] == [0, 1, 2, 3]
    assert stream.remaining == 6


def test_decode_stops_at_window_capacity():
    state = PipelineState(window=[plain(i) for i in range(32)])
    stream = InstructionStream([plain(100)])
    assert decode_step(state, stream, PipelineConfig()) == 0
    assert stream.remaining == 1


def test_decode_fills_only_the_free_slots():
    state = PipelineState(window=[plain(i) for i in range(30)])
    stream = InstructionStream([plain(100 + i) for i in range(10)])
    assert decode_step(state, stream, PipelineConfig()) == 2
    assert len(state.window) == 32
    assert state.max_window_occupancy == 32


def test_unbounded_window():
    state = PipelineState(window=[plain(i) for i in range(100)])
    stream = InstructionStream([plain(1000 + i) for i in range(10)])
    assert decode_step(state, stream, PipelineConfig(window_capacity=0)) == 4
    assert len(state.window) == 104


# ---------- execute ----------
def test_non_memory_instructions_retire():
    state = PipelineState(window=[plain(i) for i in range(3)])
    assert execute_step(state, never, PipelineConfig()) == 3
    assert state.window == []
    assert state.rob_count == 3


def test_missing_memory_instruction_waits():
    state = PipelineState(window=[load(0, 42)])
    assert execute_step(state, never, PipelineConfig()) == 0
    assert state.window == [load(0, 42)]
    assert state.rob_count == 0


def test_width_budget_is_shared_between_passes():
    window = [load(100 + i, 7) for i in range(5)] + [plain(i) for i in range(6)]
    state = PipelineState(window=list(window))
    retired_memory = []
    assert execute_step(state, always, PipelineConfig(), on_retire=retired_memory.append) == 8
    # all six plain instructions first, then memory ones in window order
    assert [i.seq for i in retired_memory] == [100, 101]
    assert [i.seq for i in state.window] == [102, 103, 104]
    assert state.rob_count == 8


def test_relaxed_width_retires_everything_ready():
    window = [load(100 + i, 7) for i in range(5)] + [plain(i) for i in range(6)] + [load(200, 9)]
    state = PipelineState(window=window)
    retired = execute_step(state, lambda a: a == 7, PipelineConfig(strict_width=False))
    assert retired == 11
    assert state.window == [load(200, 9)]


def test_window_order_survives_partial_retirement():
    state = PipelineState(window=[load(0, 1), plain(1), load(2, 2), plain(3), load(4, 1)])
    assert execute_step(state, lambda a: a == 1, PipelineConfig()) == 4
    assert state.window == [load(2, 2)]


# ---------- done ----------
@pytest.mark.parametrize("rob,total,done", [(0, 20000, False), (20000, 20000, True), (19999, 20000, False)])
def test_check_done_is_strict_equality(rob, total, done):
    assert check_done(PipelineState(rob_count=rob), total) is done


def test_check_done_sums_threads():
    states = [PipelineState(thread=t, rob_count=5) for t in range(4)]
    assert check_done(states, 20)
    assert not check_done(states, 21)
