import math

import pytest

from simcache.engine.event_engine import EventEngine
from simcache.exception.custom_exception import DomainError, IncompleteRunError


def test_events_fire_in_time_then_insertion_order():
    engine = EventEngine()
    fired = []
    engine.schedule(lambda: fired.append(("b", engine.now())), 2.0)
    engine.schedule(lambda: fired.append(("a", engine.now())), 1.0)
    engine.schedule(lambda: fired.append(("c", engine.now())), 2.0)
    engine.run(lambda e: e.pending == 0)
    assert fired == [("a", 1.0), ("b", 2.0), ("c", 2.0)]


def test_two_processes_interleave_by_hold():
    engine = EventEngine()
    fired = []

    def process(name, hold):
        def activate():
            fired.append((name, engine.now()))
            engine.schedule(activate, hold)

        return activate

    engine.schedule(process("A", 1.0), 0.0)
    engine.schedule(process("B", 1.5), 0.0)
    engine.run(lambda e: e.now() >= 3.0)
    assert fired == [("A", 0.0), ("B", 0.0), ("A", 1.0), ("B", 1.5), ("A", 2.0), ("B", 3.0)]


def test_clock_is_monotone_and_stop_checked_after_each_event():
    engine = EventEngine()
    times = []

    def tick():
        times.append(engine.now())
        engine.schedule(tick, 0.25)

    engine.schedule(tick, 0.0)
    final = engine.run(lambda e: e.executed == 10)
    assert engine.executed == 10
    assert final == engine.now() == pytest.approx(2.25)
    assert times == sorted(times)
    assert engine.finished


def test_zero_delay_fires_at_current_clock():
    engine = EventEngine()
    seen = []

    def first():
        engine.schedule(lambda: seen.append(engine.now()), 0.0)

    engine.schedule(first, 5.0)
    engine.run(lambda e: bool(seen))
    assert seen == [5.0]


@pytest.mark.parametrize("delay", [-1.0, math.inf, math.nan])
def test_invalid_delay_is_a_domain_error(delay):
    engine = EventEngine()
    with pytest.raises(DomainError):
        engine.schedule(lambda: None, delay)


def test_domain_error_is_a_value_error():
    with pytest.raises(ValueError):
        EventEngine().schedule(lambda: None, -0.5)


def test_schedule_after_finish_is_rejected():
    engine = EventEngine()
    engine.schedule(lambda: None, 1.0)
    engine.run(lambda e: True)
    with pytest.raises(DomainError):
        engine.schedule(lambda: None, 1.0)


def test_empty_queue_at_start_is_incomplete():
    engine = EventEngine()
    with pytest.raises(IncompleteRunError) as info:
        engine.run(lambda e: False)
    assert info.value.sim_time == 0.0


def test_queue_running_dry_reports_clock():
    engine = EventEngine()
    engine.schedule(lambda: None, 3.0)
    with pytest.raises(IncompleteRunError) as info:
        engine.run(lambda e: False)
    assert info.value.sim_time == 3.0
    assert info.value.partial["executed"] == 1


def test_event_budget_guard():
    engine = EventEngine()

    def spin():
        engine.schedule(spin, 1.0)

    engine.schedule(spin, 0.0)
    with pytest.raises(IncompleteRunError):
        engine.run(lambda e: False, max_events=50)
    assert engine.executed == 50


def test_single_event_returns_its_time():
    engine = EventEngine()
    engine.schedule(lambda: None, 4.0)
    assert engine.run(lambda e: e.pending == 0) == 4.0


def test_incomplete_run_carries_model_snapshot():
    engine = EventEngine()
    engine.schedule(lambda: None, 1.0)
    with pytest.raises(IncompleteRunError) as info:
        engine.run(lambda e: False, snapshot=lambda: {"retired": 7})
    assert info.value.partial == {"executed": 1, "retired": 7}
