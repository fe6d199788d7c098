"""
Process-based discrete-event engine.

Processes are plain callables; a process "holds" by scheduling its own next
activation after a delay. Events fire in (fire_time, insertion serial) order.
"""

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from ..exception.custom_exception import DomainError, IncompleteRunError

Activation = Callable[[], None]


@dataclass(frozen=True, order=True)
class ScheduledEvent:
    fire_time: float
    serial: int
    activation: Activation = field(compare=False)


class EventEngine:
    def __init__(self):
        self._queue: list[ScheduledEvent] = []
        self._serial = itertools.count()
        self._clock = 0.0
        self._finished = False
        self.executed = 0

    @property
    def pending(self) -> int:
        return len(self._queue)

    @property
    def finished(self) -> bool:
        return self._finished

    def now(self) -> float:
        return self._clock

    def schedule(self, activation: Activation, delay: float) -> ScheduledEvent:
        if self._finished:
            raise DomainError("cannot schedule on a finished engine")
        if not math.isfinite(delay) or delay < 0:
            raise DomainError(f"delay must be a finite non-negative duration, got {delay!r}")
        event = ScheduledEvent(self._clock + delay, next(self._serial), activation)
        heapq.heappush(self._queue, event)
        return event

    def _partial(self, snapshot: Optional[Callable[[], dict[str, Any]]]) -> dict[str, Any]:
        partial: dict[str, Any] = {"executed": self.executed}
        if snapshot is not None:
            partial.update(snapshot())
        return partial

    def run(
        self,
        stop: Callable[["EventEngine"], bool],
        max_events: Optional[int] = None,
        snapshot: Optional[Callable[[], dict[str, Any]]] = None,
    ) -> float:
        """Fire events until `stop(engine)` holds; returns the final clock.

        `snapshot` supplies model state attached to an IncompleteRunError.
        """
        if not self._queue:
            raise IncompleteRunError("no events scheduled", self._clock, self._partial(snapshot))

        while self._queue:
            event = heapq.heappop(self._queue)
            self._clock = event.fire_time
            event.activation()
            self.executed += 1
            if stop(self):
                self._finished = True
                return self._clock
            if max_events is not None and self.executed >= max_events:
                raise IncompleteRunError(
                    f"event budget of {max_events} exhausted", self._clock, self._partial(snapshot)
                )

        raise IncompleteRunError(
            "event queue exhausted before the stop condition held",
            self._clock,
            self._partial(snapshot),
        )
