from .event_engine import EventEngine, ScheduledEvent

__all__ = ["EventEngine", "ScheduledEvent"]
