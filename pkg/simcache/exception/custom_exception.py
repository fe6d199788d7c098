import sys
import traceback
from typing import Any, Optional, cast


class SimCacheException(Exception):
    def __init__(self, error_message, error_details: Optional[object] = None):
        norm_msg = str(error_message)

        # Resolve exc_info (supports: sys module, Exception object, or current context)
        exc_type = exc_value = exc_tb = None
        if error_details is None:
            exc_type, exc_value, exc_tb = sys.exc_info()
        elif hasattr(error_details, "exc_info"):  # e.g., sys
            exc_info_obj = cast(sys, error_details)
            exc_type, exc_value, exc_tb = exc_info_obj.exc_info()
        elif isinstance(error_details, BaseException):
            exc_type, exc_value, exc_tb = type(error_details), error_details, error_details.__traceback__
        else:
            exc_type, exc_value, exc_tb = sys.exc_info()

        # Walk to the last frame to report the most relevant location
        last_tb = exc_tb
        while last_tb and last_tb.tb_next:
            last_tb = last_tb.tb_next

        self.file_name = last_tb.tb_frame.f_code.co_filename if last_tb else "<unknown>"
        self.lineno = last_tb.tb_lineno if last_tb else -1
        self.error_message = norm_msg

        if exc_type and exc_tb:
            self.traceback_str = "".join(traceback.format_exception(exc_type, exc_value, exc_tb))
        else:
            self.traceback_str = ""

        super().__init__(self.__str__())

    def __str__(self):
        if self.lineno < 0:
            return self.error_message
        base = f"Error in [{self.file_name}] at line [{self.lineno}] | Message: {self.error_message}"
        if self.traceback_str:
            return f"{base}\nTraceback:\n{self.traceback_str}"
        return base

    def __repr__(self):
        return f"{type(self).__name__}(file={self.file_name!r}, line={self.lineno}, message={self.error_message!r})"


class DomainError(SimCacheException, ValueError):
    """An argument outside the domain of a simulation primitive."""


class ConfigError(SimCacheException):
    """Invalid configuration; names the offending key and, for files, its line."""

    def __init__(self, error_message, key: Optional[str] = None, line: Optional[int] = None,
                 error_details: Optional[object] = None):
        self.key = key
        self.line = line
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        if where:
            error_message = f"{', '.join(where)}: {error_message}"
        super().__init__(error_message, error_details)


class TraceFormatError(SimCacheException):
    def __init__(self, error_message, line: int, error_details: Optional[object] = None):
        self.line = line
        super().__init__(f"line {line}: {error_message}", error_details)


class IncompleteRunError(SimCacheException):
    """The event queue ran dry before the stop condition held."""

    def __init__(self, error_message, sim_time: float, partial: Optional[dict[str, Any]] = None):
        self.sim_time = sim_time
        self.partial = dict(partial or {})
        super().__init__(f"{error_message} (clock={sim_time})")


class SimulationStateError(SimCacheException):
    """An operation was requested in a state that does not allow it."""


class OutputError(SimCacheException):
    """A result sink could not be opened or written."""

    def __init__(self, error_message, path: Optional[str] = None, error_details: Optional[object] = None):
        self.path = path
        super().__init__(error_message if path is None else f"{path}: {error_message}", error_details)
