import os
import sys
import logging
from datetime import datetime
import structlog


class CustomLogger:
    def __init__(self, log_dir: str | None = None):
        # SIMCACHE_LOG_DIR="" turns the file sink off; stdout is reserved for results
        if log_dir is None:
            log_dir = os.getenv("SIMCACHE_LOG_DIR", "logs")
        self.log_file_path = None
        if log_dir:
            self.logs_dir = os.path.join(os.getcwd(), log_dir)
            os.makedirs(self.logs_dir, exist_ok=True)
            log_file = f"{datetime.now().strftime('%m_%d_%Y_%H_%M_%S')}.log"
            self.log_file_path = os.path.join(self.logs_dir, log_file)
        self.level = getattr(logging, os.getenv("SIMCACHE_LOG_LEVEL", "INFO").upper(), logging.INFO)

    def get_logger(self, name=__file__):
        logger_name = os.path.basename(name)

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(self.level)
        console_handler.setFormatter(logging.Formatter("%(message)s"))
        handlers: list[logging.Handler] = [console_handler]

        if self.log_file_path:
            file_handler = logging.FileHandler(self.log_file_path)
            file_handler.setLevel(self.level)
            file_handler.setFormatter(logging.Formatter("%(message)s"))  # Raw JSON lines
            handlers.append(file_handler)

        logging.basicConfig(
            level=self.level,
            format="%(message)s",  # Structlog will handle JSON rendering
            handlers=handlers,
        )

        structlog.configure(
            processors=[
                structlog.processors.TimeStamper(fmt="iso", utc=True, key="timestamp"),
                structlog.processors.add_log_level,
                structlog.processors.EventRenamer(to="event"),
                structlog.processors.JSONRenderer(),
            ],
            logger_factory=structlog.stdlib.LoggerFactory(),
            cache_logger_on_first_use=True,
        )

        return structlog.get_logger(logger_name)
