"""
Structured run logging for the MipSim logger tree.
"""

import json
import logging
import os
from collections import Counter, deque
from datetime import datetime, timezone
from functools import partialmethod
from logging.handlers import RotatingFileHandler
from typing import Any, Dict, List, Optional

ROOT_LOGGER_NAME = "MipSim"

DETAILED_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s"
CONSOLE_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"

# file name, max bytes, backups, level
LOG_FILES = [
    ("mipsim.log", 10 * 1024 * 1024, 5, logging.DEBUG),
    ("mipsim_errors.log", 5 * 1024 * 1024, 3, logging.ERROR),
]


class SimLogger:
    """Structured logging for simulation runs.

    Messages carry an optional metadata mapping appended as JSON; recent
    entries are kept in a bounded in-memory ring for end-of-run summaries.
    """

    def __init__(self, name: str = ROOT_LOGGER_NAME, max_memory_logs: int = 1000):
        self.name = name
        self.logs: deque = deque(maxlen=max_memory_logs)
        self.logger = logging.getLogger(name)

    def log(self, level: str, message: str, metadata: Optional[Dict[str, Any]] = None):
        level = level.upper()
        self.logs.append({
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": level,
            "message": message,
            "metadata": metadata or {},
            "component": self.name,
        })
        if metadata:
            message = f"{message} | {json.dumps(metadata, default=str, sort_keys=True)}"
        self.logger.log(getattr(logging, level, logging.INFO), message)

    debug = partialmethod(log, "DEBUG")
    info = partialmethod(log, "INFO")
    warning = partialmethod(log, "WARNING")
    error = partialmethod(log, "ERROR")

    def log_activity(self, activity_type: str, details: Dict[str, Any]):
        """Run milestone (scenario start, trial batch) with structured details"""
        self.info(f"Activity: {activity_type}", {"activity_type": activity_type, **details})

    def log_performance(self, operation: str, duration: float, metadata: Optional[Dict[str, Any]] = None):
        """Wall-clock timing of an operation"""
        timing = {"operation": operation, "duration_seconds": round(duration, 6), **(metadata or {})}
        self.info(f"Performance: {operation} completed in {duration:.3f}s", timing)

    def log_error_with_context(self, error: Exception, context: Dict[str, Any]):
        self.error(
            f"Error occurred: {error}",
            {"error_type": type(error).__name__, "error_message": str(error), "context": context},
        )

    def get_recent_logs(self, limit: int = 50, level: Optional[str] = None) -> List[Dict[str, Any]]:
        entries = [e for e in self.logs if level is None or e["level"] == level.upper()]
        return entries[-limit:] if limit else entries

    def get_log_summary(self) -> Dict[str, Any]:
        if not self.logs:
            return {"total_logs": 0}
        return {
            "total_logs": len(self.logs),
            "by_level": dict(Counter(e["level"] for e in self.logs)),
            "oldest_log": self.logs[0]["timestamp"],
            "newest_log": self.logs[-1]["timestamp"],
        }


def setup_logging(level: str = "INFO", log_dir: Optional[str] = None) -> logging.Logger:
    """Attach console (and optional rotating file) handlers to the MipSim tree"""
    root = logging.getLogger(ROOT_LOGGER_NAME)
    root.setLevel(getattr(logging, level.upper(), logging.INFO))

    # Prevent duplicate handlers
    if root.handlers:
        return root

    console = logging.StreamHandler()
    console.setFormatter(logging.Formatter(CONSOLE_FORMAT))
    root.addHandler(console)

    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
        for file_name, max_bytes, backups, file_level in LOG_FILES:
            handler = RotatingFileHandler(os.path.join(log_dir, file_name), maxBytes=max_bytes, backupCount=backups)
            handler.setLevel(file_level)
            handler.setFormatter(logging.Formatter(DETAILED_FORMAT))
            root.addHandler(handler)

    return root
