import json
import logging
import os
import sys
from datetime import datetime, timezone


class JsonFormatter(logging.Formatter):
    """Serialize log records into structured JSON entries."""

    _EXTRA_FIELDS = (
        "ring",
        "ideal",
        "n",
        "truncation",
        "colength",
        "basis_size",
        "latency",
        "status",
        "error_code",
    )

    def format(self, record: logging.LogRecord) -> str:
        payload = {
            "timestamp": datetime.fromtimestamp(record.created, tz=timezone.utc).isoformat(),
            "message": record.getMessage(),
            "level": record.levelname,
            "logger": record.name,
        }

        for field in self._EXTRA_FIELDS:
            value = getattr(record, field, None)
            if value is not None:
                payload[field] = value

        if record.exc_info:
            payload["exc_info"] = self.formatException(record.exc_info)
        if record.stack_info:
            payload["stack_info"] = self.formatStack(record.stack_info)

        return json.dumps(payload, ensure_ascii=False, default=str)


def _determine_level(log_level: int) -> int:
    if log_level == 0:
        return logging.CRITICAL
    if log_level == 1:
        return logging.INFO
    return logging.DEBUG


def setup_logging() -> None:
    """Configure the root logger from LOG_FILE and LOG_LEVEL.

    Without LOG_FILE the JSON lines go to standard error, so reports written
    to standard output stay machine-readable.
    """
    log_file = os.environ.get("LOG_FILE")
    try:
        log_level = int(os.environ.get("LOG_LEVEL", "0"))
    except ValueError:
        raise SystemExit(f"Invalid LOG_LEVEL: {os.environ.get('LOG_LEVEL')!r}")

    level = _determine_level(log_level)

    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    handler: logging.Handler
    if log_file:
        parent = os.path.dirname(os.path.abspath(log_file)) or "."
        if not os.path.isdir(parent):
            raise SystemExit(f"Invalid log file directory: {parent}")
        try:
            handler = logging.FileHandler(log_file, encoding="utf-8")
        except OSError:
            raise SystemExit(f"Unable to open log file: {log_file}")
    else:
        handler = logging.StreamHandler(sys.stderr)

    handler.setLevel(level)
    handler.setFormatter(JsonFormatter())
    root_logger.addHandler(handler)
