import logging
import os
from logging.handlers import RotatingFileHandler
from pathlib import Path

try:
    from pythonjsonlogger.json import JsonFormatter
except ImportError:  # python-json-logger < 3
    from pythonjsonlogger.jsonlogger import JsonFormatter

from wl1.monitoring.tracing import current_run_id

logger = logging.getLogger(__name__)

TEXT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
JSON_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s %(filename)s %(lineno)d"

_HANDLER_TAG = "_wl1_handler"


class RunContextFilter(logging.Filter):
    """Stamp records with the active run id"""

    def filter(self, record):
        if not hasattr(record, "run_id"):
            record.run_id = current_run_id() or "no-run"
        return True


def _tagged(handler):
    setattr(handler, _HANDLER_TAG, True)
    return handler


def setup_logging(level=None, log_dir=None, json_file=None):
    """Configure console and JSON-file logging for the process"""
    level_name = (level or os.getenv("LOG_LEVEL", "INFO")).upper()
    log_level = getattr(logging, level_name, logging.INFO)
    if json_file is None:
        json_file = os.getenv("LOG_JSON", "true").strip().lower() in ("1", "true", "yes")

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)

    # Drop handlers from an earlier call so repeated setup does not duplicate lines
    for handler in list(root_logger.handlers):
        if getattr(handler, _HANDLER_TAG, False):
            root_logger.removeHandler(handler)
            handler.close()

    context_filter = RunContextFilter()

    console_handler = _tagged(logging.StreamHandler())
    console_handler.setLevel(log_level)
    console_handler.setFormatter(logging.Formatter(TEXT_FORMAT))
    console_handler.addFilter(context_filter)
    root_logger.addHandler(console_handler)

    log_path = None
    if json_file:
        directory = Path(log_dir or os.getenv("LOG_DIR", "./logs"))
        try:
            directory.mkdir(parents=True, exist_ok=True)
            log_path = directory / "wl1.json"
            json_handler = _tagged(RotatingFileHandler(
                log_path, maxBytes=20 * 1024 * 1024, backupCount=5))  # 20MB
            json_handler.setLevel(log_level)
            json_handler.setFormatter(JsonFormatter(JSON_FORMAT))
            json_handler.addFilter(context_filter)
            root_logger.addHandler(json_handler)
        except OSError as e:
            log_path = None
            logger.warning(f"JSON log file disabled, cannot write to {directory}: {e}")

    # Solver backends are chatty at INFO
    logging.getLogger("cvxpy").setLevel(logging.WARNING)
    logging.getLogger("werkzeug").setLevel(logging.WARNING)

    logger.debug(
        "Logging configured",
        extra={"event": "logging_configured", "level": level_name,
               "json_log": str(log_path) if log_path else None},
    )
    return root_logger
