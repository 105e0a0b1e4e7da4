"""Logging setup

Report records go to stdout, so every handler configured here writes to
stderr or to a file.
"""
import logging
import logging.handlers
import sys
from pathlib import Path
from typing import Any, Dict

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logging(config: Dict[str, Any]) -> None:
    """Configure the root logger from the `logging` config section

    Args:
        config: Full configuration dictionary
    """
    log_config = config.get("logging", {})
    level = getattr(logging, str(log_config.get("level", "WARNING")).upper(), logging.WARNING)

    handlers: list = [logging.StreamHandler(sys.stderr)]

    log_file = log_config.get("file")
    if log_file:
        path = Path(log_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(
            logging.handlers.RotatingFileHandler(
                path,
                maxBytes=int(log_config.get("max_size_mb", 10)) * 1024 * 1024,
                backupCount=int(log_config.get("backup_count", 3)),
            )
        )

    logging.basicConfig(level=level, format=LOG_FORMAT, handlers=handlers, force=True)


__all__ = ["setup_logging", "LOG_FORMAT"]
