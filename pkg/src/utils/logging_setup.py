"""
Logging setup - structured (JSON) or plain text output for the CLI.
Library modules only create loggers; configuration happens here, once.
"""

import logging
import sys
from typing import Optional

from pythonjsonlogger import jsonlogger

from src.utils.config import config

TEXT_FORMAT = "%(levelname)s: %(message)s"
JSON_FORMAT = "%(asctime)s %(name)s %(levelname)s %(message)s"


def setup_logging(level: Optional[str] = None, fmt: Optional[str] = None) -> logging.Logger:
    """
    Configure the root logger.

    Args:
        level: Log level name (defaults to config.LOG_LEVEL)
        fmt: 'json' for python-json-logger records, 'text' otherwise

    Returns:
        The configured root logger
    """
    level = (level or config.LOG_LEVEL).upper()
    fmt = (fmt or config.LOG_FORMAT).lower()

    handler = logging.StreamHandler(sys.stderr)
    if fmt == "json":
        handler.setFormatter(jsonlogger.JsonFormatter(JSON_FORMAT))
    else:
        handler.setFormatter(logging.Formatter(TEXT_FORMAT))

    root = logging.getLogger()
    for existing in list(root.handlers):
        root.removeHandler(existing)
    root.addHandler(handler)
    root.setLevel(level)
    return root
