# utils/logging_helper.py

import logging
import os
import sys
from typing import Iterable, Optional

from utils.config import LOG_DIR, LOG_LEVEL

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"


def get_module_logger(name: Optional[str] = None) -> logging.Logger:
    """
    Return a logger which writes to LOG_DIR/<module_name>.log at LOG_LEVEL.
    If `name` is None, uses the calling module's __name__.
    """
    module_name = name or logging.root.findCaller()[0].rsplit(os.sep, 1)[-1].rsplit(".", 1)[0]

    logger = logging.getLogger(module_name)
    logger.setLevel(LOG_LEVEL)

    # Ensure the log directory exists
    os.makedirs(LOG_DIR, exist_ok=True)

    log_file = os.path.join(LOG_DIR, f"{module_name}.log")

    # Check whether a FileHandler for this exact file already exists
    handler_exists = any(
        isinstance(h, logging.FileHandler) and h.baseFilename == os.path.abspath(log_file)
        for h in logger.handlers
    )
    if not handler_exists:
        fh = logging.FileHandler(log_file, encoding="utf-8")
        fh.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(fh)

    return logger


def attach_console(logger_names: Iterable[str], level: int = logging.WARNING) -> None:
    """Mirror the named loggers onto stderr, the CLI's diagnostic stream."""
    for logger_name in logger_names:
        logger = logging.getLogger(logger_name)
        already = any(getattr(h, "_hss_console", False) for h in logger.handlers)
        if already:
            continue
        sh = logging.StreamHandler(sys.stderr)
        sh.setLevel(level)
        sh.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
        sh._hss_console = True
        logger.addHandler(sh)
