import logging
import sys
from typing import Optional

from quotatope.utils.config import get_settings


def get_logger(name: str, level: Optional[str] = None) -> logging.Logger:
    """
    Setup and configure a logger instance.

    Args:
        name: The name of the logger (typically __name__ from the calling module)
        level: Optional logging level (DEBUG, INFO, etc.). If None, the configured
            QUOTATOPE_LOG_LEVEL is used.

    Returns:
        logging.Logger: Configured logger instance
    """
    settings = get_settings()
    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, (level or settings.log_level).upper()))

    # Only add handlers if the logger doesn't already have them
    if not logger.handlers:
        formatter = logging.Formatter(
            fmt='[%(asctime)s] [%(levelname)s] [%(name)s] %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )

        # stderr: stdout may be carrying a dataset
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

        if settings.log_file:
            file_handler = logging.FileHandler(settings.log_file)
            file_handler.setLevel(logging.DEBUG)
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)

    logger.propagate = False

    return logger


def set_level(level: str) -> None:
    """Apply a level to every quotatope logger created so far."""
    for name, candidate in logging.root.manager.loggerDict.items():
        if name.startswith("quotatope") and isinstance(candidate, logging.Logger):
            candidate.setLevel(getattr(logging, level.upper()))
