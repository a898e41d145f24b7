import logging
import sys
from logging.handlers import RotatingFileHandler
from typing import Optional
from pathlib import Path

from core.config import settings


def setup_logger(
    name: Optional[str] = None,
    max_bytes: Optional[int] = None,
    backup_count: Optional[int] = None
) -> logging.Logger:
    """
    Configure and return a logger instance with standardized formatting and rotation.

    Console output goes to stderr so that command results printed on stdout
    (tables, JSON summaries, latency lines) stay machine-readable.

    Args:
        name: The name for the logger instance. If None, returns the root logger.
        max_bytes: Maximum size of the log file before rotation (defaults to settings).
        backup_count: Number of backup files to keep (defaults to settings).

    Returns:
        logging.Logger: Configured logger instance
    """
    formatter = logging.Formatter(
        fmt='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    logger = logging.getLogger(name)
    logger.setLevel(settings.log_level.upper())

    # Prevent adding handlers multiple times
    if logger.handlers:
        return logger

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if settings.log_to_file:
        log_dir = Path(settings.log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)

        # Single log file shared by all modules
        file_handler = RotatingFileHandler(
            log_dir / 'forgewear.log',
            maxBytes=max_bytes or settings.log_max_bytes,
            backupCount=backup_count or settings.log_backup_count,
            mode='a'
        )
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger
