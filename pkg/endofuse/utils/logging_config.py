"""Logging configuration with Rich handler support.

This module provides the one place where endofuse configures logging handlers.
Library modules only call ``logging.getLogger(__name__)``; the CLI calls
``setup_logging`` once at startup. Console output always goes to stderr so
stdout stays reserved for command results.
"""

import logging
import os
import sys
from pathlib import Path
from typing import Literal

from rich.console import Console
from rich.logging import RichHandler

from endofuse.constants import LOG_LEVEL_ENV_VAR

# Type alias for log levels
LogLevel = Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]

LOG_LEVELS: tuple[str, ...] = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
DEFAULT_LOG_LEVEL: LogLevel = "WARNING"

_FILE_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def resolve_log_level(verbose: bool = False, environ: dict[str, str] | None = None) -> tuple[str, str | None]:
    """Pick the log level from the verbose flag, then the environment.

    Args:
        verbose: The CLI's --verbose flag; wins over the environment
        environ: Environment mapping (defaults to os.environ)

    Returns:
        (level, rejected) where rejected is an unrecognized environment value
        that fell back to the default, or None

    Examples:
        >>> resolve_log_level(verbose=True, environ={})
        ('DEBUG', None)
        >>> resolve_log_level(environ={"ENDOFUSE_LOG_LEVEL": "info"})
        ('INFO', None)
        >>> resolve_log_level(environ={"ENDOFUSE_LOG_LEVEL": "loud"})
        ('WARNING', 'loud')
    """
    if verbose:
        return "DEBUG", None
    env = os.environ if environ is None else environ
    requested = env.get(LOG_LEVEL_ENV_VAR, "").strip()
    if not requested:
        return DEFAULT_LOG_LEVEL, None
    if requested.upper() in LOG_LEVELS:
        return requested.upper(), None
    return DEFAULT_LOG_LEVEL, requested


def setup_logging(
    level: str = DEFAULT_LOG_LEVEL,
    use_rich: bool = True,
    log_file: Path | str | None = None,
    console: Console | None = None,
) -> None:
    """Configure the root logger with Rich handler and optional file output.

    Args:
        level: Logging level as string (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        use_rich: Whether to use Rich handler for console output (default: True)
        log_file: Optional path to a log file, appended to
        console: Optional Rich console (defaults to one writing to stderr)

    Examples:
        >>> setup_logging(level="DEBUG")
        >>> setup_logging(level="INFO", log_file="endofuse.log", use_rich=False)

    Note:
        This function replaces any handlers already on the root logger.
    """
    numeric_level = getattr(logging, level.upper(), logging.WARNING)

    root_logger = logging.getLogger()
    root_logger.setLevel(numeric_level)
    root_logger.handlers.clear()

    console_handler: logging.Handler
    if use_rich:
        console_handler = RichHandler(
            console=console or Console(stderr=True),
            show_time=True,
            show_path=True,
            markup=False,
            rich_tracebacks=True,
        )
    else:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(logging.Formatter(fmt=_FILE_FORMAT, datefmt=_DATE_FORMAT))
    console_handler.setLevel(numeric_level)
    root_logger.addHandler(console_handler)

    if log_file is not None:
        file_path = Path(log_file)
        file_path.parent.mkdir(parents=True, exist_ok=True)

        file_handler = logging.FileHandler(file_path, mode="a", encoding="utf-8")
        file_handler.setLevel(numeric_level)
        file_handler.setFormatter(logging.Formatter(fmt=_FILE_FORMAT, datefmt=_DATE_FORMAT))
        root_logger.addHandler(file_handler)

    logger = logging.getLogger(__name__)
    logger.debug(f"Logging configured: level={level}, use_rich={use_rich}, log_file={log_file}")
