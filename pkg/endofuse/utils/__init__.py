"""Utility modules for endofuse.

This package contains logging configuration, configuration validation, stage
timing and console report tables.
"""

from endofuse.utils.logging_config import resolve_log_level, setup_logging
from endofuse.utils.stage_timer import StageTimer, StageTimings

__all__ = [
    # Logging
    "setup_logging",
    "resolve_log_level",
    # Timing
    "StageTimer",
    "StageTimings",
]
