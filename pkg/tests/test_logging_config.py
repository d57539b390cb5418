"""Tests for logging configuration."""

import logging
from pathlib import Path

from rich.console import Console
from rich.logging import RichHandler

from endofuse.utils.logging_config import resolve_log_level, setup_logging


class TestSetupLogging:
    """Tests for setup_logging function."""

    def test_setup_logging_basic(self) -> None:
        """Test basic logging setup."""
        setup_logging(level="INFO", use_rich=False)

        logger = logging.getLogger()
        assert logger.level == logging.INFO
        assert len(logger.handlers) == 1

    def test_setup_logging_debug_level(self) -> None:
        """Test logging setup with DEBUG level."""
        setup_logging(level="DEBUG", use_rich=False)

        logger = logging.getLogger()
        assert logger.level == logging.DEBUG

    def test_rich_handler_used_by_default(self) -> None:
        """Test that the console handler is a RichHandler unless disabled."""
        setup_logging(level="WARNING", console=Console(stderr=True))

        handlers = logging.getLogger().handlers
        assert any(isinstance(h, RichHandler) for h in handlers)

    def test_repeated_setup_replaces_handlers(self) -> None:
        """Test that calling setup twice does not duplicate handlers."""
        setup_logging(level="INFO", use_rich=False)
        setup_logging(level="INFO", use_rich=False)

        assert len(logging.getLogger().handlers) == 1

    def test_setup_logging_with_file(self, tmp_path: Path) -> None:
        """Test logging setup with file output."""
        log_file = tmp_path / "endofuse.log"

        setup_logging(level="INFO", use_rich=False, log_file=log_file)

        logger = logging.getLogger("endofuse.test")
        logger.info("Test message")

        assert log_file.exists()
        assert "Test message" in log_file.read_text()

    def test_setup_logging_creates_parent_dirs(self, tmp_path: Path) -> None:
        """Test that setup_logging creates parent directories for log file."""
        log_file = tmp_path / "logs" / "subdir" / "endofuse.log"

        setup_logging(level="INFO", use_rich=False, log_file=log_file)
        logging.getLogger("endofuse.test").info("Test message")

        assert log_file.exists()

    def test_log_file_is_appended(self, tmp_path: Path) -> None:
        """Test that an existing log file keeps its earlier content."""
        log_file = tmp_path / "endofuse.log"
        log_file.write_text("earlier run\n")

        setup_logging(level="INFO", use_rich=False, log_file=log_file)
        logging.getLogger("endofuse.test").info("later run")

        content = log_file.read_text()
        assert content.startswith("earlier run\n")
        assert "later run" in content


class TestResolveLogLevel:
    """Tests for picking the level from the flag and environment."""

    def test_verbose_wins(self) -> None:
        """Test that --verbose overrides the environment."""
        assert resolve_log_level(True, {"ENDOFUSE_LOG_LEVEL": "ERROR"}) == ("DEBUG", None)

    def test_environment_value(self) -> None:
        """Test that the environment variable is case-insensitive."""
        assert resolve_log_level(False, {"ENDOFUSE_LOG_LEVEL": "error"}) == ("ERROR", None)

    def test_default_is_warning(self) -> None:
        """Test the level when nothing is set."""
        assert resolve_log_level(False, {}) == ("WARNING", None)

    def test_unknown_value_reported(self) -> None:
        """Test that an unknown value falls back and is returned for a warning."""
        assert resolve_log_level(False, {"ENDOFUSE_LOG_LEVEL": "chatty"}) == ("WARNING", "chatty")
