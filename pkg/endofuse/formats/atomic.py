"""Atomic file replacement for every writer in endofuse.

Writers produce their bytes into a temporary file in the destination directory
and rename it over the target, so readers never observe a half-written file.
"""

import logging
import os
import tempfile
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

logger = logging.getLogger(__name__)


@contextmanager
def atomic_path(target: Path | str) -> Iterator[Path]:
    """Yield a temporary path that replaces ``target`` when the block exits cleanly.

    Parent directories are created as needed. If the block raises, the temporary
    file is removed and ``target`` is left untouched.

    Args:
        target: Final destination of the file

    Yields:
        Path of the temporary file to write

    Example:
        >>> with atomic_path("report.json") as tmp:
        ...     tmp.write_text("{}")
    """
    destination = Path(target)
    destination.parent.mkdir(parents=True, exist_ok=True)
    fd, temp_name = tempfile.mkstemp(
        prefix=f".{destination.name}.", suffix=".tmp", dir=destination.parent
    )
    os.close(fd)
    temp_path = Path(temp_name)
    try:
        yield temp_path
        os.replace(temp_path, destination)
        logger.debug(f"Wrote {destination}")
    finally:
        if temp_path.exists():
            temp_path.unlink()


def write_text_atomic(target: Path | str, text: str) -> None:
    """Write a UTF-8 text file atomically."""
    with atomic_path(target) as tmp:
        tmp.write_text(text, encoding="utf-8")
