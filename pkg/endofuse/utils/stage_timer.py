"""Wall-clock timing of pipeline stages.

Each CLI command wraps its stages (reading inputs, scale solving, rendering,
writing outputs) in a StageTimer so the durations can be logged and recorded
in the placement report.
"""

import logging
import time
from collections.abc import Iterator
from contextlib import contextmanager
from typing import Any

logger = logging.getLogger(__name__)


class StageTimer:
    """Context manager timing one named stage.

    Attributes:
        stage: Name of the stage
        elapsed: Seconds taken (None until the stage finishes)
        log_level: Level at which completion is logged

    Examples:
        >>> with StageTimer("render") as timer:
        ...     pass
        >>> timer.elapsed is not None
        True
    """

    def __init__(self, stage: str, log_level: int = logging.INFO) -> None:
        self.stage = stage
        self.log_level = log_level
        self.elapsed: float | None = None
        self._start: float | None = None

    def __enter__(self) -> "StageTimer":
        self._start = time.perf_counter()
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc_val: BaseException | None,
        exc_tb: Any,
    ) -> None:
        if self._start is None:
            return
        self.elapsed = time.perf_counter() - self._start
        outcome = "failed after" if exc_type is not None else "completed in"
        logger.log(self.log_level, f"{self.stage} {outcome} {self.elapsed:.3f}s")


class StageTimings:
    """Ordered collection of stage durations for one command run.

    Examples:
        >>> timings = StageTimings()
        >>> with timings.stage("read"):
        ...     pass
        >>> list(timings.as_dict())
        ['read']
    """

    def __init__(self) -> None:
        self._elapsed: dict[str, float] = {}

    @contextmanager
    def stage(self, name: str) -> Iterator[StageTimer]:
        """Time a stage; repeated names accumulate."""
        timer = StageTimer(name)
        try:
            with timer:
                yield timer
        finally:
            if timer.elapsed is not None:
                self._elapsed[name] = self._elapsed.get(name, 0.0) + timer.elapsed

    def as_dict(self) -> dict[str, float]:
        return dict(self._elapsed)
