"""
Exhaustive translation search over a regular lattice.

The oracle scores every offset of a cubic lattice with the same silhouette IoU
the coordinate-descent solver maximizes, so on any lattice containing the
solver's reachable offsets its best IoU bounds the solver's from above.
"""

import itertools
import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from endofuse.constants import MAX_ORACLE_CANDIDATES
from endofuse.core.placement import SilhouetteScorer
from endofuse.types import (
    Camera,
    InvalidConfiguration,
    OracleLatticeTooLarge,
    RasterConfig,
    ToolInstance,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LatticeSpec:
    """
    A cubic lattice of candidate offsets.

    Candidates are center + step * (i, j, k) for integers i, j, k in
    [-half_count, half_count], giving (2 * half_count + 1)^3 offsets.
    """

    center: tuple[float, float, float]
    step: float
    half_count: int

    def __post_init__(self) -> None:
        center = tuple(float(v) for v in self.center)
        if len(center) != 3 or not all(np.isfinite(center)):
            raise InvalidConfiguration(f"lattice center must be a finite 3-vector, got {self.center}")
        object.__setattr__(self, "center", center)
        if not self.step > 0:
            raise InvalidConfiguration(f"lattice step must be positive, got {self.step}")
        if self.half_count < 0:
            raise InvalidConfiguration(f"half_count must be >= 0, got {self.half_count}")

    @property
    def candidate_count(self) -> int:
        return (2 * self.half_count + 1) ** 3

    def axis_values(self, axis: int) -> npt.NDArray[np.float64]:
        """Ascending candidate coordinates along one axis."""
        ticks = np.arange(-self.half_count, self.half_count + 1, dtype=np.float64)
        result: npt.NDArray[np.float64] = self.center[axis] + self.step * ticks
        return result


@dataclass(frozen=True)
class OracleResult:
    """
    Best lattice offset.

    Attributes:
        offset: Lexicographically smallest offset reaching the best IoU
        iou: The best IoU
        evaluations: Number of candidates scored
    """

    offset: tuple[float, float, float]
    iou: float
    evaluations: int


def exhaustive_search_oracle(
    tool: ToolInstance,
    sigma: float,
    cam: Camera,
    lattice: LatticeSpec,
    raster_cfg: RasterConfig | None = None,
) -> OracleResult:
    """
    Score every lattice offset and return the best one.

    Candidates are visited in ascending lexicographic order and a later
    candidate replaces the incumbent only on strictly higher IoU, so ties go
    to the smallest offset.

    Raises:
        OracleLatticeTooLarge: If the lattice exceeds MAX_ORACLE_CANDIDATES
    """
    if lattice.candidate_count > MAX_ORACLE_CANDIDATES:
        raise OracleLatticeTooLarge(
            f"lattice has {lattice.candidate_count} candidates; the limit is "
            f"{MAX_ORACLE_CANDIDATES} (half_count <= 10)"
        )

    scorer = SilhouetteScorer(tool, sigma, cam, raster_cfg or RasterConfig())
    axes = [lattice.axis_values(axis) for axis in range(3)]

    best_offset = (axes[0][0], axes[1][0], axes[2][0])
    best_iou = -1.0
    for candidate in itertools.product(*axes):
        score = scorer(np.asarray(candidate))
        if score > best_iou:
            best_offset, best_iou = candidate, score

    logger.debug(
        f"oracle tool {tool.id}: best iou={best_iou:.4f} at {list(best_offset)} "
        f"over {scorer.evaluations} candidates"
    )
    return OracleResult(
        offset=(float(best_offset[0]), float(best_offset[1]), float(best_offset[2])),
        iou=float(best_iou),
        evaluations=scorer.evaluations,
    )
