"""
Tool placement type definitions.

These types carry a tool through the two placement stages: the scale factor
solved from orthographic bounding boxes, then the translation refined by
maximizing silhouette IoU under perspective projection.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np
import numpy.typing as npt

from endofuse.types.errors import InvalidConfiguration, InvalidInput
from endofuse.types.geometry import PointCloud, TriangleMesh
from endofuse.types.images import BinaryMask, MaskSemantics

Vector3 = tuple[float, float, float]


class ScaleMode(Enum):
    """
    How the masked-region area A_mask is measured when solving the scale factor.

    - ORTHO_BBOX: bounding-box area of the orthographically projected masked tissue points
    - MASK_PIXELS: 2D mask pixel count lifted to the tissue depth and normalized like the tool
    """

    ORTHO_BBOX = "ortho_bbox"
    MASK_PIXELS = "mask_pixels"


@dataclass(frozen=True, eq=False)
class ToolInstance:
    """
    One segmented tool in the evaluated frame.

    Attributes:
        id: Label of the tool in the segmentation mask
        geometry: The tool model, as vertices only or as a triangle mesh
        mask: The tool's binary mask (TOOL semantics)
    """

    id: int
    geometry: PointCloud | TriangleMesh
    mask: BinaryMask

    def __post_init__(self) -> None:
        """Validate the id and that the mask and geometry are non-empty."""
        if self.id < 1:
            raise InvalidInput(f"tool id must be a positive label, got {self.id}")
        if self.mask.count < 1:
            raise InvalidInput(f"tool {self.id}: mask has no set pixels")
        if len(self.geometry) < 1:
            raise InvalidInput(f"tool {self.id}: geometry has no points")
        if self.mask.semantics is not MaskSemantics.TOOL:
            object.__setattr__(self, "mask", self.mask.with_semantics(MaskSemantics.TOOL))

    @property
    def points(self) -> npt.NDArray[np.float64]:
        """Model-space positions of the tool (mesh vertices or cloud points)."""
        if isinstance(self.geometry, TriangleMesh):
            return self.geometry.vertices
        return self.geometry.positions

    @property
    def faces(self) -> npt.NDArray[np.int64] | None:
        """Triangle indices, or None for point-only geometry."""
        if isinstance(self.geometry, TriangleMesh):
            return self.geometry.faces
        return None

    def as_pointcloud(self) -> PointCloud:
        if isinstance(self.geometry, TriangleMesh):
            return self.geometry.to_pointcloud()
        return self.geometry


@dataclass(frozen=True)
class SearchConfig:
    """
    Parameters of the greedy coordinate descent over tool translation.

    Attributes:
        initial_step: First step length along each axis, in scene units
        min_step: Search stops once the step falls below this length
        shrink_factor: Step multiplier applied after a sweep with no improvement
        max_iterations: Maximum number of descent sweeps
        depth_prior: Initial tool depth (typically the median masked tissue depth);
            None uses the tool's own centroid depth
        initial_offset: Warm start replacing the centroid initialization
    """

    initial_step: float = 0.1
    min_step: float = 1e-3
    shrink_factor: float = 0.5
    max_iterations: int = 200
    depth_prior: float | None = None
    initial_offset: Vector3 | None = None

    def __post_init__(self) -> None:
        """Validate step schedule and iteration bound."""
        if not 0 < self.min_step <= self.initial_step:
            raise InvalidConfiguration(
                f"need 0 < min_step <= initial_step, got min_step={self.min_step}, "
                f"initial_step={self.initial_step}"
            )
        if not 0 < self.shrink_factor < 1:
            raise InvalidConfiguration(
                f"shrink_factor must lie in (0, 1), got {self.shrink_factor}"
            )
        if self.max_iterations < 0:
            raise InvalidConfiguration(
                f"max_iterations must be non-negative, got {self.max_iterations}"
            )
        if self.depth_prior is not None and not self.depth_prior > 0:
            raise InvalidConfiguration(f"depth_prior must be positive, got {self.depth_prior}")
        if self.initial_offset is not None:
            offset = tuple(float(v) for v in self.initial_offset)
            if len(offset) != 3 or not all(np.isfinite(offset)):
                raise InvalidConfiguration(
                    f"initial_offset must be a finite 3-vector, got {self.initial_offset}"
                )
            object.__setattr__(self, "initial_offset", offset)


@dataclass(frozen=True)
class PlacementResult:
    """
    Output of the placement solver for one tool.

    Attributes:
        sigma: Uniform scale applied to the tool model
        offset: Translation applied after scaling, camera frame, scene units
        iou: Silhouette IoU achieved at the returned offset
        iterations: Number of descent sweeps performed
        candidate_evaluations: Number of IoU evaluations, including the initial one
        initial_iou: IoU at the initialization
    """

    sigma: float
    offset: Vector3
    iou: float
    iterations: int
    candidate_evaluations: int
    initial_iou: float = 0.0

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise InvalidInput(f"sigma must be positive, got {self.sigma}")
        if not 0.0 <= self.iou <= 1.0:
            raise InvalidInput(f"iou must lie in [0, 1], got {self.iou}")

    def to_dict(self) -> dict[str, Any]:
        """Convert to a JSON-serializable dictionary."""
        return {
            "sigma": self.sigma,
            "offset": list(self.offset),
            "iou": self.iou,
            "initial_iou": self.initial_iou,
            "iterations": self.iterations,
            "candidate_evaluations": self.candidate_evaluations,
        }


@dataclass(frozen=True, eq=False)
class ComposedScene:
    """
    Tissue and placed tools merged into one labelled cloud.

    Attributes:
        cloud: All points, tissue first, then tools in placement order
        labels: Per-point provenance (0 for tissue, the tool id otherwise)
    """

    cloud: PointCloud
    labels: npt.NDArray[np.int64] = field(repr=False)

    def __post_init__(self) -> None:
        labels = np.array(self.labels, dtype=np.int64, copy=True).reshape(-1)
        if labels.shape[0] != len(self.cloud):
            raise InvalidInput(
                f"labels length {labels.shape[0]} does not match cloud length {len(self.cloud)}"
            )
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    def label_counts(self) -> dict[int, int]:
        """Histogram of provenance labels."""
        return {int(k): int(v) for k, v in sorted(Counter(self.labels.tolist()).items())}
