"""
Per-frame 2D observation types: depth maps, RGB images and binary masks.

Arrays are stored row-major as (height, width[, channel]) and frozen at
construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import numpy.typing as npt

from endofuse.types.errors import DimensionMismatch, InvalidInput
from endofuse.types.geometry import RigidTransform


class MaskSemantics(Enum):
    """
    What a set pixel of a BinaryMask means.

    - TOOL: the pixel belongs to a surgical tool
    - KEEP: the pixel participates in the computation (loss, metric, back-projection)
    """

    TOOL = "tool"
    KEEP = "keep"


def _freeze_grid(values: npt.ArrayLike, dtype: type, channels: int | None, name: str) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    expected_ndim = 2 if channels is None else 3
    if array.ndim != expected_ndim or (channels is not None and array.shape[2] != channels):
        layout = "H x W" if channels is None else f"H x W x {channels}"
        raise InvalidInput(f"{name} must have shape {layout}, got {array.shape}")
    if array.shape[0] < 1 or array.shape[1] < 1:
        raise InvalidInput(f"{name} must be at least 1x1, got {array.shape[0]}x{array.shape[1]}")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class DepthMap:
    """
    Per-pixel depth in scene units; 0 marks an invalid pixel.

    Attributes:
        values: H x W non-negative finite depths
    """

    values: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        values = _freeze_grid(self.values, np.float64, None, "depth")
        if not np.all(np.isfinite(values)) or np.any(values < 0.0):
            raise InvalidInput("depth values must be finite and non-negative")
        object.__setattr__(self, "values", values)

    @property
    def shape(self) -> tuple[int, int]:
        return (int(self.values.shape[0]), int(self.values.shape[1]))

    @classmethod
    def zeros(cls, height: int, width: int) -> DepthMap:
        return cls(np.zeros((height, width)))


@dataclass(frozen=True, eq=False)
class ImageRGB:
    """
    An RGB image with channels in [0, 1].

    Attributes:
        pixels: H x W x 3 array
    """

    pixels: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        pixels = _freeze_grid(self.pixels, np.float64, 3, "image")
        if not np.all(np.isfinite(pixels)) or np.any(pixels < 0.0) or np.any(pixels > 1.0):
            raise InvalidInput("image channels must be finite and within [0, 1]")
        object.__setattr__(self, "pixels", pixels)

    @property
    def shape(self) -> tuple[int, int]:
        return (int(self.pixels.shape[0]), int(self.pixels.shape[1]))

    @classmethod
    def zeros(cls, height: int, width: int) -> ImageRGB:
        return cls(np.zeros((height, width, 3)))


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """
    A {0, 1} mask with explicit semantics.

    Attributes:
        values: H x W boolean array
        semantics: Whether set pixels mark tool pixels or participating pixels
    """

    values: npt.NDArray[np.bool_]
    semantics: MaskSemantics = MaskSemantics.KEEP

    def __post_init__(self) -> None:
        raw = np.asarray(self.values)
        if raw.dtype != np.bool_:
            if raw.size and not np.all((raw == 0) | (raw == 1)):
                raise InvalidInput("mask values must be 0 or 1")
        values = _freeze_grid(raw.astype(np.bool_), np.bool_, None, "mask")
        object.__setattr__(self, "values", values)

    @property
    def shape(self) -> tuple[int, int]:
        return (int(self.values.shape[0]), int(self.values.shape[1]))

    @property
    def count(self) -> int:
        """Number of set pixels."""
        return int(np.count_nonzero(self.values))

    @classmethod
    def full(cls, height: int, width: int, semantics: MaskSemantics = MaskSemantics.KEEP) -> BinaryMask:
        """A mask with every pixel set."""
        return cls(np.ones((height, width), dtype=np.bool_), semantics)

    @classmethod
    def empty(cls, height: int, width: int, semantics: MaskSemantics = MaskSemantics.KEEP) -> BinaryMask:
        """A mask with no pixel set."""
        return cls(np.zeros((height, width), dtype=np.bool_), semantics)

    def complement(self, semantics: MaskSemantics = MaskSemantics.KEEP) -> BinaryMask:
        """Pixels not set here, tagged with the given semantics (KEEP by default)."""
        return BinaryMask(~self.values, semantics)

    def with_semantics(self, semantics: MaskSemantics) -> BinaryMask:
        return BinaryMask(self.values, semantics)

    def centroid(self) -> tuple[float, float]:
        """Mean (u, v) of the set pixels."""
        rows, cols = np.nonzero(self.values)
        if rows.size == 0:
            raise InvalidInput("centroid of an empty mask is undefined")
        return float(cols.mean()), float(rows.mean())


def require_same_shape(reference: tuple[int, int], /, **others: tuple[int, int]) -> None:
    """
    Raise DimensionMismatch naming the first input whose shape differs from the reference.

    Args:
        reference: Expected (height, width)
        **others: Named (height, width) shapes to compare
    """
    for name, shape in others.items():
        if tuple(shape) != tuple(reference):
            raise DimensionMismatch(name, reference, shape)


@dataclass(frozen=True, eq=False)
class FrameObservation:
    """
    One calibrated frame used for tissue initialization.

    Attributes:
        image: Observed colour
        depth: Observed depth (0 = invalid)
        keep: Pixels allowed to contribute (KEEP semantics)
        pose: Camera-to-scene transform of this frame
    """

    image: ImageRGB
    depth: DepthMap
    keep: BinaryMask
    pose: RigidTransform
