"""
PNG images, masks and depth maps.

Supported encodings:
- Colour: 8-bit RGB, channels divided by 255
- Masks: 8-bit grayscale or palette; any nonzero value marks a tool pixel.
  Label PNGs hold one distinct nonzero value per tool and are split into one
  mask per value.
- Depth: 16-bit grayscale; stored values are multiplied by the camera's
  depth_scale to get scene units, and 0 stays invalid.

Writers quantize back to the same encodings and replace their target atomically.
"""

import logging
from collections.abc import Mapping
from pathlib import Path

import numpy as np
import numpy.typing as npt
from PIL import Image, UnidentifiedImageError

from endofuse.formats.atomic import atomic_path
from endofuse.types import (
    BinaryMask,
    DepthMap,
    ImageFormatError,
    ImageRGB,
    InvalidInput,
    MaskSemantics,
)

logger = logging.getLogger(__name__)

_MASK_MODES = ("L", "P", "1")
_DEPTH_MODES = ("I;16", "I;16L", "I;16B")
# Older Pillow opens 16-bit grayscale PNGs as 32-bit "I"; PNG itself stores at most 16 bits
_PNG_DEPTH_MODES = ("I",)
_UINT16_MAX = 65535


def _load(
    path: Path | str,
    allowed: tuple[str, ...],
    expectation: str,
    png_only: tuple[str, ...] = (),
) -> npt.NDArray[np.generic]:
    source = Path(path)
    try:
        with Image.open(source) as image:
            if image.mode not in allowed and not (image.mode in png_only and image.format == "PNG"):
                raise ImageFormatError(
                    f"unsupported image mode {image.mode!r}; expected {expectation}", source
                )
            return np.array(image)
    except ImageFormatError:
        raise
    except UnidentifiedImageError as err:
        raise ImageFormatError(f"not a readable image; expected {expectation}", source) from err
    except (SyntaxError, ValueError) as err:
        raise ImageFormatError(f"corrupt image data: {err}", source) from err


def read_image(path: Path | str) -> ImageRGB:
    """Read an 8-bit RGB PNG as an image in [0, 1]."""
    pixels = _load(path, ("RGB",), "8-bit RGB")
    return ImageRGB(pixels.astype(np.float64) / 255.0)


def _read_labels(path: Path | str) -> npt.NDArray[np.int64]:
    values = _load(path, _MASK_MODES, "8-bit grayscale or palette")
    return values.astype(np.int64)


def read_mask(path: Path | str) -> BinaryMask:
    """Read a grayscale PNG as a TOOL mask: nonzero pixels are set."""
    return BinaryMask(_read_labels(path) != 0, MaskSemantics.TOOL)


def read_label_masks(path: Path | str) -> dict[int, BinaryMask]:
    """
    Split a label PNG into one TOOL mask per distinct nonzero value.

    Returns:
        Masks keyed by label value, in ascending order
    """
    labels = _read_labels(path)
    ids = [int(v) for v in np.unique(labels) if v != 0]
    return {tool_id: BinaryMask(labels == tool_id, MaskSemantics.TOOL) for tool_id in ids}


def read_depth(path: Path | str, depth_scale: float) -> DepthMap:
    """
    Read a 16-bit grayscale PNG as depth in scene units.

    Raises:
        ImageFormatError: For any other bit depth or colour type
        InvalidInput: If depth_scale is not positive
    """
    if not depth_scale > 0:
        raise InvalidInput(f"depth_scale must be positive, got {depth_scale}")
    stored = _load(path, _DEPTH_MODES, "16-bit grayscale", _PNG_DEPTH_MODES).astype(np.int64)
    if stored.min(initial=0) < 0 or stored.max(initial=0) > _UINT16_MAX:
        raise ImageFormatError("depth values exceed the 16-bit range", Path(path))
    return DepthMap(stored.astype(np.float64) * depth_scale)


def _save(array: npt.NDArray[np.generic], path: Path | str) -> None:
    with atomic_path(path) as tmp:
        Image.fromarray(array).save(tmp, format="PNG")
    logger.debug(f"Wrote {path}")


def write_image(image: ImageRGB, path: Path | str) -> None:
    """Write an image as 8-bit RGB PNG."""
    _save(np.rint(image.pixels * 255.0).astype(np.uint8), path)


def write_mask(mask: BinaryMask, path: Path | str) -> None:
    """Write a mask as 8-bit grayscale PNG (set pixels = 255)."""
    _save(np.where(mask.values, 255, 0).astype(np.uint8), path)


def write_label_mask(
    masks: Mapping[int, BinaryMask], shape: tuple[int, int], path: Path | str
) -> None:
    """
    Write per-tool masks as one 8-bit label PNG.

    Later ids overwrite earlier ones where masks overlap.

    Raises:
        InvalidInput: For ids outside 1..255 or masks of the wrong size
    """
    labels = np.zeros(shape, dtype=np.uint8)
    for tool_id in sorted(masks):
        if not 1 <= tool_id <= 255:
            raise InvalidInput(f"label ids must lie in 1..255 for an 8-bit PNG, got {tool_id}")
        if masks[tool_id].shape != tuple(shape):
            raise InvalidInput(f"mask {tool_id} has shape {masks[tool_id].shape}, expected {shape}")
        labels[masks[tool_id].values] = tool_id
    _save(labels, path)


def write_depth(depth: DepthMap, path: Path | str, depth_scale: float) -> None:
    """
    Write depth as 16-bit grayscale PNG, storing round(depth / depth_scale).

    Raises:
        InvalidInput: If depth_scale is not positive or a depth does not fit in 16 bits
    """
    if not depth_scale > 0:
        raise InvalidInput(f"depth_scale must be positive, got {depth_scale}")
    stored = np.rint(depth.values / depth_scale)
    if stored.max(initial=0.0) > _UINT16_MAX:
        raise InvalidInput(
            f"depth {float(depth.values.max()):.6g} exceeds the 16-bit range at "
            f"depth_scale {depth_scale}"
        )
    _save(stored.astype(np.uint16), path)
