"""
Placement and appearance metrics.

IoU scores a placed tool's silhouette against its mask. PSNR and SSIM score a
rendering against the observed image inside a region: a tool's own mask for
tools, the complement of every tool mask for tissue.

SSIM uses an 11x11 Gaussian window (sigma 1.5) on the BT.601 luma channel with
K1 = 0.01, K2 = 0.03 and a unit dynamic range. The local statistics are taken
over the whole image with reflected borders; the SSIM map is then averaged over
the masked window centers.
"""

import math
from collections.abc import Mapping

import numpy as np
import numpy.typing as npt
from scipy import ndimage

from endofuse.constants import (
    LUMA_WEIGHTS,
    PSNR_PEAK,
    SSIM_DYNAMIC_RANGE,
    SSIM_K1,
    SSIM_K2,
    SSIM_SIGMA,
    SSIM_WINDOW,
)
from endofuse.reports import RegionReport
from endofuse.types import BinaryMask, ImageRGB, InvalidInput, MaskSemantics
from endofuse.types.images import require_same_shape

# truncate * sigma rounds to the half-width of the SSIM window
_SSIM_TRUNCATE = (SSIM_WINDOW // 2 + 0.25) / SSIM_SIGMA


def iou(a: BinaryMask, b: BinaryMask) -> float:
    """
    Intersection over union of two masks; 1.0 when both are empty.

    Examples:
        >>> bar = np.zeros((1, 3), dtype=bool)
        >>> left, right = bar.copy(), bar.copy()
        >>> left[0, :2] = True; right[0, 1:] = True
        >>> iou(BinaryMask(left), BinaryMask(right))
        0.3333333333333333
    """
    require_same_shape(a.shape, b=b.shape)
    union = int(np.count_nonzero(a.values | b.values))
    if union == 0:
        return 1.0
    return int(np.count_nonzero(a.values & b.values)) / union


def psnr(a: ImageRGB, b: ImageRGB, mask: BinaryMask) -> float:
    """
    Peak signal-to-noise ratio over the masked pixels, in dB.

    The MSE averages every channel of every masked pixel; the peak is 1.0.

    Returns:
        10 * log10(1 / MSE), or math.inf for identical regions

    Raises:
        DimensionMismatch: If the inputs differ in size
        InvalidInput: If the mask is empty
    """
    require_same_shape(a.shape, b=b.shape, mask=mask.shape)
    if mask.count == 0:
        raise InvalidInput("psnr needs at least one masked pixel")
    diff = a.pixels[mask.values] - b.pixels[mask.values]
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(PSNR_PEAK * PSNR_PEAK / mse)


def luma(image: ImageRGB) -> npt.NDArray[np.float64]:
    """BT.601 luma of an image."""
    result: npt.NDArray[np.float64] = image.pixels @ np.asarray(LUMA_WEIGHTS)
    return result


def ssim_map(x: npt.NDArray[np.float64], y: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """Per-pixel SSIM of two single-channel images."""
    c1 = (SSIM_K1 * SSIM_DYNAMIC_RANGE) ** 2
    c2 = (SSIM_K2 * SSIM_DYNAMIC_RANGE) ** 2

    def window(image: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        result: npt.NDArray[np.float64] = ndimage.gaussian_filter(
            image, sigma=SSIM_SIGMA, truncate=_SSIM_TRUNCATE, mode="reflect"
        )
        return result

    mu_x = window(x)
    mu_y = window(y)
    var_x = window(x * x) - mu_x * mu_x
    var_y = window(y * y) - mu_y * mu_y
    cov = window(x * y) - mu_x * mu_y

    numerator = (2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)
    denominator = (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
    result: npt.NDArray[np.float64] = numerator / denominator
    return result


def ssim(a: ImageRGB, b: ImageRGB, mask: BinaryMask) -> float:
    """
    Structural similarity averaged over masked window centers.

    Raises:
        DimensionMismatch: If the inputs differ in size
        InvalidInput: If the mask is empty
    """
    require_same_shape(a.shape, b=b.shape, mask=mask.shape)
    if mask.count == 0:
        raise InvalidInput("ssim needs at least one masked pixel")
    values = ssim_map(luma(a), luma(b))[mask.values]
    return float(np.clip(values.mean(), -1.0, 1.0))


def evaluate_regions(
    rendered: ImageRGB,
    reference: ImageRGB,
    tool_masks: Mapping[int, BinaryMask],
    silhouettes: Mapping[int, BinaryMask] | None = None,
) -> list[RegionReport]:
    """
    Score every tool region and the tissue region separately.

    Each tool is scored inside its own mask and, when a silhouette is given
    for it, gets the IoU of that silhouette against the mask. Tissue is scored
    on the complement of the union of the tool masks and is omitted when the
    tools cover the whole image.

    Args:
        rendered: Rendered image
        reference: Observed image
        tool_masks: Tool masks keyed by tool id
        silhouettes: Optional rendered silhouettes keyed by tool id

    Returns:
        Reports for the tools in ascending id order, then tissue
    """
    require_same_shape(rendered.shape, reference=reference.shape)
    shapes = {f"mask {tool_id}": mask.shape for tool_id, mask in tool_masks.items()}
    require_same_shape(rendered.shape, **shapes)

    reports: list[RegionReport] = []
    covered = np.zeros(rendered.shape, dtype=np.bool_)
    for tool_id in sorted(tool_masks):
        keep = tool_masks[tool_id].with_semantics(MaskSemantics.KEEP)
        covered |= keep.values
        overlap = None
        if silhouettes is not None and tool_id in silhouettes:
            overlap = iou(silhouettes[tool_id], keep)
        reports.append(
            RegionReport(
                label=tool_id,
                psnr=psnr(rendered, reference, keep),
                ssim=ssim(rendered, reference, keep),
                iou=overlap,
            )
        )

    tissue = BinaryMask(~covered, MaskSemantics.KEEP)
    if tissue.count:
        reports.append(
            RegionReport(
                label="tissue",
                psnr=psnr(rendered, reference, tissue),
                ssim=ssim(rendered, reference, tissue),
            )
        )
    return reports
