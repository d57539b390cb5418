"""
Photometric and geometric losses between a rendering and an observation.

Both losses are masked sums over participating pixels:

- color_loss: L1 distance summed over the three channels
- depth_loss: L1 distance between inverse depths plus one minus the Pearson
  correlation of the two depth maps

The sums are unnormalized. ``reduction="mean"`` and DepthLossTerms expose the
per-pixel means alongside them.
"""

from dataclasses import dataclass
from typing import Literal

import numpy as np

from endofuse.constants import EPSILON_DEPTH
from endofuse.types import (
    BinaryMask,
    CorrelationUndefined,
    DepthMap,
    ImageRGB,
    InvalidInput,
)
from endofuse.types.images import require_same_shape

Reduction = Literal["sum", "mean"]


@dataclass(frozen=True)
class DepthLossTerms:
    """
    The two parts of the depth loss.

    Attributes:
        inverse_depth: Sum of |1/rendered - 1/reference| over valid masked pixels
        correlation: 1 - Pearson correlation over the same pixels, in [0, 2]
        valid_pixels: Number of masked pixels where both depths exceed EPSILON_DEPTH
    """

    inverse_depth: float
    correlation: float
    valid_pixels: int

    @property
    def total(self) -> float:
        return self.inverse_depth + self.correlation

    @property
    def mean_inverse_depth(self) -> float:
        """Per-pixel mean of the inverse-depth term."""
        return self.inverse_depth / self.valid_pixels


def color_loss(
    rendered: ImageRGB,
    reference: ImageRGB,
    mask: BinaryMask,
    reduction: Reduction = "sum",
) -> float:
    """
    Masked L1 colour distance.

    Args:
        rendered: Rendered image
        reference: Observed image
        mask: Participating pixels (KEEP semantics)
        reduction: "sum" for the plain masked sum, "mean" to divide it by the
            number of masked pixels

    Returns:
        The loss; 0 when the mask is empty

    Raises:
        DimensionMismatch: If the inputs differ in size

    Examples:
        >>> ones = ImageRGB(np.ones((2, 2, 3)))
        >>> color_loss(ImageRGB.zeros(2, 2), ones, BinaryMask.full(2, 2))
        12.0
    """
    require_same_shape(rendered.shape, reference=reference.shape, mask=mask.shape)
    if reduction not in ("sum", "mean"):
        raise InvalidInput(f"reduction must be 'sum' or 'mean', got {reduction!r}")

    keep = mask.values
    total = float(np.abs(rendered.pixels[keep] - reference.pixels[keep]).sum())
    if reduction == "mean":
        count = int(np.count_nonzero(keep))
        return total / count if count else 0.0
    return total


def depth_loss_terms(rendered: DepthMap, reference: DepthMap, mask: BinaryMask) -> DepthLossTerms:
    """
    Evaluate both depth loss terms.

    A pixel is valid when it is masked and both depths exceed EPSILON_DEPTH.

    Raises:
        DimensionMismatch: If the inputs differ in size
        CorrelationUndefined: With fewer than 2 valid pixels or when either
            depth set is constant over the valid pixels
    """
    require_same_shape(rendered.shape, reference=reference.shape, mask=mask.shape)
    valid = mask.values & (rendered.values > EPSILON_DEPTH) & (reference.values > EPSILON_DEPTH)
    count = int(np.count_nonzero(valid))
    if count < 2:
        raise CorrelationUndefined(f"need at least 2 valid masked depth pixels, found {count}")

    predicted = rendered.values[valid]
    observed = reference.values[valid]
    if predicted.max() == predicted.min() or observed.max() == observed.min():
        raise CorrelationUndefined("depth is constant over the valid masked pixels")

    inverse_term = float(np.abs(1.0 / predicted - 1.0 / observed).sum())

    p = predicted - predicted.mean()
    o = observed - observed.mean()
    denominator = float(np.sqrt(np.dot(p, p) * np.dot(o, o)))
    if denominator == 0.0:
        raise CorrelationUndefined("depth variance vanishes over the valid masked pixels")
    pearson = float(np.clip(np.dot(p, o) / denominator, -1.0, 1.0))

    return DepthLossTerms(inverse_depth=inverse_term, correlation=1.0 - pearson, valid_pixels=count)


def depth_loss(rendered: DepthMap, reference: DepthMap, mask: BinaryMask) -> float:
    """
    Inverse-depth L1 plus correlation loss; see depth_loss_terms.

    Examples:
        >>> depth = DepthMap(np.array([[1.0, 2.0], [3.0, 4.0]]))
        >>> abs(depth_loss(depth, depth, BinaryMask.full(2, 2))) < 1e-12
        True
    """
    return depth_loss_terms(rendered, reference, mask).total
