"""Binary morphology on masks."""

import numpy as np
from scipy import ndimage

from endofuse.types import BinaryMask, InvalidInput


def dilate_mask(mask: BinaryMask, kernel: int) -> BinaryMask:
    """
    Dilate a mask with a kernel x kernel square structuring element.

    Pixels outside the image count as unset, so growth near the border is
    simply clipped. The result keeps the input's semantics.

    Args:
        mask: Mask to grow
        kernel: Side of the square element; odd and >= 1

    Returns:
        The dilated mask (a copy of the input when kernel is 1)

    Raises:
        InvalidInput: If kernel is even or not positive
    """
    if isinstance(kernel, bool) or int(kernel) != kernel or kernel < 1 or kernel % 2 == 0:
        raise InvalidInput(f"dilation kernel must be an odd integer >= 1, got {kernel}")
    if kernel == 1:
        return BinaryMask(mask.values, mask.semantics)

    structure = np.ones((kernel, kernel), dtype=np.bool_)
    grown = ndimage.binary_dilation(mask.values, structure=structure, border_value=0)
    return BinaryMask(grown, mask.semantics)
