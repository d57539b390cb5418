"""
Scale estimation for tool placement.

The tool model and the tissue points under the tool's mask are both projected
orthographically through the normalization of the tissue bounding box. Since
orthographic projection has no perspective distortion, the ratio of the two
bounding-box areas measures how much the model must be scaled:

    sigma = sqrt(A_mask / A_tool)

Both areas are in squared normalized units. ScaleMode.MASK_PIXELS replaces
A_mask with the 2D mask pixel count lifted to the tissue depth.

Tissue back-projected with the tool mask excluded has no points under the
mask; lift_mask_pixels fills the hole from the surrounding surface.
"""

import logging

import numpy as np
import numpy.typing as npt
from scipy.spatial import cKDTree

from endofuse.core.projection import make_ortho_matrix, ortho_project, perspective_project
from endofuse.types import (
    BinaryMask,
    Camera,
    DegenerateMask,
    DegenerateTool,
    InvalidInput,
    PointCloud,
    ScaleMode,
    ToolInstance,
)

logger = logging.getLogger(__name__)


def bbox_area(points2d: npt.ArrayLike) -> float:
    """
    Area of the axis-aligned bounding box of 2D points.

    Args:
        points2d: N x 2 coordinates, N >= 1

    Returns:
        (max x - min x) * (max y - min y); zero for degenerate input

    Raises:
        InvalidInput: If no points are given

    Examples:
        >>> bbox_area([(0, 0), (1, 0), (0, 1), (1, 1)])
        1.0

        >>> bbox_area([(0, 0), (2, 3)])
        6.0

        >>> bbox_area([(5, 5)])
        0.0
    """
    p = np.asarray(points2d, dtype=np.float64).reshape(-1, 2)
    if p.shape[0] == 0:
        raise InvalidInput("bounding-box area of an empty point set is undefined")
    extent = p.max(axis=0) - p.min(axis=0)
    return float(extent[0] * extent[1])


def select_mask_points(tissue: PointCloud, mask: BinaryMask, cam: Camera) -> PointCloud:
    """
    Tissue points whose projection lands on a set mask pixel.

    Points are taken in the camera frame; a point maps to the pixel whose center
    is nearest to its projection. Points behind the camera or outside the image
    are never selected.

    Args:
        tissue: Tissue cloud in the camera frame
        mask: Region of interest (typically a dilated tool mask)
        cam: Camera intrinsics

    Returns:
        The selected sub-cloud, in tissue order
    """
    cam.check_shape("mask", mask.shape)
    projected = perspective_project(tissue, cam)
    pixels = np.floor(projected.uv + 0.5).astype(np.int64)
    u, v = pixels[:, 0], pixels[:, 1]
    inside = projected.in_front & (u >= 0) & (u < cam.width) & (v >= 0) & (v < cam.height)

    selected = np.zeros(len(tissue), dtype=np.bool_)
    selected[inside] = mask.values[v[inside], u[inside]]
    return tissue.subset(selected)


def lift_mask_pixels(tissue: PointCloud, mask: BinaryMask, cam: Camera) -> PointCloud:
    """
    Stand-in tissue under a mask, for tissue with a hole where the tool was.

    Every set mask pixel is back-projected at the depth of the tissue point
    whose projection lies nearest to it in the image, so the result follows
    the surrounding surface across the hole.

    Args:
        tissue: Tissue cloud in the camera frame
        mask: Pixels to lift
        cam: Camera intrinsics

    Returns:
        One point per set mask pixel, in row-major pixel order

    Raises:
        DegenerateMask: If no tissue point projects into the image
    """
    cam.check_shape("mask", mask.shape)
    projected = perspective_project(tissue, cam)
    uv = projected.uv
    inside = (
        projected.in_front
        & (uv[:, 0] > -0.5) & (uv[:, 0] < cam.width - 0.5)
        & (uv[:, 1] > -0.5) & (uv[:, 1] < cam.height - 0.5)
    )
    if not inside.any():
        raise DegenerateMask("no tissue point projects into the image")

    rows, cols = np.nonzero(mask.values)
    pixels = np.column_stack([cols, rows]).astype(np.float64)
    _, nearest = cKDTree(uv[inside]).query(pixels)
    depth = projected.z[inside][nearest]
    points = np.column_stack(
        [(pixels[:, 0] - cam.cx) / cam.fx * depth, (pixels[:, 1] - cam.cy) / cam.fy * depth, depth]
    )
    return PointCloud(points)


def median_masked_depth(mask_points: PointCloud) -> float:
    """
    Median camera-frame depth of the masked tissue points.

    Raises:
        DegenerateMask: If no tissue point falls under the mask
    """
    if mask_points.is_empty:
        raise DegenerateMask("no tissue points fall under the tool mask")
    return float(np.median(mask_points.positions[:, 2]))


def solve_scale(
    tool: ToolInstance,
    tissue: PointCloud,
    tissue_mask_points: PointCloud,
    mode: ScaleMode = ScaleMode.ORTHO_BBOX,
    cam: Camera | None = None,
    mask: BinaryMask | None = None,
) -> float:
    """
    Solve the uniform scale factor of a tool model.

    Args:
        tool: Tool whose model is measured
        tissue: Full tissue cloud; its bounding box defines M_o
        tissue_mask_points: Tissue points under the tool's (dilated) mask
        mode: How A_mask is measured
        cam: Camera intrinsics, required for ScaleMode.MASK_PIXELS
        mask: Mask whose pixels are counted in ScaleMode.MASK_PIXELS
            (defaults to the tool's own mask)

    Returns:
        sigma = sqrt(A_mask / A_tool), strictly positive

    Raises:
        DegenerateGeometry: If the tissue bounding box is flat on some axis
        DegenerateTool: If the tool's orthographic projection has zero area
        DegenerateMask: If the masked tissue is empty or projects to zero area
        InvalidInput: If MASK_PIXELS is requested without a camera
    """
    m = make_ortho_matrix(tissue)

    tool_area = bbox_area(ortho_project(tool.points, m))
    if not tool_area > 0.0:
        raise DegenerateTool(f"tool {tool.id}: orthographic projection has zero area")

    if tissue_mask_points.is_empty:
        raise DegenerateMask(f"tool {tool.id}: no tissue points fall under the mask")

    if mode is ScaleMode.ORTHO_BBOX:
        mask_area = bbox_area(ortho_project(tissue_mask_points, m))
    else:
        if cam is None:
            raise InvalidInput("mask_pixels scale mode needs camera intrinsics")
        pixel_mask = mask if mask is not None else tool.mask
        depth = median_masked_depth(tissue_mask_points)
        footprint = pixel_mask.count * (depth / cam.fx) * (depth / cam.fy)
        mask_area = float(footprint * abs(m.scale[0] * m.scale[1]))

    if not mask_area > 0.0:
        raise DegenerateMask(f"tool {tool.id}: masked tissue projection has zero area")

    sigma = float(np.sqrt(mask_area / tool_area))
    logger.debug(
        f"tool {tool.id}: A_mask={mask_area:.6g} A_tool={tool_area:.6g} "
        f"sigma={sigma:.6g} ({mode.value})"
    )
    return sigma
