"""
Two-stage tool placement.

Stage one solves the tool's uniform scale from orthographic bounding-box
areas (see endofuse.core.scale). Stage two refines the tool's translation by
maximizing the IoU between the tool's perspective silhouette and its mask.

The refinement:
1. Start from the offset that puts the scaled tool's centroid on the ray
   through the mask centroid, at the depth prior
2. Align moments: move along the line of sight until the silhouette area
   matches the mask area, and sideways until the pixel centroids coincide
3. Descend: try +step and -step along x, y, z and the line of sight through
   the tool centroid; take the best move if it strictly increases IoU and
   sweep again at the same step
4. After a sweep with no accepted move, multiply the step by shrink_factor;
   stop once the step drops below min_step or max_iterations sweeps ran
5. Once converged, centre the offset on its IoU plateau along the line of
   sight, moving at most 1.5 * min_step

A move along z alone also shifts the silhouette sideways; a move along the
line of sight only changes its size. On a pixel grid the best IoU holds over
a short interval of depths, and step 5 returns the middle of it.

A warm start (SearchConfig.initial_offset) skips the moment alignment. Every
stage keeps the IoU at or above the value it started from and ties go to the
earlier candidate, so the returned IoU never falls below the initial IoU and
identical inputs give identical results.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import replace

import numpy as np
import numpy.typing as npt

from endofuse.constants import DEFAULT_TOOL_COLOR, TISSUE_LABEL
from endofuse.core.projection import perspective_project, transform_geometry
from endofuse.core.scale import (
    lift_mask_pixels,
    median_masked_depth,
    select_mask_points,
    solve_scale,
)
from endofuse.metrics.quality import iou
from endofuse.render.morphology import dilate_mask
from endofuse.render.silhouette import rasterize_silhouette
from endofuse.types import (
    BehindCamera,
    BinaryMask,
    Camera,
    ComposedScene,
    InvalidInput,
    PlacementResult,
    PointCloud,
    RasterConfig,
    ScaleMode,
    SearchConfig,
    ToolInstance,
    TriangleMesh,
)

logger = logging.getLogger(__name__)

AXIS_NAMES = ("x", "y", "z", "ray")

ALIGNMENT_ROUNDS = 6
# Plateau search resolution and reach, in units of min_step
PLATEAU_RESOLUTION = 0.125
PLATEAU_REACH = 3.0


class SilhouetteScorer:
    """
    IoU of a scaled tool's silhouette against its mask, as a function of offset.

    Counts every evaluation so the solvers can report their cost.
    """

    def __init__(
        self, tool: ToolInstance, sigma: float, cam: Camera, raster_cfg: RasterConfig
    ) -> None:
        if not sigma > 0:
            raise InvalidInput(f"sigma must be positive, got {sigma}")
        self.tool = tool
        self.cam = cam
        self.raster_cfg = raster_cfg
        self.scaled_points = sigma * tool.points
        self.centroid = self.scaled_points.mean(axis=0)
        self.evaluations = 0

    def silhouette(self, offset: npt.ArrayLike) -> BinaryMask:
        projected = perspective_project(self.scaled_points + np.asarray(offset), self.cam)
        return rasterize_silhouette(projected, self.cam, self.raster_cfg, self.tool.faces)

    def visible_points(self, offset: npt.ArrayLike) -> int:
        """Number of tool points in front of the camera at this offset."""
        projected = perspective_project(self.scaled_points + np.asarray(offset), self.cam)
        return len(projected) - projected.behind_count

    def line_of_sight(self, offset: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """Unit vector from the camera center to the placed centroid."""
        center = self.centroid + np.asarray(offset)
        length = float(np.linalg.norm(center))
        if length == 0.0:
            return np.array([0.0, 0.0, 1.0])
        result: npt.NDArray[np.float64] = center / length
        return result

    def evaluate(self, offset: npt.ArrayLike) -> tuple[float, BinaryMask]:
        """IoU and silhouette at one offset."""
        self.evaluations += 1
        silhouette = self.silhouette(offset)
        return iou(silhouette, self.tool.mask), silhouette

    def __call__(self, offset: npt.ArrayLike) -> float:
        return self.evaluate(offset)[0]


def initial_offset(
    tool: ToolInstance, sigma: float, cam: Camera, cfg: SearchConfig
) -> npt.NDArray[np.float64]:
    """
    Offset aligning the scaled tool's centroid with the back-projected mask centroid.

    The centroid is placed on the ray through the mask centroid pixel at
    ``cfg.depth_prior``, or at the scaled tool's own centroid depth when no
    prior is set. ``cfg.initial_offset`` overrides the computation.
    """
    if cfg.initial_offset is not None:
        return np.asarray(cfg.initial_offset, dtype=np.float64)

    centroid = sigma * tool.points.mean(axis=0)
    depth = cfg.depth_prior if cfg.depth_prior is not None else float(centroid[2])
    if not depth > 0:
        raise BehindCamera(
            f"tool {tool.id}: initial depth {depth:.6g} is not in front of the camera"
        )
    u, v = tool.mask.centroid()
    target = np.array([(u - cam.cx) / cam.fx * depth, (v - cam.cy) / cam.fy * depth, depth])
    result: npt.NDArray[np.float64] = target - centroid
    return result


def align_moments(
    scorer: SilhouetteScorer, offset: npt.NDArray[np.float64], start_iou: float
) -> tuple[npt.NDArray[np.float64], float]:
    """
    Match the silhouette's area and pixel centroid to the mask's.

    Each round scales the placed centroid about the camera center by
    sqrt(silhouette area / mask area), which keeps its projection, then shifts
    the tool parallel to the image plane by the pixel-centroid difference
    lifted to the new depth. The best round is kept if it beats ``start_iou``.

    Returns:
        (offset, iou); the input pair when no round improves on it
    """
    mask = scorer.tool.mask
    cam = scorer.cam
    best_offset, best = offset, start_iou
    current = offset
    silhouette = scorer.silhouette(current)
    target_u, target_v = mask.centroid()

    for _ in range(ALIGNMENT_ROUNDS):
        center = scorer.centroid + current
        if silhouette.count == 0 or not center[2] > 0:
            break
        scaled = center * math.sqrt(silhouette.count / mask.count)
        u, v = silhouette.centroid()
        shift = np.array(
            [(target_u - u) / cam.fx * scaled[2], (target_v - v) / cam.fy * scaled[2], 0.0]
        )
        current = current + (scaled - center) + shift
        score, silhouette = scorer.evaluate(current)
        if score > best:
            best_offset, best = current, score

    if best > start_iou:
        logger.debug(f"tool {scorer.tool.id}: moment alignment iou {start_iou:.4f} -> {best:.4f}")
    return best_offset, best


def _plateau_extent(
    scorer: SilhouetteScorer,
    offset: npt.NDArray[np.float64],
    direction: npt.NDArray[np.float64],
    level: float,
    resolution: float,
    reach: float,
) -> float:
    """Distance along ``direction`` over which the IoU stays at or above ``level``."""
    inside, outside = 0.0, resolution
    while scorer(offset + outside * direction) >= level:
        inside = outside
        if outside >= reach:
            return inside
        outside = min(2.0 * outside, reach)
    while outside - inside > resolution:
        middle = 0.5 * (inside + outside)
        if scorer(offset + middle * direction) >= level:
            inside = middle
        else:
            outside = middle
    return inside


def center_on_plateau(
    scorer: SilhouetteScorer, offset: npt.NDArray[np.float64], best: float, min_step: float
) -> tuple[npt.NDArray[np.float64], float]:
    """
    Move to the middle of the IoU plateau along the line of sight.

    Both plateau ends are searched up to PLATEAU_REACH * min_step away with a
    resolution of PLATEAU_RESOLUTION * min_step, so the offset moves by at most
    half the reach. The move is dropped if the middle scores below ``best``.
    """
    direction = scorer.line_of_sight(offset)
    resolution = PLATEAU_RESOLUTION * min_step
    reach = PLATEAU_REACH * min_step
    ahead = _plateau_extent(scorer, offset, direction, best, resolution, reach)
    behind = _plateau_extent(scorer, offset, -direction, best, resolution, reach)
    shift = 0.5 * (ahead - behind)
    if shift == 0.0:
        return offset, best

    candidate = offset + shift * direction
    score = scorer(candidate)
    if score < best:
        return offset, best
    logger.debug(f"tool {scorer.tool.id}: centred on plateau, moved {shift:.4g} along the line of sight")
    return candidate, score


def optimize_position(
    tool: ToolInstance,
    sigma: float,
    cam: Camera,
    cfg: SearchConfig | None = None,
    raster_cfg: RasterConfig | None = None,
) -> PlacementResult:
    """
    Refine a scaled tool's translation by greedy descent on IoU.

    Args:
        tool: Tool model and its mask
        sigma: Scale applied to the model before translation
        cam: Camera intrinsics (tool and camera frame coincide)
        cfg: Step schedule, iteration bound and initialization
        raster_cfg: Silhouette settings

    Returns:
        PlacementResult with the final offset and IoU

    Raises:
        BehindCamera: If no tool point lies in front of the camera at initialization
        InvalidInput: If sigma is not positive
    """
    search = cfg if cfg is not None else SearchConfig()
    scorer = SilhouetteScorer(tool, sigma, cam, raster_cfg or RasterConfig())

    offset = initial_offset(tool, sigma, cam, search)
    if scorer.visible_points(offset) == 0:
        raise BehindCamera(f"tool {tool.id}: every point lies behind the camera at initialization")

    best = scorer(offset)
    start_iou = best
    step = search.initial_step
    iterations = 0
    logger.debug(f"tool {tool.id}: start offset={offset.tolist()} iou={best:.4f}")

    if search.max_iterations > 0 and search.initial_offset is None:
        offset, best = align_moments(scorer, offset, best)

    while iterations < search.max_iterations and step >= search.min_step:
        iterations += 1
        directions = np.vstack([np.eye(3), scorer.line_of_sight(offset)])
        chosen: tuple[int, float] | None = None
        offset_next = offset
        for index, direction in enumerate(directions):
            for sign in (1.0, -1.0):
                candidate = offset + sign * step * direction
                score = scorer(candidate)
                if score > best:
                    offset_next, best, chosen = candidate, score, (index, sign)
        if chosen is None:
            step *= search.shrink_factor
            logger.debug(f"tool {tool.id}: no improvement, step -> {step:.4g}")
            continue
        offset = offset_next
        logger.debug(
            f"tool {tool.id}: move {'+' if chosen[1] > 0 else '-'}"
            f"{AXIS_NAMES[chosen[0]]} by {step:.4g} -> iou={best:.4f}"
        )

    if step < search.min_step and search.max_iterations > 0:
        offset, best = center_on_plateau(scorer, offset, best, search.min_step)

    logger.debug(
        f"tool {tool.id}: iou {start_iou:.4f} -> {best:.4f} after {iterations} sweeps, "
        f"{scorer.evaluations} evaluations"
    )
    return PlacementResult(
        sigma=float(sigma),
        offset=(float(offset[0]), float(offset[1]), float(offset[2])),
        iou=float(best),
        iterations=iterations,
        candidate_evaluations=scorer.evaluations,
        initial_iou=float(start_iou),
    )


def place_tool(
    tool: ToolInstance,
    tissue: PointCloud,
    cam: Camera,
    cfg: SearchConfig | None = None,
    raster_cfg: RasterConfig | None = None,
    scale_mode: ScaleMode = ScaleMode.ORTHO_BBOX,
    mask_dilation: int = 1,
    use_depth_prior: bool = True,
) -> PlacementResult:
    """
    Run both placement stages for one tool.

    The tissue points under the (optionally dilated) tool mask give the scale
    and, unless disabled or already set in ``cfg``, the depth prior. When the
    tissue has a hole where the tool was, as after back-projection with the
    tool mask excluded, the mask pixels are lifted to the depth of the nearest
    surrounding tissue instead.

    Args:
        tool: Tool model and mask
        tissue: Tissue cloud in the camera frame
        cam: Camera intrinsics
        cfg: Search settings
        raster_cfg: Silhouette settings
        scale_mode: How the masked area is measured
        mask_dilation: Odd kernel applied to the tool mask before selecting tissue
        use_depth_prior: Start at the median masked tissue depth

    Returns:
        The tool's PlacementResult
    """
    search = cfg if cfg is not None else SearchConfig()
    region = dilate_mask(tool.mask, mask_dilation)
    mask_points = select_mask_points(tissue, region, cam)
    if mask_points.is_empty:
        logger.info(
            f"tool {tool.id}: no tissue points under the mask, "
            f"lifting mask pixels to the surrounding tissue depth"
        )
        mask_points = lift_mask_pixels(tissue, region, cam)
    sigma = solve_scale(tool, tissue, mask_points, scale_mode, cam, region)

    if use_depth_prior and search.depth_prior is None and search.initial_offset is None:
        search = replace(search, depth_prior=median_masked_depth(mask_points))
    return optimize_position(tool, sigma, cam, search, raster_cfg)


def placed_geometry(tool: ToolInstance, result: PlacementResult) -> PointCloud | TriangleMesh:
    """The tool model scaled and translated by a placement result."""
    return transform_geometry(tool.geometry, result.sigma, result.offset)


def compose_scene(
    tissue: PointCloud,
    placements: Sequence[tuple[ToolInstance, PlacementResult]],
) -> ComposedScene:
    """
    Merge tissue and placed tools into one labelled cloud.

    Tools are appended in the given order. When the tissue carries colour, tool
    points without colour get DEFAULT_TOOL_COLOR.

    Args:
        tissue: Tissue cloud
        placements: (tool, result) pairs

    Returns:
        ComposedScene whose labels are 0 for tissue and the tool id otherwise
    """
    clouds = [tissue]
    labels = [np.full(len(tissue), TISSUE_LABEL, dtype=np.int64)]
    for tool, result in placements:
        placed = placed_geometry(tool, result)
        cloud = placed.to_pointcloud() if isinstance(placed, TriangleMesh) else placed
        clouds.append(cloud)
        labels.append(np.full(len(cloud), tool.id, dtype=np.int64))

    merged = PointCloud.concatenate(clouds, fill_color=DEFAULT_TOOL_COLOR)
    return ComposedScene(cloud=merged, labels=np.concatenate(labels))
