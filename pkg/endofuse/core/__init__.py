"""Projections and the two-stage tool placement solver."""

from endofuse.core.placement import (
    SilhouetteScorer,
    compose_scene,
    initial_offset,
    optimize_position,
    place_tool,
    placed_geometry,
)
from endofuse.core.projection import (
    apply_transform,
    back_project,
    back_project_frames,
    make_ortho_matrix,
    ortho_project,
    perspective_project,
    transform_geometry,
)
from endofuse.core.scale import bbox_area, median_masked_depth, select_mask_points, solve_scale

__all__ = [
    # Projection
    "back_project",
    "back_project_frames",
    "perspective_project",
    "make_ortho_matrix",
    "ortho_project",
    "apply_transform",
    "transform_geometry",
    # Scale
    "bbox_area",
    "select_mask_points",
    "median_masked_depth",
    "solve_scale",
    # Position
    "SilhouetteScorer",
    "initial_offset",
    "optimize_position",
    "place_tool",
    "placed_geometry",
    "compose_scene",
]
