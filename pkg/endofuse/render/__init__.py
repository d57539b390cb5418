"""Splat rendering, silhouette rasterization, losses and mask morphology."""

from endofuse.render.losses import DepthLossTerms, color_loss, depth_loss, depth_loss_terms
from endofuse.render.morphology import dilate_mask
from endofuse.render.silhouette import rasterize_depth, rasterize_silhouette
from endofuse.render.splats import estimate_splat_radius, render, splats_from_cloud

__all__ = [
    "render",
    "splats_from_cloud",
    "estimate_splat_radius",
    "rasterize_silhouette",
    "rasterize_depth",
    "color_loss",
    "depth_loss",
    "depth_loss_terms",
    "DepthLossTerms",
    "dilate_mask",
]
