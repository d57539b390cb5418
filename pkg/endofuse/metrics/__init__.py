"""Image and mask quality metrics."""

from endofuse.metrics.quality import evaluate_regions, iou, luma, psnr, ssim, ssim_map

__all__ = ["iou", "psnr", "ssim", "ssim_map", "luma", "evaluate_regions"]
