"""endofuse - compose reconstructed surgical tools into a tissue point cloud.

Tissue is lifted from calibrated frames by back-projection; each tool model is
scaled from orthographic bounding-box areas and positioned by maximizing the
IoU of its perspective silhouette against its segmentation mask. The composed
scene can be rendered with point splats and scored per region.
"""

__version__ = "0.1.0"
