"""
Forward renderer for isotropic point splats.

Each splat projects to a circular Gaussian footprint whose pixel radius is
s = radius * mean(fx, fy) / z. A splat at pixel distance d contributes

    alpha = opacity * exp(-d^2 / (2 s^2))

and footprints are truncated at ``gaussian_cutoff * s``. Per pixel, splats are
composited front to back:

    C = sum_i c_i alpha_i T_i,  D = sum_i z_i alpha_i T_i,  T_i = prod_{j<i} (1 - alpha_j)

A pixel stops accumulating once its transmittance drops below
``alpha_epsilon``. Fragments are ordered by depth, then by their colour and
alpha, so the output does not depend on the order of the input splats.
"""

import logging

import numpy as np
import numpy.typing as npt
from scipy.spatial import cKDTree

from endofuse.constants import DEFAULT_TOOL_COLOR
from endofuse.types import (
    Camera,
    DepthMap,
    ImageRGB,
    InvalidInput,
    PointCloud,
    RasterConfig,
    RenderOutput,
    SplatSet,
)

logger = logging.getLogger(__name__)

# Largest number of candidate pixels generated per batch of splats
_FRAGMENT_BUDGET = 1 << 22


def splats_from_cloud(
    cloud: PointCloud,
    radius: float,
    opacity: float = 1.0,
    default_color: tuple[float, float, float] = DEFAULT_TOOL_COLOR,
) -> SplatSet:
    """
    Turn every point of a cloud into a splat of the given radius and opacity.

    Points without colour get ``default_color``.
    """
    n = len(cloud)
    colors = cloud.colors if cloud.colors is not None else np.tile(np.asarray(default_color), (n, 1))
    return SplatSet(
        centers=cloud.positions,
        colors=colors.reshape(-1, 3),
        opacities=np.full(n, float(opacity)),
        radii=np.full(n, float(radius)),
    )


def estimate_splat_radius(cloud: PointCloud) -> float:
    """
    Half the median nearest-neighbour spacing of a cloud.

    Raises:
        InvalidInput: If the cloud has fewer than two distinct points
    """
    if len(cloud) < 2:
        raise InvalidInput("cannot estimate a splat radius from fewer than two points")
    distances, _ = cKDTree(cloud.positions).query(cloud.positions, k=2)
    spacing = distances[:, 1]
    spacing = spacing[spacing > 0.0]
    if spacing.size == 0:
        raise InvalidInput("cannot estimate a splat radius: all points coincide")
    return 0.5 * float(np.median(spacing))


def _fragments(
    splats: SplatSet, cam: Camera, cfg: RasterConfig
) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.intp], npt.NDArray[np.float64]]:
    """
    Enumerate (pixel, splat, alpha) triples for every footprint pixel.

    Returns:
        Flat pixel index, splat index and alpha of each fragment
    """
    z = splats.centers[:, 2]
    front = np.flatnonzero(z > 0.0)
    empty = (np.zeros(0, np.int64), np.zeros(0, np.intp), np.zeros(0))
    if front.size == 0:
        return empty

    zf = z[front]
    u = cam.fx * splats.centers[front, 0] / zf + cam.cx
    v = cam.fy * splats.centers[front, 1] / zf + cam.cy
    sigma_px = splats.radii[front] * 0.5 * (cam.fx + cam.fy) / zf
    reach = cfg.gaussian_cutoff * sigma_px
    cap = max(cam.width, cam.height) + 1
    half = np.minimum(np.ceil(reach), cap).astype(np.int64)

    pixels: list[npt.NDArray[np.int64]] = []
    owners: list[npt.NDArray[np.intp]] = []
    alphas: list[npt.NDArray[np.float64]] = []
    for h in np.unique(half).tolist():
        members = np.flatnonzero(half == h)
        steps = np.arange(-h, h + 2)
        dx, dy = np.meshgrid(steps, steps, indexing="xy")
        dx, dy = dx.reshape(1, -1), dy.reshape(1, -1)
        batch = max(1, _FRAGMENT_BUDGET // dx.size)
        for start in range(0, members.size, batch):
            idx = members[start : start + batch]
            xs = np.floor(u[idx])[:, None].astype(np.int64) + dx
            ys = np.floor(v[idx])[:, None].astype(np.int64) + dy
            d2 = (xs - u[idx, None]) ** 2 + (ys - v[idx, None]) ** 2
            hit = d2 <= reach[idx, None] ** 2
            hit &= (xs >= 0) & (xs < cam.width) & (ys >= 0) & (ys < cam.height)
            rows, cols = np.nonzero(hit)
            owner = idx[rows]
            s2 = sigma_px[owner] ** 2
            pixels.append(ys[rows, cols] * cam.width + xs[rows, cols])
            owners.append(front[owner])
            alphas.append(splats.opacities[front[owner]] * np.exp(-d2[rows, cols] / (2.0 * s2)))

    if not pixels:
        return empty
    return np.concatenate(pixels), np.concatenate(owners), np.concatenate(alphas)


def render(splats: SplatSet, cam: Camera, cfg: RasterConfig | None = None) -> RenderOutput:
    """
    Alpha-composite splats into colour, depth and accumulated opacity.

    Args:
        splats: Splats in the camera frame; those with z <= 0 are skipped
        cam: Camera intrinsics and image size
        cfg: Footprint cutoff and early-exit threshold

    Returns:
        RenderOutput; pixels no splat reaches are black with depth 0 and alpha 0
    """
    settings = cfg if cfg is not None else RasterConfig()
    n_pixels = cam.width * cam.height
    color = np.zeros((n_pixels, 3))
    depth = np.zeros(n_pixels)
    transmittance = np.ones(n_pixels)

    pixel, owner, alpha = _fragments(splats, cam, settings)
    if pixel.size:
        z = splats.centers[owner, 2]
        rgb = splats.colors[owner]
        order = np.lexsort((alpha, rgb[:, 2], rgb[:, 1], rgb[:, 0], z, pixel))
        pixel, alpha, z, rgb = pixel[order], alpha[order], z[order], rgb[order]

        # rank of each fragment within its pixel, front to back
        starts = np.flatnonzero(np.r_[True, pixel[1:] != pixel[:-1]])
        run = np.diff(np.r_[starts, pixel.size])
        rank = np.arange(pixel.size) - np.repeat(starts, run)
        by_rank = np.argsort(rank, kind="stable")
        bounds = np.r_[0, np.cumsum(np.bincount(rank))]

        for r in range(bounds.size - 1):
            layer = by_rank[bounds[r] : bounds[r + 1]]
            px = pixel[layer]
            live = transmittance[px] >= settings.alpha_epsilon
            layer, px = layer[live], px[live]
            if layer.size == 0:
                break
            weight = alpha[layer] * transmittance[px]
            color[px] += rgb[layer] * weight[:, None]
            depth[px] += z[layer] * weight
            transmittance[px] *= 1.0 - alpha[layer]

        logger.debug(
            f"Composited {pixel.size} fragments from {len(splats)} splats, "
            f"max depth complexity {bounds.size - 1}"
        )

    shape = cam.shape
    return RenderOutput(
        color=ImageRGB(np.clip(color, 0.0, 1.0).reshape(*shape, 3)),
        depth=DepthMap(depth.reshape(shape)),
        alpha=np.clip(1.0 - transmittance, 0.0, 1.0).reshape(shape),
    )
