"""
Silhouette and depth rasterization of projected geometry.

A silhouette is the binary footprint of a projected object with no shading.
Meshes are scanline filled: a pixel is set when its center lies inside a
triangle or on one of its edges, whatever the triangle's winding.
Point-only geometry is drawn as discs of radius ``splat_px`` pixels.

The silhouette fill works on row spans of all triangles at once. The depth
buffer needs barycentric weights, so it processes triangles in groups sharing
a bounding rectangle, sized to keep the per-group work below a fixed pixel
budget.
"""

from collections.abc import Iterator

import numpy as np
import numpy.typing as npt

from endofuse.types import (
    BinaryMask,
    Camera,
    DepthMap,
    InvalidInput,
    MaskSemantics,
    ProjectedPoints,
    RasterConfig,
)

# Upper bound on triangles x rectangle pixels evaluated at once
_PIXEL_BUDGET = 1 << 21


def _as_projected(projected: ProjectedPoints | npt.ArrayLike) -> ProjectedPoints:
    if isinstance(projected, ProjectedPoints):
        return projected
    triples = np.asarray(projected, dtype=np.float64).reshape(-1, 3)
    return ProjectedPoints(uv=triples[:, :2], z=triples[:, 2], in_front=triples[:, 2] > 0.0)


def _front_faces(projected: ProjectedPoints, faces: npt.ArrayLike) -> npt.NDArray[np.int64]:
    """Faces whose three vertices all lie in front of the camera."""
    f = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
    if f.size and (f.min() < 0 or f.max() >= len(projected)):
        raise InvalidInput(f"face index out of range for {len(projected)} projected vertices")
    keep = np.all(projected.in_front[f], axis=1)
    result: npt.NDArray[np.int64] = f[keep]
    return result


def _triangle_groups(
    uv: npt.NDArray[np.float64],
    faces: npt.NDArray[np.int64],
    width: int,
    height: int,
) -> Iterator[tuple[int, int, int, int, npt.NDArray[np.int64], npt.NDArray[np.float64]]]:
    """
    Yield barycentric weights of pixel centers for groups of triangles.

    Each item is (row0, row1, col0, col1, face_index, weights) where the
    rectangle bounds are inclusive and weights has shape T x 3 x h x w. A pixel
    center lies in triangle t exactly when weights[t, :, y, x] are all >= 0.
    Degenerate (zero-area) triangles and triangles covering no pixel center
    are skipped.
    """
    a = uv[faces[:, 0]]
    b = uv[faces[:, 1]]
    c = uv[faces[:, 2]]
    area = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])

    corners = np.stack([a, b, c], axis=1)
    col_lo = np.maximum(np.ceil(corners[:, :, 0].min(axis=1)), 0).astype(np.int64)
    col_hi = np.minimum(np.floor(corners[:, :, 0].max(axis=1)), width - 1).astype(np.int64)
    row_lo = np.maximum(np.ceil(corners[:, :, 1].min(axis=1)), 0).astype(np.int64)
    row_hi = np.minimum(np.floor(corners[:, :, 1].max(axis=1)), height - 1).astype(np.int64)
    usable = (area != 0.0) & (col_lo <= col_hi) & (row_lo <= row_hi)

    def flush(
        members: list[int], r0: int, r1: int, c0: int, c1: int
    ) -> tuple[int, int, int, int, npt.NDArray[np.int64], npt.NDArray[np.float64]]:
        index = np.asarray(members, dtype=np.int64)
        px = np.arange(c0, c1 + 1, dtype=np.float64)[None, None, :]
        py = np.arange(r0, r1 + 1, dtype=np.float64)[None, :, None]
        ax, ay = a[index, 0, None, None], a[index, 1, None, None]
        bx, by = b[index, 0, None, None], b[index, 1, None, None]
        cx, cy = c[index, 0, None, None], c[index, 1, None, None]
        inv_area = 1.0 / area[index, None, None]
        w0 = ((cx - bx) * (py - by) - (cy - by) * (px - bx)) * inv_area
        w1 = ((ax - cx) * (py - cy) - (ay - cy) * (px - cx)) * inv_area
        w2 = ((bx - ax) * (py - ay) - (by - ay) * (px - ax)) * inv_area
        return r0, r1, c0, c1, index, np.stack([w0, w1, w2], axis=1)

    members: list[int] = []
    bounds = (0, 0, 0, 0)
    for t in np.flatnonzero(usable).tolist():
        tri = (int(row_lo[t]), int(row_hi[t]), int(col_lo[t]), int(col_hi[t]))
        if members:
            merged = (
                min(bounds[0], tri[0]),
                max(bounds[1], tri[1]),
                min(bounds[2], tri[2]),
                max(bounds[3], tri[3]),
            )
            pixels = (merged[1] - merged[0] + 1) * (merged[3] - merged[2] + 1)
            if (len(members) + 1) * pixels > _PIXEL_BUDGET:
                yield flush(members, *bounds)
                members, bounds = [t], tri
            else:
                members.append(t)
                bounds = merged
        else:
            members, bounds = [t], tri
    if members:
        yield flush(members, *bounds)


def _triangle_spans(
    uv: npt.NDArray[np.float64],
    faces: npt.NDArray[np.int64],
    width: int,
    height: int,
) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64], npt.NDArray[np.int64]]:
    """
    Scanline spans of pixel centers covered by closed triangles.

    For every triangle and every pixel row it crosses, the row's center line
    meets the triangle in one closed interval [x_lo, x_hi]; the covered
    columns are ceil(x_lo) .. floor(x_hi). Zero-area triangles are skipped.

    Returns:
        (rows, first, last): one entry per non-empty span, columns inclusive
        and clipped to the image
    """
    none = np.zeros(0, dtype=np.int64)
    a = uv[faces[:, 0]]
    b = uv[faces[:, 1]]
    c = uv[faces[:, 2]]
    area = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])

    corners = np.stack([a, b, c], axis=1)
    row_lo = np.maximum(np.ceil(corners[:, :, 1].min(axis=1)), 0).astype(np.int64)
    row_hi = np.minimum(np.floor(corners[:, :, 1].max(axis=1)), height - 1).astype(np.int64)
    usable = (area != 0.0) & (row_lo <= row_hi)
    if not usable.any():
        return none, none, none

    corners, row_lo = corners[usable], row_lo[usable]
    counts = row_hi[usable] - row_lo + 1
    ticks = np.arange(int(counts.max()), dtype=np.int64)
    rows = row_lo[:, None] + ticks[None, :]
    in_range = ticks[None, :] < counts[:, None]

    # edges p -> q against scanlines y; shapes T x R x 3
    y = rows.astype(np.float64)[:, :, None]
    p = corners[:, None, :, :]
    q = np.roll(corners, -1, axis=1)[:, None, :, :]
    px, py, qx, qy = p[..., 0], p[..., 1], q[..., 0], q[..., 1]
    crosses = (y >= np.minimum(py, qy)) & (y <= np.maximum(py, qy))
    flat = py == qy
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(flat, 0.0, (y - py) / (qy - py))
    x = px + t * (qx - px)
    x_lo = np.where(crosses, np.where(flat, np.minimum(px, qx), x), np.inf).min(axis=2)
    x_hi = np.where(crosses, np.where(flat, np.maximum(px, qx), x), -np.inf).max(axis=2)

    first = np.clip(np.ceil(x_lo), 0, width).astype(np.int64)
    last = np.clip(np.floor(x_hi), -1, width - 1).astype(np.int64)
    keep = in_range & (first <= last)
    return rows[keep], first[keep], last[keep]


def _fill_spans(
    rows: npt.NDArray[np.int64],
    first: npt.NDArray[np.int64],
    last: npt.NDArray[np.int64],
    width: int,
    height: int,
) -> npt.NDArray[np.bool_]:
    """Union of inclusive row spans, via a running count of span starts and ends."""
    stride = width + 1
    size = height * stride
    opened = np.bincount(rows * stride + first, minlength=size)
    closed = np.bincount(rows * stride + last + 1, minlength=size)
    depth = np.cumsum((opened - closed).reshape(height, stride), axis=1)
    result: npt.NDArray[np.bool_] = depth[:, :width] > 0
    return result


def _stamp_discs(
    uv: npt.NDArray[np.float64], radius: float, width: int, height: int
) -> npt.NDArray[np.bool_]:
    """Set every pixel whose center is within ``radius`` of a point."""
    canvas = np.zeros((height, width), dtype=np.bool_)
    if uv.shape[0] == 0:
        return canvas
    reach = int(np.ceil(radius))
    steps = np.arange(-reach, reach + 2)
    dx, dy = np.meshgrid(steps, steps, indexing="xy")
    dx, dy = dx.reshape(1, -1), dy.reshape(1, -1)

    chunk = max(1, _PIXEL_BUDGET // dx.size)
    for start in range(0, uv.shape[0], chunk):
        part = uv[start : start + chunk]
        base = np.floor(part).astype(np.int64)
        xs = base[:, 0:1] + dx
        ys = base[:, 1:2] + dy
        hit = (xs - part[:, 0:1]) ** 2 + (ys - part[:, 1:2]) ** 2 <= radius * radius
        hit &= (xs >= 0) & (xs < width) & (ys >= 0) & (ys < height)
        canvas[ys[hit], xs[hit]] = True
    return canvas


def rasterize_silhouette(
    projected: ProjectedPoints | npt.ArrayLike,
    cam: Camera,
    cfg: RasterConfig | None = None,
    faces: npt.ArrayLike | None = None,
) -> BinaryMask:
    """
    Rasterize the silhouette of projected geometry.

    Args:
        projected: ProjectedPoints or N x 3 (u, v, z) rows
        cam: Camera giving the image size
        cfg: Raster settings (disc radius for point mode)
        faces: Optional F x 3 vertex indices; triangles with a vertex behind
            the camera are dropped

    Returns:
        A TOOL-semantics mask clipped to the image bounds

    Examples:
        >>> cam = Camera(fx=100, fy=100, cx=50, cy=50, width=100, height=100)
        >>> rasterize_silhouette(np.array([[50.0, 50.0, 1.0]]), cam).count
        5
    """
    settings = cfg if cfg is not None else RasterConfig()
    points = _as_projected(projected)

    if faces is None:
        canvas = _stamp_discs(points.uv[points.in_front], settings.splat_px, cam.width, cam.height)
        return BinaryMask(canvas, MaskSemantics.TOOL)

    front = _front_faces(points, faces)
    rows, first, last = _triangle_spans(points.uv, front, cam.width, cam.height)
    canvas = _fill_spans(rows, first, last, cam.width, cam.height)
    return BinaryMask(canvas, MaskSemantics.TOOL)


def rasterize_depth(
    projected: ProjectedPoints | npt.ArrayLike,
    faces: npt.ArrayLike,
    cam: Camera,
) -> tuple[DepthMap, BinaryMask]:
    """
    Z-buffer rasterization of a triangle mesh.

    Depth is interpolated perspective-correctly: 1/z is linear in screen space,
    so each covered pixel gets 1 / sum(w_i / z_i) over the barycentric weights
    w_i of its triangle, and the nearest triangle wins.

    Args:
        projected: Projected mesh vertices
        faces: F x 3 vertex indices
        cam: Camera giving the image size

    Returns:
        (depth, coverage): camera-frame depth (0 where nothing was drawn) and
        the TOOL-semantics mask of covered pixels
    """
    points = _as_projected(projected)
    front = _front_faces(points, faces)
    zbuffer = np.full(cam.shape, np.inf)
    inverse_z = np.where(points.in_front, 1.0 / np.where(points.in_front, points.z, 1.0), 0.0)

    for r0, r1, c0, c1, index, weights in _triangle_groups(
        points.uv, front, cam.width, cam.height
    ):
        inside = np.all(weights >= 0.0, axis=1)
        corner_inv = inverse_z[front[index]][:, :, None, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            depth = 1.0 / np.sum(weights * corner_inv, axis=1)
        depth = np.where(inside, depth, np.inf).min(axis=0)
        window = zbuffer[r0 : r1 + 1, c0 : c1 + 1]
        np.minimum(window, depth, out=window)

    covered = np.isfinite(zbuffer)
    return DepthMap(np.where(covered, zbuffer, 0.0)), BinaryMask(covered, MaskSemantics.TOOL)
