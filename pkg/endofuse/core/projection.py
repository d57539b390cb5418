"""
Projection operations shared by every other module.

Three projections are implemented here:
1. Back-projection: lift masked pixels with valid depth into 3D points
2. Perspective projection: map 3D points to pixel coordinates with depth
3. Orthographic normalization: map a cloud's bounding box onto [-1, 1]

Camera conventions: the camera looks down +z with x to the right and y down,
pixel (u, v) has its center at integer coordinates, and a pose maps
camera-frame points into the scene frame. Depth 0 marks an invalid pixel.
"""

from collections.abc import Sequence

import numpy as np
import numpy.typing as npt

from endofuse.types import (
    BinaryMask,
    Camera,
    DegenerateGeometry,
    DepthMap,
    FrameObservation,
    ImageRGB,
    InvalidInput,
    MaskSemantics,
    OrthoMatrix,
    PointCloud,
    ProjectedPoints,
    RigidTransform,
    TriangleMesh,
)

AXIS_NAMES = ("x", "y", "z")


def back_project(
    image: ImageRGB,
    depth: DepthMap,
    mask: BinaryMask,
    cam: Camera,
    pose: RigidTransform | None = None,
) -> PointCloud:
    """
    Lift every kept pixel with valid depth into a coloured 3D point.

    A pixel (u, v) with depth d becomes pose(d * K^-1 [u, v, 1]^T). Points are
    emitted in row-major pixel order.

    Args:
        image: Observed colour, copied onto each point
        depth: Observed depth; pixels with depth 0 produce no point
        mask: Pixels allowed to contribute (KEEP semantics)
        cam: Camera intrinsics; image, depth and mask must match its size
        pose: Camera-to-scene transform (identity when omitted)

    Returns:
        Coloured point cloud in the scene frame

    Raises:
        DimensionMismatch: If an input's size differs from the camera's
        InvalidInput: If the mask carries TOOL semantics

    Examples:
        >>> cam = Camera(fx=1, fy=1, cx=0, cy=0, width=4, height=4)
        >>> depth = np.zeros((4, 4)); depth[3, 2] = 2.0
        >>> cloud = back_project(ImageRGB.zeros(4, 4), DepthMap(depth), BinaryMask.full(4, 4), cam)
        >>> cloud.positions.tolist()
        [[4.0, 6.0, 2.0]]
    """
    cam.check_shape("image", image.shape)
    cam.check_shape("depth", depth.shape)
    cam.check_shape("mask", mask.shape)
    if mask.semantics is not MaskSemantics.KEEP:
        raise InvalidInput(
            "back_project needs a KEEP mask; pass the complement of the (dilated) tool mask"
        )

    valid = mask.values & (depth.values > 0.0)
    rows, cols = np.nonzero(valid)
    d = depth.values[rows, cols]
    x = (cols - cam.cx) * d / cam.fx
    y = (rows - cam.cy) * d / cam.fy
    positions = np.column_stack([x, y, d])

    if pose is not None and not pose.is_identity():
        positions = pose.apply(positions)
    return PointCloud(positions, image.pixels[rows, cols])


def back_project_frames(frames: Sequence[FrameObservation], cam: Camera) -> PointCloud:
    """
    Back-project several calibrated frames and merge them, in frame order.

    Args:
        frames: Observations sharing the camera intrinsics
        cam: Camera intrinsics

    Returns:
        The union of every frame's back-projection (empty for no frames)
    """
    clouds = [back_project(f.image, f.depth, f.keep, cam, f.pose) for f in frames]
    if not clouds:
        return PointCloud.empty(with_colors=True)
    return PointCloud.concatenate(clouds)


def perspective_project(
    points: PointCloud | npt.ArrayLike,
    cam: Camera,
    pose: RigidTransform | None = None,
) -> ProjectedPoints:
    """
    Project points through the pinhole model.

    Points are first mapped into the camera frame with the inverse of ``pose``.
    A point with camera-frame z <= 0 is flagged as behind the camera; its uv is
    set to 0 and must not be rasterized.

    Args:
        points: Cloud or N x 3 array in the scene frame
        cam: Camera intrinsics
        pose: Camera-to-scene transform (identity when omitted)

    Returns:
        ProjectedPoints with u = fx * x / z + cx and v = fy * y / z + cy

    Examples:
        >>> cam = Camera(fx=100, fy=100, cx=50, cy=50, width=100, height=100)
        >>> perspective_project(np.array([[0.1, 0.2, 1.0]]), cam).triples().tolist()
        [[60.0, 70.0, 1.0]]
    """
    positions = points.positions if isinstance(points, PointCloud) else points
    p = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
    if pose is not None and not pose.is_identity():
        p = pose.inverse().apply(p)

    z = p[:, 2]
    in_front = z > 0.0
    safe_z = np.where(in_front, z, 1.0)
    u = np.where(in_front, cam.fx * p[:, 0] / safe_z + cam.cx, 0.0)
    v = np.where(in_front, cam.fy * p[:, 1] / safe_z + cam.cy, 0.0)
    return ProjectedPoints(uv=np.column_stack([u, v]), z=z, in_front=in_front)


def make_ortho_matrix(cloud: PointCloud | npt.ArrayLike) -> OrthoMatrix:
    """
    Build the orthographic normalization of a cloud's bounding box.

    With bounds l, r (x), b, t (y) and n, f (z) the matrix has
    S = diag(2/(r-l), 2/(t-b), -2/(f-n)) and
    t = (-(r+l)/(r-l), -(t+b)/(t-b), -(f+n)/(f-n)).

    Args:
        cloud: Non-empty cloud (or N x 3 array) with positive extent on every axis

    Returns:
        The OrthoMatrix for the cloud's bounding box

    Raises:
        InvalidInput: If the cloud is empty
        DegenerateGeometry: If the box has zero extent on some axis; the
            exception's ``axes`` names every such axis

    Examples:
        >>> m = make_ortho_matrix(np.array([[0.0, 0.0, 1.0], [2.0, 4.0, 3.0]]))
        >>> m.scale.tolist(), m.offset.tolist()
        ([1.0, 0.5, -1.0], [-1.0, -1.0, -2.0])
    """
    positions = cloud.positions if isinstance(cloud, PointCloud) else cloud
    p = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
    if p.shape[0] == 0:
        raise InvalidInput("cannot build an orthographic matrix for an empty cloud")

    low = p.min(axis=0)
    high = p.max(axis=0)
    extent = high - low
    degenerate = tuple(AXIS_NAMES[i] for i in range(3) if not extent[i] > 0.0)
    if degenerate:
        raise DegenerateGeometry(degenerate, context="orthographic bounding box")

    scale = np.array([2.0 / extent[0], 2.0 / extent[1], -2.0 / extent[2]])
    offset = -(high + low) / extent
    return OrthoMatrix(scale=scale, offset=offset)


def ortho_project(points: PointCloud | npt.ArrayLike, m: OrthoMatrix) -> npt.NDArray[np.float64]:
    """
    Map points through M_o and keep (x', y'); no clipping is applied.

    Args:
        points: Cloud or N x 3 array
        m: Orthographic normalization

    Returns:
        N x 2 array of normalized coordinates
    """
    positions = points.positions if isinstance(points, PointCloud) else points
    projected = m.apply(positions)
    result: npt.NDArray[np.float64] = projected[:, :2]
    return result


def apply_transform(
    points: PointCloud, scale: float, offset: npt.ArrayLike
) -> PointCloud:
    """
    Uniformly scale then translate a cloud: p -> scale * p + offset.

    Colours are carried over unchanged.

    Raises:
        InvalidInput: If scale is not positive or offset is not a 3-vector

    Examples:
        >>> cloud = apply_transform(PointCloud(np.array([[1.0, 1.0, 1.0]])), 2.0, (1, 0, 0))
        >>> cloud.positions.tolist()
        [[3.0, 2.0, 2.0]]
    """
    if not scale > 0:
        raise InvalidInput(f"scale must be positive, got {scale}")
    shift = np.asarray(offset, dtype=np.float64).reshape(-1)
    if shift.shape != (3,):
        raise InvalidInput(f"offset must be a 3-vector, got shape {shift.shape}")
    return PointCloud(scale * points.positions + shift, points.colors)


def transform_geometry(
    geometry: PointCloud | TriangleMesh, scale: float, offset: npt.ArrayLike
) -> PointCloud | TriangleMesh:
    """apply_transform for either a cloud or a mesh, preserving the type."""
    if isinstance(geometry, TriangleMesh):
        return geometry.transformed(scale, offset)
    return apply_transform(geometry, scale, offset)
