"""
Geometric type definitions for endofuse.

Cameras, rigid transforms, point clouds, triangle meshes and the orthographic
normalization matrix. All types are frozen dataclasses whose numpy payloads are
marked read-only at construction, so a value never changes once built.

Conventions: the camera looks down +z with x to the right and y down; pixel
(u, v) has its center at integer coordinates (u, v); a RigidTransform used as a
camera pose maps camera-frame points into the scene frame.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from endofuse.constants import ROTATION_TOLERANCE
from endofuse.types.errors import DimensionMismatch, InvalidInput

FloatArray = npt.NDArray[np.float64]
IntArray = npt.NDArray[np.int64]
BoolArray = npt.NDArray[np.bool_]


def _frozen(array: npt.ArrayLike, dtype: type, shape_tail: tuple[int, ...], name: str) -> np.ndarray:
    """Copy ``array`` into a read-only array of ``dtype`` with the expected trailing shape."""
    result = np.array(array, dtype=dtype, copy=True)
    if result.size == 0 and shape_tail:
        result = result.reshape((0, *shape_tail))
    if result.ndim != 1 + len(shape_tail) or result.shape[1:] != shape_tail:
        expected = "N x " + " x ".join(str(s) for s in shape_tail) if shape_tail else "N"
        raise InvalidInput(f"{name} must have shape {expected}, got {result.shape}")
    result.setflags(write=False)
    return result


@dataclass(frozen=True)
class Camera:
    """
    Pinhole intrinsics and image size.

    Attributes:
        fx: Focal length along x, in pixels
        fy: Focal length along y, in pixels
        cx: Principal point x, in pixels
        cy: Principal point y, in pixels
        width: Image width in pixels
        height: Image height in pixels
    """

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self) -> None:
        """Validate intrinsics and image size."""
        if not (self.fx > 0 and self.fy > 0):
            raise InvalidInput(f"focal lengths must be positive, got fx={self.fx}, fy={self.fy}")
        if self.width < 1 or self.height < 1:
            raise InvalidInput(
                f"image size must be at least 1x1, got {self.width}x{self.height}"
            )
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise InvalidInput(
                f"principal point ({self.cx}, {self.cy}) lies outside the "
                f"{self.width}x{self.height} image"
            )

    @property
    def shape(self) -> tuple[int, int]:
        """Image shape as (height, width)."""
        return (self.height, self.width)

    @property
    def intrinsic_matrix(self) -> FloatArray:
        """The 3x3 matrix K."""
        return np.array(
            [[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]],
            dtype=np.float64,
        )

    def check_shape(self, name: str, shape: tuple[int, ...]) -> None:
        """Raise DimensionMismatch if a 2D input's (height, width) differs from the camera's."""
        actual = (int(shape[0]), int(shape[1]))
        if actual != self.shape:
            raise DimensionMismatch(name, self.shape, actual)


@dataclass(frozen=True, eq=False)
class RigidTransform:
    """
    A rotation followed by a translation: p -> R p + t.

    Attributes:
        rotation: 3x3 orthonormal matrix with determinant +1
        translation: 3-vector in scene units
        tolerance: Allowed deviation from orthonormality at construction
    """

    rotation: FloatArray
    translation: FloatArray
    tolerance: float = field(default=ROTATION_TOLERANCE, repr=False)

    def __post_init__(self) -> None:
        """Freeze payloads and check the rotation block."""
        rotation = np.array(self.rotation, dtype=np.float64, copy=True)
        translation = np.array(self.translation, dtype=np.float64, copy=True).reshape(-1)
        if rotation.shape != (3, 3):
            raise InvalidInput(f"rotation must be 3x3, got {rotation.shape}")
        if translation.shape != (3,):
            raise InvalidInput(f"translation must be a 3-vector, got {translation.shape}")
        if not (np.all(np.isfinite(rotation)) and np.all(np.isfinite(translation))):
            raise InvalidInput("rigid transform entries must be finite")

        deviation = float(np.max(np.abs(rotation.T @ rotation - np.eye(3))))
        if deviation > self.tolerance:
            raise InvalidInput(
                f"rotation is not orthonormal: max |R^T R - I| = {deviation:.3e} "
                f"exceeds {self.tolerance:.1e}"
            )
        determinant = float(np.linalg.det(rotation))
        if abs(determinant - 1.0) > self.tolerance:
            raise InvalidInput(
                f"rotation must have determinant 1, got {determinant:.12f}"
            )

        rotation.setflags(write=False)
        translation.setflags(write=False)
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "translation", translation)

    @classmethod
    def identity(cls) -> RigidTransform:
        """The transform that leaves every point unchanged."""
        return cls(rotation=np.eye(3), translation=np.zeros(3))

    @classmethod
    def from_matrix(
        cls, matrix: npt.ArrayLike, tolerance: float = ROTATION_TOLERANCE
    ) -> RigidTransform:
        """
        Build a transform from a 4x4 row-major homogeneous matrix.

        Args:
            matrix: 4x4 matrix whose top-left block is R and last column is t
            tolerance: Allowed deviation from orthonormality

        Raises:
            InvalidInput: If the matrix is not 4x4 or the bottom row is not (0, 0, 0, 1)
        """
        m = np.asarray(matrix, dtype=np.float64)
        if m.shape != (4, 4):
            raise InvalidInput(f"pose matrix must be 4x4, got {m.shape}")
        if not np.allclose(m[3], [0.0, 0.0, 0.0, 1.0], atol=tolerance):
            raise InvalidInput(f"pose matrix bottom row must be [0, 0, 0, 1], got {m[3].tolist()}")
        return cls(rotation=m[:3, :3], translation=m[:3, 3], tolerance=tolerance)

    @property
    def matrix(self) -> FloatArray:
        """The 4x4 homogeneous matrix, column-vector convention."""
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.translation
        return m

    def inverse(self) -> RigidTransform:
        """The transform undoing this one: p -> R^T (p - t)."""
        rotation_t = self.rotation.T
        return RigidTransform(
            rotation=rotation_t,
            translation=-(rotation_t @ self.translation),
            tolerance=self.tolerance,
        )

    def apply(self, points: npt.ArrayLike) -> FloatArray:
        """Apply the transform to an N x 3 array of points."""
        p = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        result: FloatArray = p @ self.rotation.T + self.translation
        return result

    def is_identity(self) -> bool:
        """True when rotation is exactly I and translation exactly zero."""
        return bool(
            np.array_equal(self.rotation, np.eye(3)) and not np.any(self.translation)
        )


@dataclass(frozen=True, eq=False)
class PointCloud:
    """
    An unordered set of 3D points with optional per-point colour.

    Attributes:
        positions: N x 3 coordinates in scene units
        colors: Optional N x 3 RGB values in [0, 1]
    """

    positions: FloatArray
    colors: FloatArray | None = None

    def __post_init__(self) -> None:
        """Freeze payloads and check finiteness and colour range."""
        positions = _frozen(self.positions, np.float64, (3,), "positions")
        if not np.all(np.isfinite(positions)):
            raise InvalidInput("point cloud positions must be finite")
        object.__setattr__(self, "positions", positions)

        if self.colors is not None:
            colors = _frozen(self.colors, np.float64, (3,), "colors")
            if colors.shape[0] != positions.shape[0]:
                raise InvalidInput(
                    f"colors length {colors.shape[0]} does not match "
                    f"positions length {positions.shape[0]}"
                )
            if not np.all(np.isfinite(colors)) or np.any(colors < 0.0) or np.any(colors > 1.0):
                raise InvalidInput("point colours must be finite and within [0, 1]")
            object.__setattr__(self, "colors", colors)

    @classmethod
    def empty(cls, with_colors: bool = False) -> PointCloud:
        """A cloud with no points."""
        return cls(np.zeros((0, 3)), np.zeros((0, 3)) if with_colors else None)

    @classmethod
    def concatenate(
        cls,
        clouds: Sequence[PointCloud],
        fill_color: tuple[float, float, float] | None = None,
    ) -> PointCloud:
        """
        Join clouds in order.

        If some clouds carry colours and others do not, the uncoloured ones are
        filled with ``fill_color``; without a fill colour the result is uncoloured.

        Args:
            clouds: Clouds to join
            fill_color: Colour for points of uncoloured clouds in a mixed join

        Returns:
            A cloud holding every input point in input order
        """
        if not clouds:
            return cls.empty()
        positions = np.concatenate([c.positions for c in clouds], axis=0)
        any_colored = any(c.colors is not None for c in clouds)
        all_colored = all(c.colors is not None for c in clouds)
        if not any_colored or (not all_colored and fill_color is None):
            return cls(positions)
        parts = [
            c.colors if c.colors is not None else np.tile(np.asarray(fill_color), (len(c), 1))
            for c in clouds
        ]
        return cls(positions, np.concatenate(parts, axis=0))

    def __len__(self) -> int:
        return int(self.positions.shape[0])

    @property
    def is_empty(self) -> bool:
        """True when the cloud holds no points."""
        return len(self) == 0

    def centroid(self) -> FloatArray:
        """Mean position; raises InvalidInput on an empty cloud."""
        if self.is_empty:
            raise InvalidInput("centroid of an empty point cloud is undefined")
        result: FloatArray = self.positions.mean(axis=0)
        return result

    def aabb(self) -> tuple[FloatArray, FloatArray]:
        """Axis-aligned bounding box as (min corner, max corner)."""
        if self.is_empty:
            raise InvalidInput("bounding box of an empty point cloud is undefined")
        return self.positions.min(axis=0), self.positions.max(axis=0)

    def subset(self, selection: npt.ArrayLike) -> PointCloud:
        """Points selected by a boolean mask or index array, colours carried along."""
        index = np.asarray(selection)
        colors = self.colors[index] if self.colors is not None else None
        return PointCloud(self.positions[index], colors)


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    """
    An indexed triangle mesh, typically a tool model.

    Attributes:
        vertices: V x 3 coordinates in scene (or model) units
        faces: F x 3 vertex indices
    """

    vertices: FloatArray
    faces: IntArray

    def __post_init__(self) -> None:
        """Freeze payloads and check face indices."""
        vertices = _frozen(self.vertices, np.float64, (3,), "vertices")
        faces = _frozen(self.faces, np.int64, (3,), "faces")
        if not np.all(np.isfinite(vertices)):
            raise InvalidInput("mesh vertices must be finite")
        if faces.size:
            if faces.min() < 0 or faces.max() >= vertices.shape[0]:
                raise InvalidInput(
                    f"face index out of range for {vertices.shape[0]} vertices "
                    f"(found indices {int(faces.min())}..{int(faces.max())})"
                )
            degenerate = (faces[:, 0] == faces[:, 1]) & (faces[:, 1] == faces[:, 2])
            if np.any(degenerate):
                first = int(np.flatnonzero(degenerate)[0])
                raise InvalidInput(f"face {first} repeats vertex {int(faces[first, 0])} three times")
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "faces", faces)

    def __len__(self) -> int:
        return int(self.vertices.shape[0])

    def to_pointcloud(self) -> PointCloud:
        """The mesh vertices as an uncoloured point cloud."""
        return PointCloud(self.vertices)

    def with_vertices(self, vertices: npt.ArrayLike) -> TriangleMesh:
        """Same connectivity, new vertex positions."""
        return TriangleMesh(np.asarray(vertices, dtype=np.float64), self.faces)

    def transformed(self, scale: float, offset: npt.ArrayLike) -> TriangleMesh:
        """Vertices mapped by v -> scale * v + offset; scale must be positive."""
        if not scale > 0:
            raise InvalidInput(f"scale must be positive, got {scale}")
        shift = np.asarray(offset, dtype=np.float64).reshape(3)
        return self.with_vertices(scale * self.vertices + shift)


@dataclass(frozen=True, eq=False)
class OrthoMatrix:
    """
    Orthographic normalization of a bounding box onto [-1, 1]^3.

    Built from the box bounds l, r (x), b, t (y), n, f (z):
    S = diag(2/(r-l), 2/(t-b), -2/(f-n)) and
    t = (-(r+l)/(r-l), -(t+b)/(t-b), -(f+n)/(f-n)).

    The assembled matrix uses the column-vector convention M_o @ [x, y, z, 1]^T,
    with the offset in the last column. The row-vector form (offset in the bottom
    row, applied as [x, y, z, 1] @ M) is its transpose and is exposed as
    ``row_vector_matrix``.

    Attributes:
        scale: Diagonal of S
        offset: The offset vector t
    """

    scale: FloatArray
    offset: FloatArray

    def __post_init__(self) -> None:
        scale = _frozen(np.reshape(self.scale, (1, 3)), np.float64, (3,), "scale")[0]
        offset = _frozen(np.reshape(self.offset, (1, 3)), np.float64, (3,), "offset")[0]
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "offset", offset)

    @property
    def matrix(self) -> FloatArray:
        """The 4x4 matrix M_o in column-vector convention."""
        m = np.diag([*self.scale.tolist(), 1.0])
        m[:3, 3] = self.offset
        return m

    @property
    def row_vector_matrix(self) -> FloatArray:
        """The same transform for row vectors: offset in the bottom row."""
        result: FloatArray = self.matrix.T
        return result

    def apply(self, points: npt.ArrayLike) -> FloatArray:
        """Map N x 3 points into normalized coordinates."""
        p = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        result: FloatArray = p * self.scale + self.offset
        return result


@dataclass(frozen=True, eq=False)
class ProjectedPoints:
    """
    Result of a perspective projection.

    Attributes:
        uv: N x 2 pixel coordinates (meaningful only where in_front is True)
        z: Camera-frame depth of every input point
        in_front: True for points with z > 0
    """

    uv: FloatArray
    z: FloatArray
    in_front: BoolArray

    def __post_init__(self) -> None:
        z = np.array(self.z, dtype=np.float64, copy=True).reshape(-1)
        uv = np.array(self.uv, dtype=np.float64, copy=True).reshape(-1, 2)
        in_front = np.array(self.in_front, dtype=np.bool_, copy=True).reshape(-1)
        if uv.shape[0] != z.shape[0] or in_front.shape[0] != z.shape[0]:
            raise InvalidInput(
                f"projection arrays disagree in length: uv={uv.shape[0]}, "
                f"z={z.shape[0]}, in_front={in_front.shape[0]}"
            )
        for name, array in (("uv", uv), ("z", z), ("in_front", in_front)):
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    def __len__(self) -> int:
        return int(self.z.shape[0])

    @property
    def behind_count(self) -> int:
        """Number of points excluded for lying at or behind the camera plane."""
        return int(np.count_nonzero(~self.in_front))

    def triples(self) -> FloatArray:
        """The in-front points as an M x 3 array of (u, v, z) rows."""
        keep = self.in_front
        return np.column_stack([self.uv[keep], self.z[keep]]).reshape(-1, 3)
