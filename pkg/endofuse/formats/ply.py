"""
PLY point clouds and meshes.

Reading accepts ASCII and binary little-endian files through plyfile. The
vertex element must carry x, y and z; red/green/blue are optional (integer
channels are divided by 255, float channels are taken as-is), an integer
"label" property is read as per-point provenance, and every other property is
ignored. A "face" element with a vertex_indices (or vertex_index) list makes
the file a mesh; polygons are fan-triangulated.

Every parse failure is raised as PlyFormatError carrying the byte offset at
which parsing stopped, when plyfile reports enough to locate it.

Writers emit binary little-endian by default with x/y/z as doubles, so
positions survive a round trip bit for bit.
"""

import io
import logging
import struct
from pathlib import Path

import numpy as np
import numpy.typing as npt
from plyfile import (
    PlyData,
    PlyElement,
    PlyHeaderParseError,
    PlyListProperty,
    PlyParseError,
)

from endofuse.formats.atomic import atomic_path
from endofuse.types import InvalidInput, MeshFormatError, PlyFormatError, PointCloud, TriangleMesh

logger = logging.getLogger(__name__)

_END_HEADER = b"end_header"
_PARSE_FAILURES = (
    ValueError,
    TypeError,
    IndexError,
    KeyError,
    EOFError,
    UnicodeDecodeError,
    MemoryError,
    OverflowError,
    struct.error,
)


def _header_length(data: bytes) -> int | None:
    """Byte length of the header including the end_header line, if present."""
    position = data.find(_END_HEADER)
    if position < 0:
        return None
    end = data.find(b"\n", position)
    return len(data) if end < 0 else end + 1


def _line_offset(data: bytes, start: int, line: int) -> int:
    """Offset of the 0-based ``line`` counted from ``start``."""
    offset = start
    for _ in range(line):
        newline = data.find(b"\n", offset)
        if newline < 0:
            return len(data)
        offset = newline + 1
    return offset


def _error_offset(data: bytes, err: Exception) -> int | None:
    if isinstance(err, PlyHeaderParseError):
        line = getattr(err, "line", None)
        return _line_offset(data, 0, max(int(line) - 1, 0)) if line else None

    header = _header_length(data)
    row = getattr(err, "row", None)
    element = getattr(err, "element", None)
    if header is None or row is None:
        return header
    if data[:header].find(b"format ascii") >= 0:
        return _line_offset(data, header, int(row))
    fixed_rows = element is not None and not any(
        isinstance(p, PlyListProperty) for p in element.properties
    )
    if fixed_rows:
        return header + int(row) * int(element.dtype().itemsize)
    return header


def _parse(data: bytes, path: Path | None) -> PlyData:
    try:
        return PlyData.read(io.BytesIO(data))
    except PlyParseError as err:
        raise PlyFormatError(str(err), path, _error_offset(data, err)) from err
    except _PARSE_FAILURES as err:
        raise PlyFormatError(
            f"unreadable PLY payload: {err}", path, _header_length(data)
        ) from err


def _vertex_element(ply: PlyData, path: Path | None) -> PlyElement:
    try:
        vertex = ply["vertex"]
    except KeyError as err:
        raise PlyFormatError("no vertex element", path, 0) from err
    names = {p.name for p in vertex.properties}
    missing = [axis for axis in ("x", "y", "z") if axis not in names]
    if missing:
        raise PlyFormatError(f"vertex element lacks {', '.join(missing)}", path, 0)
    return vertex


def _decode_vertices(
    data: bytes, path: Path | None
) -> tuple[PlyData, PointCloud, npt.NDArray[np.int64] | None]:
    ply = _parse(data, path)
    vertex = _vertex_element(ply, path)
    names = {p.name for p in vertex.properties}
    try:
        positions = np.column_stack(
            [np.asarray(vertex[axis], dtype=np.float64) for axis in ("x", "y", "z")]
        ).reshape(-1, 3)

        colors = None
        if {"red", "green", "blue"} <= names:
            channels = [np.asarray(vertex[c]) for c in ("red", "green", "blue")]
            colors = np.column_stack(channels).astype(np.float64).reshape(-1, 3)
            if channels[0].dtype.kind in "iu":
                colors = colors / 255.0

        labels = None
        if "label" in names:
            labels = np.asarray(vertex["label"], dtype=np.int64).reshape(-1)

        cloud = PointCloud(positions, colors)
    except InvalidInput as err:
        raise PlyFormatError(str(err), path, _header_length(data)) from err
    except _PARSE_FAILURES as err:
        raise PlyFormatError(f"bad vertex data: {err}", path, _header_length(data)) from err
    return ply, cloud, labels


def _read_bytes(path: Path | str) -> tuple[bytes, Path]:
    source = Path(path)
    return source.read_bytes(), source


def decode_pointcloud(data: bytes, path: Path | None = None) -> PointCloud:
    """Parse PLY bytes into a point cloud."""
    _, cloud, _ = _decode_vertices(data, path)
    return cloud


def read_pointcloud(path: Path | str) -> PointCloud:
    """
    Read the vertices of a PLY file as a point cloud.

    Raises:
        PlyFormatError: For malformed headers, truncated payloads or missing x/y/z
        OSError: If the file cannot be read
    """
    data, source = _read_bytes(path)
    cloud = decode_pointcloud(data, source)
    logger.debug(f"Read {len(cloud)} points from {source}")
    return cloud


def read_labeled_pointcloud(path: Path | str) -> tuple[PointCloud, npt.NDArray[np.int64] | None]:
    """Read a PLY cloud along with its "label" property, if it has one."""
    data, source = _read_bytes(path)
    _, cloud, labels = _decode_vertices(data, source)
    return cloud, labels


def _fan_triangulate(
    polygons: list[npt.NDArray[np.int64]], path: Path | None
) -> npt.NDArray[np.int64]:
    triangles: list[list[int]] = []
    for index, polygon in enumerate(polygons):
        corners = [int(i) for i in polygon]
        if len(corners) < 3:
            raise MeshFormatError(f"face {index} has {len(corners)} vertices", path)
        for k in range(1, len(corners) - 1):
            triangles.append([corners[0], corners[k], corners[k + 1]])
    return np.asarray(triangles, dtype=np.int64).reshape(-1, 3)


def read_ply_geometry(path: Path | str) -> PointCloud | TriangleMesh:
    """
    Read a PLY file as a mesh when it has faces, otherwise as a point cloud.

    Raises:
        PlyFormatError: For unparseable files
        MeshFormatError: For faces with fewer than 3 or out-of-range indices
    """
    data, source = _read_bytes(path)
    ply, cloud, _ = _decode_vertices(data, source)
    try:
        face = ply["face"]
    except KeyError:
        return cloud

    names = {p.name for p in face.properties}
    key = "vertex_indices" if "vertex_indices" in names else "vertex_index"
    if key not in names:
        raise MeshFormatError("face element lacks a vertex_indices list", source)
    faces = _fan_triangulate([np.asarray(f) for f in face[key]], source)
    try:
        return TriangleMesh(cloud.positions, faces)
    except InvalidInput as err:
        raise MeshFormatError(str(err), source) from err


def write_pointcloud(
    cloud: PointCloud,
    path: Path | str,
    labels: npt.ArrayLike | None = None,
    ascii: bool = False,
) -> None:
    """
    Write a point cloud as PLY, atomically.

    Colours are stored as uchar channels (rounded from [0, 1]); labels, when
    given, as an int property "label".

    Args:
        cloud: Points to write
        path: Destination file
        labels: Optional per-point integer labels
        ascii: Write the ASCII variant instead of binary little-endian
    """
    fields: list[tuple[str, str]] = [("x", "f8"), ("y", "f8"), ("z", "f8")]
    if cloud.colors is not None:
        fields += [("red", "u1"), ("green", "u1"), ("blue", "u1")]
    label_values = None
    if labels is not None:
        label_values = np.asarray(labels, dtype=np.int64).reshape(-1)
        if label_values.shape[0] != len(cloud):
            raise InvalidInput(
                f"labels length {label_values.shape[0]} does not match cloud length {len(cloud)}"
            )
        fields.append(("label", "i4"))

    rows = np.empty(len(cloud), dtype=fields)
    for i, axis in enumerate(("x", "y", "z")):
        rows[axis] = cloud.positions[:, i]
    if cloud.colors is not None:
        quantized = np.rint(cloud.colors * 255.0).astype(np.uint8)
        for i, channel in enumerate(("red", "green", "blue")):
            rows[channel] = quantized[:, i]
    if label_values is not None:
        rows["label"] = label_values

    ply = PlyData([PlyElement.describe(rows, "vertex")], text=ascii, byte_order="<")
    with atomic_path(path) as tmp:
        ply.write(str(tmp))
    logger.debug(f"Wrote {len(cloud)} points to {path}")
