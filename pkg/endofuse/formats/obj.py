"""
Wavefront OBJ meshes and tool-model loading.

Only geometry is read: ``v`` records (x y z, an optional w is ignored) and
``f`` records whose references may take the forms i, i/t, i//n or i/t/n.
Indices are 1-based; negative indices count back from the last vertex defined
so far. Polygons are fan-triangulated. Every other record type is skipped.
"""

import logging
from pathlib import Path

import numpy as np

from endofuse.formats.atomic import atomic_path
from endofuse.formats.ply import read_ply_geometry
from endofuse.types import InvalidInput, MeshFormatError, PointCloud, TriangleMesh

logger = logging.getLogger(__name__)


def _vertex_index(token: str, vertex_count: int) -> int:
    """Resolve one face reference to a 0-based vertex index."""
    raw = int(token.split("/", 1)[0])
    if raw == 0:
        raise ValueError("vertex index 0 is not valid in OBJ")
    return raw - 1 if raw > 0 else vertex_count + raw


def decode_obj(data: bytes, path: Path | None = None) -> TriangleMesh:
    """
    Parse OBJ bytes into a triangle mesh.

    Raises:
        MeshFormatError: With the 1-based line and byte offset of the bad record
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as err:
        raise MeshFormatError("file is not UTF-8 text", path, byte_offset=err.start) from err

    vertices: list[tuple[float, float, float]] = []
    triangles: list[tuple[int, int, int]] = []
    triangle_lines: list[tuple[int, int]] = []
    offset = 0
    for number, line in enumerate(text.splitlines(keepends=True), start=1):
        start = offset
        offset += len(line.encode("utf-8"))
        fields = line.split("#", 1)[0].split()
        if not fields:
            continue
        record, args = fields[0], fields[1:]

        if record == "v":
            try:
                if len(args) < 3:
                    raise ValueError(f"expected 3 coordinates, got {len(args)}")
                x, y, z = (float(a) for a in args[:3])
            except ValueError as err:
                raise MeshFormatError(f"bad vertex: {err}", path, number, start) from err
            if not np.all(np.isfinite((x, y, z))):
                raise MeshFormatError("vertex coordinates must be finite", path, number, start)
            vertices.append((x, y, z))

        elif record == "f":
            if len(args) < 3:
                raise MeshFormatError(
                    f"face needs at least 3 vertices, got {len(args)}", path, number, start
                )
            try:
                corners = [_vertex_index(a, len(vertices)) for a in args]
            except ValueError as err:
                raise MeshFormatError(f"bad face reference: {err}", path, number, start) from err
            for k in range(1, len(corners) - 1):
                triangles.append((corners[0], corners[k], corners[k + 1]))
                triangle_lines.append((number, start))

    for (a, b, c), (number, start) in zip(triangles, triangle_lines, strict=True):
        for index in (a, b, c):
            if not 0 <= index < len(vertices):
                raise MeshFormatError(
                    f"face references vertex {index + 1} but only {len(vertices)} exist",
                    path,
                    number,
                    start,
                )

    try:
        return TriangleMesh(
            np.asarray(vertices, dtype=np.float64).reshape(-1, 3),
            np.asarray(triangles, dtype=np.int64).reshape(-1, 3),
        )
    except InvalidInput as err:
        raise MeshFormatError(str(err), path) from err


def read_obj(path: Path | str) -> TriangleMesh:
    """Read an OBJ file as a triangle mesh."""
    source = Path(path)
    mesh = decode_obj(source.read_bytes(), source)
    logger.debug(f"Read {len(mesh)} vertices, {mesh.faces.shape[0]} triangles from {source}")
    return mesh


def write_obj(mesh: TriangleMesh, path: Path | str) -> None:
    """Write a mesh as OBJ, atomically, with coordinates at full precision."""
    lines = [f"v {x!r} {y!r} {z!r}" for x, y, z in mesh.vertices.tolist()]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.faces.tolist()]
    with atomic_path(path) as tmp:
        tmp.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_mesh(path: Path | str) -> TriangleMesh:
    """
    Read a triangle mesh from OBJ or PLY, chosen by file suffix.

    Raises:
        MeshFormatError: If the file has no faces or an unknown suffix
    """
    source = Path(path)
    suffix = source.suffix.lower()
    if suffix == ".obj":
        return read_obj(source)
    if suffix == ".ply":
        geometry = read_ply_geometry(source)
        if not isinstance(geometry, TriangleMesh):
            raise MeshFormatError("PLY file has no face element", source)
        return geometry
    raise MeshFormatError(f"unsupported mesh format {suffix!r} (expected .obj or .ply)", source)


def read_tool_geometry(path: Path | str) -> PointCloud | TriangleMesh:
    """A tool model: OBJ meshes, or PLY files as meshes or bare vertex clouds."""
    source = Path(path)
    if source.suffix.lower() == ".ply":
        return read_ply_geometry(source)
    return read_mesh(source)
