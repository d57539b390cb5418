"""
Custom exception hierarchy for endofuse.

Input-side errors (bad files, mismatched dimensions, invalid configuration)
derive from InvalidInput or InvalidConfiguration; errors raised while computing
on well-formed inputs (degenerate geometry, undefined correlation) derive from
GeometryError or EndofuseError directly. The CLI maps the two families onto
different exit codes.
"""

from pathlib import Path


class EndofuseError(Exception):
    """Root of every error raised by endofuse."""

    pass


class InvalidInput(EndofuseError, ValueError):
    """
    Raised when an input violates a documented precondition or invariant.

    This includes errors such as:
    - Non-finite coordinates in a point cloud
    - Mask values outside {0, 1}
    - A rotation matrix that is not orthonormal
    """

    pass


class DimensionMismatch(InvalidInput):
    """
    Raised when 2D inputs that must share a size do not.

    Attributes:
        input_name: Name of the offending input (e.g. "depth")
        expected: Expected (height, width)
        actual: Actual (height, width)
    """

    def __init__(
        self, input_name: str, expected: tuple[int, int], actual: tuple[int, int]
    ) -> None:
        self.input_name = input_name
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"{input_name} has dimensions {actual[0]}x{actual[1]} (HxW), "
            f"expected {expected[0]}x{expected[1]}"
        )


class InvalidConfiguration(EndofuseError):
    """
    Raised when a search, raster or camera configuration is invalid.

    This includes errors such as:
    - Non-positive step sizes
    - Shrink factors outside (0, 1)
    - Unknown keys in a JSON configuration document
    """

    pass


class SceneFormatError(InvalidInput):
    """
    Raised when an external artifact cannot be parsed.

    Attributes:
        path: File being parsed, if known
        byte_offset: Offset into the file where parsing failed, if known
    """

    def __init__(
        self,
        message: str,
        path: Path | str | None = None,
        byte_offset: int | None = None,
    ) -> None:
        self.path = Path(path) if path is not None else None
        self.byte_offset = byte_offset
        location = ""
        if self.path is not None:
            location += f"{self.path}: "
        if byte_offset is not None:
            location += f"byte {byte_offset}: "
        super().__init__(f"{location}{message}")


class PlyFormatError(SceneFormatError):
    """Raised for malformed headers, truncated payloads or missing x/y/z in PLY files."""

    pass


class MeshFormatError(SceneFormatError):
    """
    Raised for malformed OBJ/PLY meshes.

    Attributes:
        line: 1-based line number of the offending OBJ record, if known
    """

    def __init__(
        self,
        message: str,
        path: Path | str | None = None,
        line: int | None = None,
        byte_offset: int | None = None,
    ) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message, path=path, byte_offset=byte_offset)


class ImageFormatError(SceneFormatError):
    """Raised when a PNG has an unsupported bit depth or colour type."""

    pass


class GeometryError(EndofuseError):
    """Raised when computation on well-formed inputs hits a geometric dead end."""

    pass


class DegenerateGeometry(GeometryError):
    """
    Raised when a point set has zero extent on one or more axes.

    Attributes:
        axes: Names of the degenerate axes ("x", "y", "z")
    """

    def __init__(self, axes: tuple[str, ...], context: str = "bounding box") -> None:
        self.axes = axes
        super().__init__(f"degenerate {context}: zero extent on axis {', '.join(axes)}")


class DegenerateTool(GeometryError):
    """Raised when a tool's orthographic projection has zero bounding-box area."""

    pass


class DegenerateMask(GeometryError):
    """Raised when the masked-tissue projection has zero area or no points."""

    pass


class BehindCamera(GeometryError):
    """Raised when a tool lies entirely behind the camera at initialization."""

    pass


class CorrelationUndefined(EndofuseError):
    """
    Raised when the depth correlation term cannot be evaluated.

    Occurs with fewer than 2 valid masked pixels or zero variance in either
    masked depth set.
    """

    pass


class OracleLatticeTooLarge(InvalidConfiguration):
    """Raised when an exhaustive search lattice exceeds the candidate limit."""

    pass
