"""Type definitions for endofuse."""

from endofuse.types.errors import (
    BehindCamera,
    CorrelationUndefined,
    DegenerateGeometry,
    DegenerateMask,
    DegenerateTool,
    DimensionMismatch,
    EndofuseError,
    GeometryError,
    ImageFormatError,
    InvalidConfiguration,
    InvalidInput,
    MeshFormatError,
    OracleLatticeTooLarge,
    PlyFormatError,
    SceneFormatError,
)
from endofuse.types.geometry import (
    Camera,
    OrthoMatrix,
    PointCloud,
    ProjectedPoints,
    RigidTransform,
    TriangleMesh,
)
from endofuse.types.images import (
    BinaryMask,
    DepthMap,
    FrameObservation,
    ImageRGB,
    MaskSemantics,
)
from endofuse.types.placement import (
    ComposedScene,
    PlacementResult,
    ScaleMode,
    SearchConfig,
    ToolInstance,
)
from endofuse.types.render import RasterConfig, RenderOutput, SplatSet

__all__ = [
    # Geometry
    "Camera",
    "OrthoMatrix",
    "PointCloud",
    "ProjectedPoints",
    "RigidTransform",
    "TriangleMesh",
    # 2D observations
    "BinaryMask",
    "DepthMap",
    "FrameObservation",
    "ImageRGB",
    "MaskSemantics",
    # Placement
    "ComposedScene",
    "PlacementResult",
    "ScaleMode",
    "SearchConfig",
    "ToolInstance",
    # Rendering
    "RasterConfig",
    "RenderOutput",
    "SplatSet",
    # Exceptions
    "BehindCamera",
    "CorrelationUndefined",
    "DegenerateGeometry",
    "DegenerateMask",
    "DegenerateTool",
    "DimensionMismatch",
    "EndofuseError",
    "GeometryError",
    "ImageFormatError",
    "InvalidConfiguration",
    "InvalidInput",
    "MeshFormatError",
    "OracleLatticeTooLarge",
    "PlyFormatError",
    "SceneFormatError",
]
