"""
Camera configuration files.

A camera configuration is one JSON object:

    {
      "schema_version": 1,
      "fx": 160.0, "fy": 160.0, "cx": 80.0, "cy": 64.0,
      "width": 160, "height": 128,
      "depth_scale": 0.0001,
      "pose": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    }

``depth_scale`` converts stored 16-bit depth values to scene units. ``pose`` is
optional: a row-major 4x4 camera-to-scene transform whose rotation block must
be orthonormal within 1e-6.
"""

import json
from collections.abc import Mapping
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from endofuse.constants import CONFIG_ROTATION_TOLERANCE, REPORT_SCHEMA_VERSION
from endofuse.formats.atomic import write_text_atomic
from endofuse.types import Camera, InvalidInput, RigidTransform
from endofuse.utils.config_validator import (
    ConfigurationError,
    is_integer,
    is_number,
    load_json_document,
    unknown_key_problems,
)

_KNOWN_KEYS: dict[str, Any] = {
    "schema_version": REPORT_SCHEMA_VERSION,
    "fx": None,
    "fy": None,
    "cx": None,
    "cy": None,
    "width": None,
    "height": None,
    "depth_scale": None,
    "pose": None,
}


@dataclass(frozen=True)
class CameraConfigFile:
    """
    Contents of a camera configuration file.

    Attributes:
        camera: Intrinsics and image size
        depth_scale: Multiplier from stored depth values to scene units
        pose: Optional camera-to-scene transform
    """

    camera: Camera
    depth_scale: float
    pose: RigidTransform | None = None

    def __post_init__(self) -> None:
        if not self.depth_scale > 0:
            raise InvalidInput(f"depth_scale must be positive, got {self.depth_scale}")

    def to_dict(self) -> dict[str, Any]:
        cam = self.camera
        document: dict[str, Any] = {
            "schema_version": REPORT_SCHEMA_VERSION,
            "fx": cam.fx,
            "fy": cam.fy,
            "cx": cam.cx,
            "cy": cam.cy,
            "width": cam.width,
            "height": cam.height,
            "depth_scale": self.depth_scale,
        }
        if self.pose is not None:
            document["pose"] = self.pose.matrix.tolist()
        return document


def parse_camera_config(document: Mapping[str, Any]) -> CameraConfigFile:
    """
    Validate a camera configuration document.

    Raises:
        ConfigurationError: Listing every problem found
    """
    if not isinstance(document, Mapping):
        raise ConfigurationError(
            [f"camera configuration must be a JSON object, got {type(document).__name__}"],
            "camera configuration",
        )

    problems = unknown_key_problems(document, _KNOWN_KEYS)
    version = document.get("schema_version", REPORT_SCHEMA_VERSION)
    if version != REPORT_SCHEMA_VERSION:
        problems.append(f"schema_version must be {REPORT_SCHEMA_VERSION}, got {version!r}")

    for key in ("fx", "fy", "cx", "cy", "depth_scale"):
        if key not in document:
            problems.append(f"missing required key '{key}'")
        elif not is_number(document[key]):
            problems.append(f"{key} must be a finite number, got {document[key]!r}")
    for key in ("width", "height"):
        if key not in document:
            problems.append(f"missing required key '{key}'")
        elif not is_integer(document[key]) or document[key] < 1:
            problems.append(f"{key} must be a positive integer, got {document[key]!r}")

    pose = None
    if document.get("pose") is not None:
        matrix = np.asarray(document["pose"], dtype=object)
        if matrix.shape != (4, 4) or not all(is_number(v) for v in matrix.ravel()):
            problems.append("pose must be a 4x4 array of numbers (row-major)")
        else:
            try:
                pose = RigidTransform.from_matrix(
                    matrix.astype(np.float64), tolerance=CONFIG_ROTATION_TOLERANCE
                )
            except InvalidInput as err:
                problems.append(f"pose: {err}")

    if problems:
        raise ConfigurationError(problems, "camera configuration")

    try:
        camera = Camera(
            fx=float(document["fx"]),
            fy=float(document["fy"]),
            cx=float(document["cx"]),
            cy=float(document["cy"]),
            width=int(document["width"]),
            height=int(document["height"]),
        )
        return CameraConfigFile(camera, float(document["depth_scale"]), pose)
    except InvalidInput as err:
        raise ConfigurationError([str(err)], "camera configuration") from err


def read_camera_config(path: Path | str) -> CameraConfigFile:
    """Read and validate a camera configuration file."""
    return parse_camera_config(load_json_document(path, "camera configuration"))


def write_camera_config(config: CameraConfigFile, path: Path | str) -> None:
    """Write a camera configuration file atomically."""
    write_text_atomic(path, json.dumps(config.to_dict(), indent=2))
