"""Tests for camera configuration files."""

import json
from pathlib import Path
from typing import Any

import numpy as np
import pytest

from endofuse.formats.camera import (
    CameraConfigFile,
    parse_camera_config,
    read_camera_config,
    write_camera_config,
)
from endofuse.types import Camera, RigidTransform
from endofuse.utils.config_validator import ConfigurationError


def _document(**overrides: Any) -> dict[str, Any]:
    document: dict[str, Any] = {
        "schema_version": 1,
        "fx": 160.0,
        "fy": 160.0,
        "cx": 80.0,
        "cy": 64.0,
        "width": 160,
        "height": 128,
        "depth_scale": 0.0001,
    }
    document.update(overrides)
    return document


class TestParseCameraConfig:
    """Tests for validating camera documents."""

    def test_valid_document(self) -> None:
        """Test that a complete document gives the camera and depth scale."""
        config = parse_camera_config(_document())
        assert config.camera == Camera(160.0, 160.0, 80.0, 64.0, 160, 128)
        assert config.depth_scale == 0.0001
        assert config.pose is None

    def test_pose_parsed(self) -> None:
        """Test that a 4x4 pose becomes a rigid transform."""
        pose = np.eye(4)
        pose[:3, 3] = [1.0, 2.0, 3.0]
        config = parse_camera_config(_document(pose=pose.tolist()))
        assert config.pose is not None
        np.testing.assert_array_equal(config.pose.translation, [1.0, 2.0, 3.0])

    def test_pose_rotation_tolerance(self) -> None:
        """Test that rotations off by 1e-7 pass and by 1e-3 fail."""
        slightly_off = np.eye(4)
        slightly_off[0, 0] += 1e-7
        assert parse_camera_config(_document(pose=slightly_off.tolist())).pose is not None
        far_off = np.eye(4)
        far_off[0, 1] = 1e-3
        with pytest.raises(ConfigurationError, match="orthonormal"):
            parse_camera_config(_document(pose=far_off.tolist()))

    def test_every_problem_reported(self) -> None:
        """Test that all problems are listed at once."""
        document = _document(fx=-1, width=0)
        del document["depth_scale"]
        document["fxx"] = 1.0
        with pytest.raises(ConfigurationError) as exc_info:
            parse_camera_config(document)
        problems = exc_info.value.problems
        assert any("missing required key 'depth_scale'" in p for p in problems)
        assert any("width must be a positive integer" in p for p in problems)
        assert any("did you mean 'fx'" in p for p in problems)

    def test_principal_point_outside_image(self) -> None:
        """Test that intrinsics are validated by the camera type."""
        with pytest.raises(ConfigurationError, match="principal point"):
            parse_camera_config(_document(cx=500.0))

    def test_non_positive_focal_length(self) -> None:
        """Test that a negative focal length is rejected."""
        with pytest.raises(ConfigurationError, match="focal"):
            parse_camera_config(_document(fx=-1.0))

    def test_wrong_schema_version(self) -> None:
        """Test that only the current schema version is accepted."""
        with pytest.raises(ConfigurationError, match="schema_version"):
            parse_camera_config(_document(schema_version=2))

    def test_boolean_is_not_a_number(self) -> None:
        """Test that booleans are rejected for numeric keys."""
        with pytest.raises(ConfigurationError, match="fy"):
            parse_camera_config(_document(fy=True))

    def test_not_an_object(self) -> None:
        """Test that a JSON array is rejected."""
        with pytest.raises(ConfigurationError):
            parse_camera_config([1, 2, 3])  # type: ignore[arg-type]


class TestCameraConfigFiles:
    """Tests for reading and writing camera files."""

    def test_write_then_read(self, tmp_path: Path) -> None:
        """Test that a written configuration reads back equal."""
        pose = RigidTransform(np.eye(3), np.array([0.5, 0.0, -1.0]))
        config = CameraConfigFile(Camera(100.0, 90.0, 50.0, 40.0, 100, 80), 0.001, pose)
        target = tmp_path / "camera.json"
        write_camera_config(config, target)
        loaded = read_camera_config(target)
        assert loaded.camera == config.camera
        assert loaded.depth_scale == 0.001
        assert loaded.pose is not None
        np.testing.assert_array_equal(loaded.pose.matrix, pose.matrix)

    def test_invalid_json(self, tmp_path: Path) -> None:
        """Test that a syntax error is reported with its location."""
        target = tmp_path / "camera.json"
        target.write_text('{"fx": 1,,}')
        with pytest.raises(ConfigurationError, match="not valid JSON"):
            read_camera_config(target)

    def test_written_document_is_plain_json(self, tmp_path: Path) -> None:
        """Test that the file carries the schema version."""
        target = tmp_path / "camera.json"
        write_camera_config(CameraConfigFile(Camera(1.0, 1.0, 0.0, 0.0, 1, 1), 1.0), target)
        assert json.loads(target.read_text())["schema_version"] == 1
